"""qeforge: domain-adaptation training pipeline and evaluation suite for
machine-translation quality estimation."""

__version__ = "0.1.0"
