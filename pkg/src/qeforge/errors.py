"""Exception hierarchy shared across the package."""


class QEForgeError(Exception):
    """Base class for package errors."""


class ValidationError(QEForgeError, ValueError):
    """Bad input data, configuration, or violated precondition.

    The CLI maps this class to exit code 1; anything else non-zero maps to 2.
    """
