"""Input rendering, pluggable encoder backends, and the regression model."""

from .encoder import (
    MAX_RENDERED_TOKENS,
    QEModel,
    ToyEncoder,
    mse_loss,
    toy_encoder,
)
from .render import (
    SPECIAL_TOKENS,
    SpecialTokens,
    TagMode,
    domain_tag,
    render_input,
    render_sample,
)
from .registry import BACKENDS, build_qe_model, load_model, make_backend, save_model
from .seq2seq import IdentityTranslator, Seq2SeqConfig, ToySeq2Seq, toy_seq2seq


def extend_vocabulary(backend: ToyEncoder, tags: list[str]) -> ToyEncoder:
    """Add tags to the backend vocabulary; see ToyEncoder.extend_vocabulary."""
    return backend.extend_vocabulary(tags)


def forward(model: QEModel, rendered: list[str]):
    """Raw scalar predictions for a batch of rendered inputs."""
    return model.forward(rendered)


__all__ = [
    "BACKENDS",
    "IdentityTranslator",
    "MAX_RENDERED_TOKENS",
    "QEModel",
    "SPECIAL_TOKENS",
    "Seq2SeqConfig",
    "SpecialTokens",
    "TagMode",
    "ToyEncoder",
    "ToySeq2Seq",
    "build_qe_model",
    "domain_tag",
    "extend_vocabulary",
    "forward",
    "load_model",
    "make_backend",
    "mse_loss",
    "render_input",
    "render_sample",
    "save_model",
    "toy_encoder",
    "toy_seq2seq",
]
