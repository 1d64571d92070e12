"""Backend registry and model (de)serialization.

Checkpoint payloads are a directory of one .npy file per parameter tensor
plus a vocabulary table, which keeps serialization byte-stable run to run
(no archive timestamps).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from .encoder import QEModel, ToyEncoder, toy_encoder
from .render import TagMode, SPECIAL_TOKENS
from .seq2seq import ToySeq2Seq, toy_seq2seq

BACKENDS = {
    "toy": toy_encoder,
    "toy-seq2seq": toy_seq2seq,
}


def make_backend(name: str, **options) -> ToyEncoder | ToySeq2Seq:
    try:
        factory = BACKENDS[name]
    except KeyError:
        raise ValidationError(
            f"unknown backend {name!r}; available: {sorted(BACKENDS)}"
        ) from None
    return factory(**options)


def build_qe_model(backend_name: str, backend_options: dict, tag_mode: TagMode) -> QEModel:
    """Fresh QE model; TAG mode extends the vocabulary with the domain tags."""
    backend = make_backend(backend_name, **backend_options)
    if not isinstance(backend, ToyEncoder):
        raise ValidationError(f"backend {backend_name!r} is not an encoder")
    if tag_mode == TagMode.TAG:
        backend.extend_vocabulary(list(SPECIAL_TOKENS.domain_tags))
    return QEModel.fresh(backend)


def save_model(model: QEModel, directory: str | Path) -> None:
    directory = Path(directory)
    params_dir = directory / "params"
    params_dir.mkdir(parents=True, exist_ok=True)
    for name, tensor in model.parameters().items():
        np.save(params_dir / f"{name}.npy", tensor)
    state = model.backend.state()
    (directory / "vocab.json").write_text(
        json.dumps(state, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_model(directory: str | Path) -> QEModel:
    directory = Path(directory)
    state = json.loads((directory / "vocab.json").read_text(encoding="utf-8"))
    backend = ToyEncoder(seed=state["seed"], hidden_width=state["hidden_width"])
    # rebuild the vocabulary table exactly as saved
    backend._tokens = list(state["vocab"])
    backend._table = {tok: i for i, tok in enumerate(backend._tokens)}
    backend._extensions = state.get("extensions", 0)
    params_dir = directory / "params"
    for name in list(backend.params):
        backend.params[name] = np.load(params_dir / f"{name}.npy")
    head_w = np.load(params_dir / "head_w.npy")
    head_b = np.load(params_dir / "head_b.npy")
    if backend.params["embeddings"].shape[0] != len(backend._tokens):
        raise ValidationError(f"corrupt checkpoint at {directory}: vocab/embedding mismatch")
    return QEModel(backend=backend, head_w=head_w, head_b=head_b)
