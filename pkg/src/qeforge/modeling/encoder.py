"""Desk-scale trainable encoder and the scalar regression head on top of it.

The toy encoder is a stand-in for a large multilingual encoder behind the
same interface: token + position embeddings, one tanh mixing layer, mean
pooling.  Tokenization is whitespace-split with per-byte fallback for
out-of-vocabulary words, so any UTF-8 text is encodable and the special
template tokens are always single vocabulary items.

All math is float64 numpy with explicit backward passes; gradients are exact
(checked against central finite differences in the test suite).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .render import SPECIAL_TOKENS

logger = logging.getLogger(__name__)

MAX_RENDERED_TOKENS = 200


def _byte_token(b: int) -> str:
    return f"<0x{b:02X}>"


_BYTE_TOKENS = tuple(_byte_token(b) for b in range(256))


class ToyEncoder:
    """Trainable mean-pooling encoder over whitespace/byte-fallback tokens."""

    name = "toy"
    pooling = "mean"
    default_lr = 0.2

    def __init__(self, seed: int, hidden_width: int = 32,
                 vocab_words: list[str] | None = None):
        if hidden_width < 8:
            raise ValidationError(f"hidden_width must be >= 8, got {hidden_width}")
        self.seed = seed
        self.hidden_width = hidden_width
        tokens = list(SPECIAL_TOKENS.all()[:2]) + list(_BYTE_TOKENS)
        for word in vocab_words or []:
            if word not in tokens:
                tokens.append(word)
        self._table: dict[str, int] = {tok: i for i, tok in enumerate(tokens)}
        self._tokens: list[str] = tokens
        self._extensions = 0
        d = hidden_width
        rng = np.random.default_rng(seed)
        self.params: dict[str, np.ndarray] = {
            "embeddings": rng.normal(0.0, 0.02, size=(len(tokens), d)),
            "positions": rng.normal(0.0, 0.02, size=(MAX_RENDERED_TOKENS, d)),
            "mix_w": rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, d)),
            "mix_b": np.zeros(d),
        }
        self._truncations = 0

    # -- vocabulary ---------------------------------------------------------

    @property
    def vocab_size(self) -> int:
        return len(self._tokens)

    @property
    def vocab(self) -> list[str]:
        return list(self._tokens)

    def extend_vocabulary(self, tags: list[str]) -> "ToyEncoder":
        """Add tags as single vocabulary items; existing rows are untouched.

        New rows initialize to the mean of the existing embedding matrix plus
        seeded Gaussian noise (sigma 0.02), keeping them in-distribution.
        """
        for tag in tags:
            if tag in self._table:
                raise ValidationError(f"tag {tag!r} already in vocabulary")
        emb = self.params["embeddings"]
        mean_row = emb.mean(axis=0)
        rng = np.random.default_rng((self.seed, self._extensions, 0xE))
        rows = [mean_row + rng.normal(0.0, 0.02, size=emb.shape[1]) for _ in tags]
        self.params["embeddings"] = np.vstack([emb] + rows)
        for tag in tags:
            self._table[tag] = len(self._tokens)
            self._tokens.append(tag)
        self._extensions += 1
        return self

    def token_ids(self, text: str) -> list[int]:
        ids: list[int] = []
        for word in text.split():
            idx = self._table.get(word)
            if idx is not None:
                ids.append(idx)
            else:
                ids.extend(self._table[_byte_token(b)] for b in word.encode("utf-8"))
        return ids

    def _truncate(self, ids: list[int]) -> list[int]:
        """Cap at MAX_RENDERED_TOKENS, dropping target-side tokens first.

        The tail of the template (trailing tag and separator, when the text
        is a rendered input) is preserved; the cut lands at the end of the
        TRG segment before eating into SRC.
        """
        if len(ids) <= MAX_RENDERED_TOKENS:
            return ids
        self._truncations += 1
        logger.warning("truncating %d-token input to %d tokens",
                       len(ids), MAX_RENDERED_TOKENS)
        sep_id = self._table.get(SPECIAL_TOKENS.sep)
        tail_len = 0
        if sep_id is not None and ids and ids[-1] == sep_id:
            tail_len = 1
            if len(ids) >= 2 and self._tokens[ids[-2]] in SPECIAL_TOKENS.domain_tags:
                tail_len = 2
        overflow = len(ids) - MAX_RENDERED_TOKENS
        body_end = len(ids) - tail_len
        return ids[:max(body_end - overflow, 0)] + ids[body_end:]

    # -- forward / backward -------------------------------------------------

    def _forward_ids(self, ids: list[int]) -> tuple[np.ndarray, dict]:
        if not ids:
            raise ValidationError("cannot encode empty token sequence")
        emb = self.params["embeddings"]
        pos = self.params["positions"]
        x = emb[ids] + pos[: len(ids)]
        z = x @ self.params["mix_w"] + self.params["mix_b"]
        h = np.tanh(z)
        pooled = h.mean(axis=0)
        return pooled, {"ids": ids, "x": x, "h": h}

    def encode(self, rendered: list[str]) -> np.ndarray:
        """Pooled vectors for a batch of rendered inputs, one row each."""
        return np.stack([self._forward_ids(self._truncate(self.token_ids(t)))[0]
                         for t in rendered])

    def backward_ids(self, cache: dict, d_pooled: np.ndarray,
                     grads: dict[str, np.ndarray]) -> None:
        ids, x, h = cache["ids"], cache["x"], cache["h"]
        t = len(ids)
        dh = np.repeat(d_pooled[None, :] / t, t, axis=0)
        dz = dh * (1.0 - h * h)
        grads["mix_w"] += x.T @ dz
        grads["mix_b"] += dz.sum(axis=0)
        dx = dz @ self.params["mix_w"].T
        np.add.at(grads["embeddings"], ids, dx)
        grads["positions"][:t] += dx

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(p) for name, p in self.params.items()}

    def state(self) -> dict:
        return {"vocab": list(self._tokens), "seed": self.seed,
                "hidden_width": self.hidden_width, "extensions": self._extensions}


@dataclass
class QEModel:
    """Encoder backend plus an affine head producing one raw scalar.

    Predictions are the raw regression output ("logit"), never squashed.
    """

    backend: ToyEncoder
    head_w: np.ndarray
    head_b: np.ndarray  # shape (1,)

    @classmethod
    def fresh(cls, backend: ToyEncoder) -> "QEModel":
        rng = np.random.default_rng((backend.seed, 0xD))
        head_w = rng.normal(0.0, 0.02, size=backend.hidden_width)
        return cls(backend=backend, head_w=head_w, head_b=np.zeros(1))

    # -- inference ----------------------------------------------------------

    def forward(self, rendered: list[str]) -> np.ndarray:
        if not rendered:
            raise ValidationError("empty batch")
        pooled = self.backend.encode(rendered)
        return pooled @ self.head_w + self.head_b[0]

    # -- training -----------------------------------------------------------

    def loss_and_grads(self, rendered: list[str], labels: np.ndarray
                       ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean squared error and exact gradients for every parameter."""
        if len(rendered) != len(labels):
            raise ValidationError("batch/label length mismatch")
        b = self.backend
        n = len(rendered)
        grads = b.zero_grads()
        grads["head_w"] = np.zeros_like(self.head_w)
        grads["head_b"] = np.zeros_like(self.head_b)
        total = 0.0
        for text, y in zip(rendered, labels):
            pooled, cache = b._forward_ids(b._truncate(b.token_ids(text)))
            pred = pooled @ self.head_w + self.head_b[0]
            err = pred - y
            total += err * err
            dpred = 2.0 * err / n
            grads["head_w"] += dpred * pooled
            grads["head_b"][0] += dpred
            b.backward_ids(cache, dpred * self.head_w, grads)
        return total / n, grads

    def parameters(self) -> dict[str, np.ndarray]:
        out = dict(self.backend.params)
        out["head_w"] = self.head_w
        out["head_b"] = self.head_b
        return out

    def apply_sgd(self, grads: dict[str, np.ndarray], lr: float,
                  weight_decay: float = 0.0) -> None:
        """One stochastic gradient step with decoupled weight decay."""
        for name, p in self.parameters().items():
            p -= lr * grads[name]
            if weight_decay and name not in ("mix_b", "head_b"):
                p -= lr * weight_decay * p

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: p.copy() for name, p in self.parameters().items()}

    def restore(self, snap: dict[str, np.ndarray]) -> None:
        for name, p in self.parameters().items():
            np.copyto(p, snap[name])


def mse_loss(preds, labels) -> float:
    """Mean squared error between equal-length sequences."""
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if preds.shape != labels.shape:
        raise ValidationError(f"length mismatch: {preds.shape} vs {labels.shape}")
    diff = preds - labels
    return float(np.mean(diff * diff))


def toy_encoder(seed: int, hidden_width: int = 32,
                vocab_words: list[str] | None = None) -> ToyEncoder:
    return ToyEncoder(seed=seed, hidden_width=hidden_width, vocab_words=vocab_words)
