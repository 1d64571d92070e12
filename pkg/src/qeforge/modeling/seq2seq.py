"""Character-level encoder-decoder translator for desk-scale experiments.

A minimal stand-in for a pretrained translation model behind the Translator
interface.  The encoder embeds input characters; the decoder emits output
characters against the position-aligned encoder state (hard monotonic
alignment, a padding state beyond the input length), trained with
teacher-forced cross-entropy.  That is enough capacity to learn copy and
character-substitution toy tasks exactly, which is all the pipeline needs
from its desk-scale MT component; a real system plugs in behind the same
translate() contract.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

_BASE_CHARS = tuple(string.printable[:95])  # printable ASCII minus controls


@dataclass
class Seq2SeqConfig:
    hidden_width: int = 24
    lr: float = 0.5
    max_extra_len: int = 10  # decode budget beyond the input length


class ToySeq2Seq:
    """Trainable character translator with deterministic greedy decoding."""

    name = "toy-seq2seq"

    def __init__(self, seed: int, config: Seq2SeqConfig | None = None):
        self.seed = seed
        self.config = config or Seq2SeqConfig()
        self._chars: list[str] = list(_BASE_CHARS)
        self._table: dict[str, int] = {c: i for i, c in enumerate(self._chars)}
        self._rng = np.random.default_rng(seed)
        self._init_params()

    def _init_params(self) -> None:
        d = self.config.hidden_width
        v_in = len(self._chars) + 1  # final row doubles as the padding state
        v_out = len(self._chars) + 1  # final column is end-of-sequence
        self.params = {
            "char_emb": self._rng.normal(0.0, 0.1, size=(v_in, d)),
            "out_w": self._rng.normal(0.0, 0.1, size=(d, v_out)),
            "out_b": np.zeros(v_out),
        }

    @property
    def _pad_id(self) -> int:
        return len(self._chars)

    @property
    def _eos_id(self) -> int:
        return len(self._chars)

    def fit_vocabulary(self, texts: list[str]) -> None:
        """Grow the character table from a corpus (sorted, so deterministic);
        embeddings for new characters are freshly initialized rows."""
        new_chars = sorted({c for t in texts for c in t} - set(self._table))
        if not new_chars:
            return
        d = self.config.hidden_width
        emb = self.params["char_emb"]
        rows = self._rng.normal(0.0, 0.1, size=(len(new_chars), d))
        # padding row stays last
        self.params["char_emb"] = np.vstack([emb[:-1], rows, emb[-1:]])
        out_w = self.params["out_w"]
        cols = self._rng.normal(0.0, 0.1, size=(d, len(new_chars)))
        self.params["out_w"] = np.hstack([out_w[:, :-1], cols, out_w[:, -1:]])
        self.params["out_b"] = np.concatenate(
            [self.params["out_b"][:-1], np.zeros(len(new_chars)), self.params["out_b"][-1:]]
        )
        for c in new_chars:
            self._table[c] = len(self._chars)
            self._chars.append(c)

    def _ids(self, text: str) -> list[int]:
        pad = self._pad_id
        return [self._table.get(c, pad) for c in text]

    def _aligned_state(self, src_ids: list[int], t: int) -> int:
        return src_ids[t] if t < len(src_ids) else self._pad_id

    # -- training -----------------------------------------------------------

    def step_loss_and_grads(self, batch: list[tuple[str, str]]
                            ) -> tuple[float, dict[str, np.ndarray]]:
        """Teacher-forced cross-entropy over a batch of (src, ref) pairs."""
        emb = self.params["char_emb"]
        out_w = self.params["out_w"]
        out_b = self.params["out_b"]
        grads = {name: np.zeros_like(p) for name, p in self.params.items()}
        total = 0.0
        count = 0
        for src, ref in batch:
            src_ids = self._ids(src)
            targets = self._ids(ref) + [self._eos_id]
            for t, target in enumerate(targets):
                state_id = self._aligned_state(src_ids, t)
                e = emb[state_id]
                logits = e @ out_w + out_b
                logits = logits - logits.max()
                expd = np.exp(logits)
                probs = expd / expd.sum()
                total -= float(np.log(max(probs[target], 1e-300)))
                count += 1
                dlogits = probs.copy()
                dlogits[target] -= 1.0
                grads["out_w"] += np.outer(e, dlogits)
                grads["out_b"] += dlogits
                grads["char_emb"][state_id] += out_w @ dlogits
        if count == 0:
            raise ValidationError("empty training batch")
        for g in grads.values():
            g /= count
        return total / count, grads

    def apply_sgd(self, grads: dict[str, np.ndarray], lr: float | None = None) -> None:
        lr = self.config.lr if lr is None else lr
        for name, p in self.params.items():
            p -= lr * grads[name]

    def eval_loss(self, pairs: list[tuple[str, str]]) -> float:
        """Mean per-character cross-entropy without gradient bookkeeping."""
        emb = self.params["char_emb"]
        out_w = self.params["out_w"]
        out_b = self.params["out_b"]
        total = 0.0
        count = 0
        for src, ref in pairs:
            src_ids = self._ids(src)
            targets = self._ids(ref) + [self._eos_id]
            for t, target in enumerate(targets):
                e = emb[self._aligned_state(src_ids, t)]
                logits = e @ out_w + out_b
                logits = logits - logits.max()
                probs = np.exp(logits)
                probs /= probs.sum()
                total -= float(np.log(max(probs[target], 1e-300)))
                count += 1
        return total / count if count else 0.0

    # -- Translator interface -----------------------------------------------

    def translate(self, texts: list[str]) -> list[str]:
        """Greedy decode; deterministic for fixed parameters."""
        out = []
        emb = self.params["char_emb"]
        out_w = self.params["out_w"]
        out_b = self.params["out_b"]
        for text in texts:
            src_ids = self._ids(text)
            budget = len(src_ids) + self.config.max_extra_len
            chars: list[str] = []
            for t in range(budget):
                e = emb[self._aligned_state(src_ids, t)]
                logits = e @ out_w + out_b
                best = int(np.argmax(logits))
                if best == self._eos_id:
                    break
                chars.append(self._chars[best])
            out.append("".join(chars))
        return out

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: p.copy() for name, p in self.params.items()}

    def restore(self, snap: dict[str, np.ndarray]) -> None:
        self.params = {name: p.copy() for name, p in snap.items()}


def toy_seq2seq(seed: int, config: Seq2SeqConfig | None = None) -> ToySeq2Seq:
    return ToySeq2Seq(seed=seed, config=config)


class IdentityTranslator:
    """Echoes its input; useful as an injected stub."""

    name = "identity"

    def translate(self, texts: list[str]) -> list[str]:
        return list(texts)
