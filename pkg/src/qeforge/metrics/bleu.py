"""Corpus-level 4-gram BLEU over tercom-tokenized text.

Precisions are clipped per sentence and pooled over the corpus.  Zero-count
handling: a zero match count at order >= 2 is smoothed to 1/(2 * total) for
that order; an order with no n-grams at all (every hypothesis shorter than n)
contributes a neutral precision of 1.0; zero unigram matches mean a score of
exactly 0.  Brevity penalty is exp(1 - ref_len/hyp_len), capped at 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..errors import ValidationError
from .tokenizer import tokenize_tercom

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(hyps: Sequence[str], refs: Sequence[str]) -> BleuScore:
    if len(hyps) != len(refs):
        raise ValidationError(f"length mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise ValidationError("empty corpus")

    matches = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp_text, ref_text in zip(hyps, refs):
        hyp = tokenize_tercom(hyp_text)
        ref = tokenize_tercom(ref_text)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp, n)
            if not hyp_counts:
                continue
            ref_counts = _ngrams(ref, n)
            totals[n - 1] += sum(hyp_counts.values())
            matches[n - 1] += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())

    if hyp_len == 0:
        return BleuScore(score=0.0, precisions=(0.0,) * 4, brevity_penalty=0.0,
                         hyp_len=0, ref_len=ref_len)

    precisions: list[float] = []
    for n in range(1, MAX_ORDER + 1):
        m, t = matches[n - 1], totals[n - 1]
        if t == 0:
            precisions.append(1.0)
        elif m == 0:
            precisions.append(0.0 if n == 1 else 1.0 / (2.0 * t))
        else:
            precisions.append(m / t)

    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    if precisions[0] == 0.0:
        score = 0.0
    else:
        log_mean = sum(math.log(p) for p in precisions) / MAX_ORDER
        score = 100.0 * bp * math.exp(log_mean)
    return BleuScore(score=score, precisions=tuple(precisions), brevity_penalty=bp,
                     hyp_len=hyp_len, ref_len=ref_len)
