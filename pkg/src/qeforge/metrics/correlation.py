"""Pearson correlation, the paper-scale rescaling, and significance testing.

The significance test for comparing two systems against the same gold labels
is Williams' t-test for dependent correlations sharing one variable; a paired
bootstrap is available as an alternative.  The Student-t CDF is computed via
the regularized incomplete beta function, implemented here so the package has
no stats dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import ValidationError
from ..prng import Xoshiro256


@dataclass(frozen=True)
class PearsonResult:
    r: float
    rescaled: float
    n: int


def pearson(xs: Sequence[float], ys: Sequence[float]) -> PearsonResult:
    """Sample Pearson correlation, rescaled to [-100, 100]."""
    if len(xs) != len(ys):
        raise ValidationError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ValidationError(f"need at least 2 points, got {n}")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    sxx = math.fsum((x - mean_x) ** 2 for x in xs)
    syy = math.fsum((y - mean_y) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ValidationError("undefined correlation: constant input")
    sxy = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return PearsonResult(r=r, rescaled=100.0 * r, n=n)


def increase_pct(best: float, baseline: float) -> float:
    """Percentage improvement of best over baseline, to 2 decimals."""
    if baseline == 0:
        raise ValidationError("undefined increase: zero baseline")
    return round(100.0 * (best - baseline) / baseline, 2)


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            break
    return h


def _betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed(t: float, df: float) -> float:
    """Two-tailed p-value for t under Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValidationError(f"degrees of freedom must be positive, got {df}")
    x = df / (df + t * t)
    return _betainc(df / 2.0, 0.5, x)


def williams_test(r12: float, r13: float, r23: float, n: int) -> float:
    """Two-tailed p for the difference between dependent correlations r12 and
    r13 that share variable 1, with n observations (t-test, n - 3 df).

    Equal correlations short-circuit to p = 1.0 regardless of r23, since the
    statistic is exactly zero there even when the correlation matrix is
    singular (e.g. duplicated prediction vectors).
    """
    if n < 4:
        raise ValidationError(f"need n >= 4 observations, got {n}")
    for name, r in (("r12", r12), ("r13", r13), ("r23", r23)):
        if not -1.0 <= r <= 1.0:
            raise ValidationError(f"{name}={r} outside [-1, 1]")
    if r12 == r13:
        return 1.0
    det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23
    if det <= 1e-12:
        raise ValidationError(
            f"degenerate correlation matrix (|R| = {det:.3e}); "
            "the test statistic is undefined"
        )
    rbar = 0.5 * (r12 + r13)
    denom = 2.0 * det * (n - 1) / (n - 3) + rbar * rbar * (1.0 - r23) ** 3
    t = (r12 - r13) * math.sqrt((n - 1) * (1.0 + r23) / denom)
    return student_t_two_tailed(t, n - 3)


def bootstrap_test(
    gold: Sequence[float],
    preds_a: Sequence[float],
    preds_b: Sequence[float],
    resamples: int = 1000,
    seed: int = 8,
) -> float:
    """Paired bootstrap p-value for |r(gold, a)| vs |r(gold, b)|.

    Two-sided: the p-value is the fraction of resamples in which the sign of
    the correlation difference flips relative to the full-sample difference.
    """
    n = len(gold)
    if not (len(preds_a) == len(preds_b) == n):
        raise ValidationError("length mismatch between gold and predictions")
    observed = pearson(gold, preds_a).r - pearson(gold, preds_b).r
    if observed == 0.0:
        return 1.0
    rng = Xoshiro256(seed)
    flips = 0
    for _ in range(resamples):
        idx = [rng.below(n) for _ in range(n)]
        g = [gold[i] for i in idx]
        a = [preds_a[i] for i in idx]
        b = [preds_b[i] for i in idx]
        try:
            delta = pearson(g, a).r - pearson(g, b).r
        except ValidationError:
            # degenerate resample (constant column); count as a flip
            flips += 1
            continue
        if delta * observed <= 0:
            flips += 1
    return min(1.0, 2.0 * flips / resamples)


@dataclass(frozen=True)
class SignificanceGrid:
    """Pairwise Y/N significance of correlation differences against gold."""

    labels: tuple[str, ...]
    p_values: dict[tuple[str, str], float]
    marks: dict[tuple[str, str], str]
    alpha: float

    def cell(self, row: str, col: str) -> str | None:
        return self.marks.get((row, col))


def significance_grid(
    gold: Sequence[float],
    systems: Mapping[str, Sequence[float]],
    alpha: float = 0.05,
    method: str = "williams",
    seed: int = 8,
) -> SignificanceGrid:
    """Upper-triangular grid over the systems, in mapping order."""
    if method not in ("williams", "bootstrap"):
        raise ValidationError(f"unknown significance method {method!r}")
    labels = tuple(systems)
    n = len(gold)
    for name, preds in systems.items():
        if len(preds) != n:
            raise ValidationError(f"system {name!r} has {len(preds)} predictions for {n} gold labels")
    p_values: dict[tuple[str, str], float] = {}
    marks: dict[tuple[str, str], str] = {}
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            if method == "williams":
                r12 = pearson(gold, systems[a]).r
                r13 = pearson(gold, systems[b]).r
                r23 = pearson(systems[a], systems[b]).r
                p = williams_test(r12, r13, r23, n)
            else:
                p = bootstrap_test(gold, systems[a], systems[b], seed=seed)
            p_values[(a, b)] = p
            marks[(a, b)] = "Y" if p < alpha else "N"
    return SignificanceGrid(labels=labels, p_values=p_values, marks=marks, alpha=alpha)
