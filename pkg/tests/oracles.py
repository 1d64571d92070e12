"""Independent oracles used by the test suite.

These deliberately do not share code with the implementations they check:
the TER oracle enumerates every shift sequence by breadth-first search, and
the t-distribution oracle integrates the density numerically.
"""

from __future__ import annotations

import math

MAX_SHIFT_SIZE = 10
MAX_SHIFT_DIST = 50


def lev(a: tuple, b: tuple) -> int:
    """Reference word-level edit distance, full DP."""
    m, n = len(a), len(b)
    dp = list(range(n + 1))
    for i in range(1, m + 1):
        prev_diag = dp[0]
        dp[0] = i
        for j in range(1, n + 1):
            cur = dp[j]
            if a[i - 1] == b[j - 1]:
                dp[j] = prev_diag
            else:
                dp[j] = 1 + min(prev_diag, dp[j - 1], dp[j])
            prev_diag = cur
    return dp[n]


def all_shift_results(seq: tuple) -> set[tuple]:
    """Every sequence reachable from seq by one contiguous-block shift."""
    n = len(seq)
    out: set[tuple] = set()
    for start in range(n):
        for length in range(1, min(MAX_SHIFT_SIZE, n - start) + 1):
            block = seq[start:start + length]
            rest = seq[:start] + seq[start + length:]
            lo = max(0, start - MAX_SHIFT_DIST)
            hi = min(len(rest), start + MAX_SHIFT_DIST)
            for dest in range(lo, hi + 1):
                if dest == start:
                    continue
                shifted = rest[:dest] + block + rest[dest:]
                if shifted != seq:
                    out.add(shifted)
    return out


def oracle_ter_edits(hyp: list, ref: list) -> int:
    """Minimum total edits over EVERY sequence of block shifts (1 edit each)
    followed by optimal insert/delete/substitute edits.  BFS over the shift
    graph, pruned by the best total found so far."""
    start = tuple(hyp)
    ref_t = tuple(ref)
    best = lev(start, ref_t)
    seen = {start}
    frontier = [start]
    depth = 0
    while frontier and depth + 1 < best:
        depth += 1
        nxt = []
        for seq in frontier:
            for child in all_shift_results(seq):
                if child in seen:
                    continue
                seen.add(child)
                nxt.append(child)
                total = depth + lev(child, ref_t)
                if total < best:
                    best = total
        frontier = nxt
    return best


def t_two_tailed_quadrature(t: float, df: int, steps: int = 200_000) -> float:
    """Two-tailed p-value by Simpson integration of the Student-t density
    over [-|t|, |t|], subtracted from 1."""
    t = abs(t)
    if t == 0.0:
        return 1.0
    log_norm = (math.lgamma((df + 1) / 2.0) - math.lgamma(df / 2.0)
                - 0.5 * math.log(df * math.pi))

    def pdf(x: float) -> float:
        return math.exp(log_norm - ((df + 1) / 2.0) * math.log1p(x * x / df))

    if steps % 2 == 1:
        steps += 1
    h = 2.0 * t / steps
    acc = pdf(-t) + pdf(t)
    for k in range(1, steps):
        x = -t + k * h
        acc += pdf(x) * (4 if k % 2 == 1 else 2)
    central = acc * h / 3.0
    return max(0.0, 1.0 - central)
