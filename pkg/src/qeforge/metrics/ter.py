"""Translation edit rate with block shifts.

The edit model transforms the hypothesis into the reference using word
insertions, deletions, substitutions (1 edit each), and shifts of contiguous
hypothesis blocks (1 edit each, bounded size and distance).  TER is defined
as the minimum of shifts + residual word-level Levenshtein edits over shift
sequences.

Search strategy, part of the scorer contract (the native batch scorer must
restate it exactly):

* hypotheses of up to EXACT_SEARCH_MAX_HYP tokens are scored by exhaustive
  branch-and-bound over every shift sequence, so short sentences get the true
  minimum;
* longer hypotheses use the greedy loop: repeatedly apply the candidate shift
  with the largest Levenshtein reduction, accepting a shift only when it
  reduces the distance by at least 2 (net gain >= 1 after the shift's own
  cost); ties break on smallest block start, then smallest block length, then
  smallest destination.

The (insertions, deletions, substitutions) breakdown of a residual alignment
is canonicalized by minimizing (total, ins, del, sub) lexicographically, and
co-optimal shift sequences resolve by (total, shifts, ins, del, sub), so two
conforming implementations produce identical integer tuples.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import ValidationError
from .tokenizer import tokenize_tercom

# tercom's conventional search bounds
MAX_SHIFT_SIZE = 10
MAX_SHIFT_DIST = 50

# longest hypothesis scored by exhaustive shift search
EXACT_SEARCH_MAX_HYP = 6


@dataclass(frozen=True)
class TERScore:
    insertions: int
    deletions: int
    substitutions: int
    shifts: int
    ref_len: int

    @property
    def num_edits(self) -> int:
        return self.insertions + self.deletions + self.substitutions + self.shifts

    @property
    def score(self) -> float:
        return self.num_edits / self.ref_len

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.insertions, self.deletions, self.substitutions, self.shifts, self.ref_len)


def levenshtein_total(hyp: list, ref: list) -> int:
    """Plain word-level edit distance (unit costs), two-row DP."""
    if not hyp:
        return len(ref)
    if not ref:
        return len(hyp)
    prev = list(range(len(ref) + 1))
    for i, h in enumerate(hyp, start=1):
        cur = [i] + [0] * len(ref)
        for j, r in enumerate(ref, start=1):
            if h == r:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j - 1], cur[j - 1], prev[j])
        prev = cur
    return prev[-1]


def levenshtein_breakdown(hyp: list, ref: list) -> tuple[int, int, int]:
    """Canonical (insertions, deletions, substitutions) of an optimal
    hyp -> ref alignment, minimizing (total, ins, del, sub) lexicographically.
    """
    m, n = len(hyp), len(ref)
    # Lexicographic min is translation invariant, so ordinary DP stays optimal.
    prev = [(j, j, 0, 0) for j in range(n + 1)]
    for i in range(1, m + 1):
        cur = [(i, 0, i, 0)] + [None] * n  # type: ignore[list-item]
        h = hyp[i - 1]
        for j in range(1, n + 1):
            if h == ref[j - 1]:
                best = prev[j - 1]
            else:
                a = prev[j - 1]
                best = (a[0] + 1, a[1], a[2], a[3] + 1)  # substitution
            b = cur[j - 1]
            cand = (b[0] + 1, b[1] + 1, b[2], b[3])  # insertion
            if cand < best:
                best = cand
            c = prev[j]
            cand = (c[0] + 1, c[1], c[2] + 1, c[3])  # deletion
            if cand < best:
                best = cand
            cur[j] = best
        prev = cur  # type: ignore[assignment]
    total, ins, dels, subs = prev[n]
    assert total == ins + dels + subs
    return ins, dels, subs


def _levenshtein_capped(hyp: list, ref: list, cap: int) -> int:
    """Edit distance if it is <= cap, else cap + 1 (band-limited DP)."""
    m, n = len(hyp), len(ref)
    if abs(m - n) > cap:
        return cap + 1
    big = cap + 1
    prev = [j if j <= cap else big for j in range(n + 1)]
    for i in range(1, m + 1):
        h = hyp[i - 1]
        cur = [i if i <= cap else big] + [big] * n
        lo = max(1, i - cap)
        hi = min(n, i + cap)
        for j in range(lo, hi + 1):
            if h == ref[j - 1]:
                v = prev[j - 1]
            else:
                v = prev[j - 1] + 1
                if cur[j - 1] + 1 < v:
                    v = cur[j - 1] + 1
                if prev[j] + 1 < v:
                    v = prev[j] + 1
            cur[j] = v if v <= cap else big
        prev = cur
        if min(prev) > cap:
            return big
    return prev[n] if prev[n] <= cap else big


def _shift_results(seq: tuple) -> list[tuple]:
    """Every distinct sequence reachable from seq by one bounded block shift."""
    n = len(seq)
    out: list[tuple] = []
    seen: set[tuple] = {seq}
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
                if shifted not in seen:
                    seen.add(shifted)
                    out.append(shifted)
    return out


def _capped_row(prev: list[int], h, ref: list, i: int, cap: int) -> list[int]:
    """One banded DP row; entries exceeding cap saturate at cap + 1."""
    big = cap + 1
    n = len(ref)
    cur = [i if i <= cap else big] + [big] * n
    lo = max(1, i - cap)
    hi = min(n, i + cap)
    for j in range(lo, hi + 1):
        if h == ref[j - 1]:
            v = prev[j - 1]
        else:
            v = prev[j - 1] + 1
            a = cur[j - 1] + 1
            if a < v:
                v = a
            a = prev[j] + 1
            if a < v:
                v = a
        cur[j] = v if v <= cap else big
    return cur


def _best_shift(words: list, ref: list, current: int,
                floor: int = 0) -> tuple[list, int] | None:
    """The single most distance-reducing shift, or None if no candidate cuts
    the Levenshtein distance by >= 2.  `floor` is the permutation-invariant
    residual lower bound; when current - 2 < floor no candidate can qualify
    and the scan is skipped."""
    n = len(words)
    if n < 2 or current < 2 or current - 2 < floor:
        return None
    best_key: tuple[int, int, int, int] | None = None
    best_words: list | None = None
    best_dist = 0
    cap = current - 2
    big = cap + 1
    nref = len(ref)
    # a shifted sequence shares its first min(start, dest) tokens with the
    # original, so those banded DP rows are computed once and reused
    prefix_rows: list[list[int]] = [[j if j <= cap else big for j in range(nref + 1)]]
    for i, h in enumerate(words, start=1):
        prefix_rows.append(_capped_row(prefix_rows[-1], h, ref, i, cap))

    # candidates enumerate in tie-break order (start, length, dest), so the
    # first one reaching the floor cannot be beaten: stop scanning there
    for start in range(n):
        max_len = min(MAX_SHIFT_SIZE, n - start)
        for length in range(1, max_len + 1):
            block = words[start:start + length]
            rest = words[:start] + words[start + length:]
            lo = max(0, start - MAX_SHIFT_DIST)
            hi = min(len(rest), start + MAX_SHIFT_DIST)
            for dest in range(lo, hi + 1):
                if dest == start:
                    continue
                shifted = rest[:dest] + block + rest[dest:]
                if shifted == words:
                    continue
                p = min(start, dest)
                row = prefix_rows[p]
                if min(row) > cap:
                    continue
                for i in range(p + 1, len(shifted) + 1):
                    row = _capped_row(row, shifted[i - 1], ref, i, cap)
                    if min(row) > cap:
                        row = None
                        break
                if row is None:
                    continue
                d = row[nref]
                if d > cap:
                    continue
                key = (-(current - d), start, length, dest)
                if best_key is None or key < best_key:
                    best_key = key
                    best_words = shifted
                    best_dist = d
                    if d <= floor:
                        return best_words, best_dist
    if best_words is None:
        return None
    return best_words, best_dist


def _greedy_shift_loop(words: list, ref: list) -> tuple[list, int]:
    current = levenshtein_total(words, ref)
    floor = _residual_floor(words, ref)  # invariant: shifts preserve the multiset
    shifts = 0
    while True:
        found = _best_shift(words, ref, current, floor)
        if found is None:
            break
        words, current = found
        shifts += 1
    return words, shifts


def _residual_floor(hyp: list, ref: list) -> int:
    """Lower bound on the Levenshtein distance of ANY permutation of hyp to
    ref: shifts preserve the hypothesis multiset, so at most the multiset
    overlap can ever match."""
    overlap = sum((Counter(hyp) & Counter(ref)).values())
    return max(len(hyp), len(ref)) - overlap


def _exact_counts(hyp: list, ref: list) -> tuple[int, int, int, int]:
    """Optimal (ins, del, sub, shifts) by breadth-first search over shift
    sequences, pruned by the greedy result as an initial upper bound and by
    the permutation-invariant residual floor."""
    gwords, gshifts = _greedy_shift_loop(list(hyp), ref)
    gi, gd, gs = levenshtein_breakdown(gwords, ref)
    best = (gshifts + gi + gd + gs, gshifts, gi, gd, gs)

    start = tuple(hyp)
    i0, d0, s0 = levenshtein_breakdown(list(start), ref)
    cand = (i0 + d0 + s0, 0, i0, d0, s0)
    if cand < best:
        best = cand

    floor = _residual_floor(hyp, ref)
    seen = {start}
    frontier = [start]
    depth = 0
    # a state first reached at depth k cannot beat its earlier visit, so a
    # plain visited set is safe
    while frontier and depth + 1 + floor < best[0]:
        depth += 1
        nxt = []
        for seq in frontier:
            for child in _shift_results(seq):
                if child in seen:
                    continue
                seen.add(child)
                nxt.append(child)
                ci, cd, cs = levenshtein_breakdown(list(child), ref)
                cand = (depth + ci + cd + cs, depth, ci, cd, cs)
                if cand < best:
                    best = cand
        frontier = nxt
    _, shifts, ins, dels, subs = best
    return ins, dels, subs, shifts


def ter(hyp_tokens: list, ref_tokens: list) -> TERScore:
    """Score a tokenized hypothesis against a tokenized reference."""
    if not ref_tokens:
        raise ValidationError("undefined TER: empty reference")
    # intern tokens to ints: equality checks dominate the DP inner loops
    table: dict = {}
    words = [table.setdefault(t, len(table)) for t in hyp_tokens]
    ref = [table.setdefault(t, len(table)) for t in ref_tokens]
    if len(words) <= EXACT_SEARCH_MAX_HYP:
        ins, dels, subs, shifts = _exact_counts(words, ref)
    else:
        words, shifts = _greedy_shift_loop(words, ref)
        ins, dels, subs = levenshtein_breakdown(words, ref)
    return TERScore(insertions=ins, deletions=dels, substitutions=subs,
                    shifts=shifts, ref_len=len(ref))


def ter_sentence(hyp_text: str, ref_text: str,
                 lowercase: bool = True, keep_punct: bool = True) -> TERScore:
    """Tokenize both sides with the tercom convention, then score."""
    return ter(
        tokenize_tercom(hyp_text, lowercase=lowercase, keep_punct=keep_punct),
        tokenize_tercom(ref_text, lowercase=lowercase, keep_punct=keep_punct),
    )
