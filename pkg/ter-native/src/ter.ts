/**
 * Translation edit rate, integer-exact twin of the reference scorer.
 *
 * Contract highlights (restated from the reference implementation; the
 * shared conformance fixtures enforce them):
 *
 * - hypotheses of <= EXACT_SEARCH_MAX_HYP tokens are scored by exhaustive
 *   branch-and-bound over every shift sequence; longer ones use the greedy
 *   loop (largest Levenshtein reduction, accepted only when >= 2, ties by
 *   smallest block start, then length, then destination);
 * - the residual (ins, del, sub) breakdown minimizes (total, ins, del, sub)
 *   lexicographically; co-optimal exact solutions minimize
 *   (total, shifts, ins, del, sub);
 * - shift candidates are every contiguous block of up to MAX_SHIFT_SIZE
 *   tokens moved at most MAX_SHIFT_DIST positions.
 */

export const MAX_SHIFT_SIZE = 10;
export const MAX_SHIFT_DIST = 50;
export const EXACT_SEARCH_MAX_HYP = 6;

export interface TerCounts {
  insertions: number;
  deletions: number;
  substitutions: number;
  shifts: number;
  refLen: number;
}

export function numEdits(c: TerCounts): number {
  return c.insertions + c.deletions + c.substitutions + c.shifts;
}

export function levenshteinTotal(hyp: string[], ref: string[]): number {
  if (hyp.length === 0) return ref.length;
  if (ref.length === 0) return hyp.length;
  let prev = Array.from({ length: ref.length + 1 }, (_, j) => j);
  for (let i = 1; i <= hyp.length; i++) {
    const cur = new Array<number>(ref.length + 1);
    cur[0] = i;
    const h = hyp[i - 1];
    for (let j = 1; j <= ref.length; j++) {
      if (h === ref[j - 1]) {
        cur[j] = prev[j - 1];
      } else {
        cur[j] = 1 + Math.min(prev[j - 1], cur[j - 1], prev[j]);
      }
    }
    prev = cur;
  }
  return prev[ref.length];
}

type Quad = [number, number, number, number]; // total, ins, del, sub

function quadLess(a: Quad, b: Quad): boolean {
  for (let k = 0; k < 4; k++) {
    if (a[k] !== b[k]) return a[k] < b[k];
  }
  return false;
}

export function levenshteinBreakdown(
  hyp: string[],
  ref: string[],
): [number, number, number] {
  const n = ref.length;
  let prev: Quad[] = Array.from({ length: n + 1 }, (_, j) => [j, j, 0, 0] as Quad);
  for (let i = 1; i <= hyp.length; i++) {
    const cur: Quad[] = new Array(n + 1);
    cur[0] = [i, 0, i, 0];
    const h = hyp[i - 1];
    for (let j = 1; j <= n; j++) {
      let best: Quad;
      if (h === ref[j - 1]) {
        best = prev[j - 1];
      } else {
        const a = prev[j - 1];
        best = [a[0] + 1, a[1], a[2], a[3] + 1]; // substitution
      }
      const b = cur[j - 1];
      let cand: Quad = [b[0] + 1, b[1] + 1, b[2], b[3]]; // insertion
      if (quadLess(cand, best)) best = cand;
      const c = prev[j];
      cand = [c[0] + 1, c[1], c[2] + 1, c[3]]; // deletion
      if (quadLess(cand, best)) best = cand;
      cur[j] = best;
    }
    prev = cur;
  }
  const [total, ins, del, sub] = prev[n];
  if (total !== ins + del + sub) {
    throw new Error("internal: inconsistent breakdown");
  }
  return [ins, del, sub];
}

function levenshteinCapped(hyp: string[], ref: string[], cap: number): number {
  const m = hyp.length;
  const n = ref.length;
  if (Math.abs(m - n) > cap) return cap + 1;
  const big = cap + 1;
  let prev = Array.from({ length: n + 1 }, (_, j) => (j <= cap ? j : big));
  for (let i = 1; i <= m; i++) {
    const h = hyp[i - 1];
    const cur = new Array<number>(n + 1).fill(big);
    cur[0] = i <= cap ? i : big;
    const lo = Math.max(1, i - cap);
    const hi = Math.min(n, i + cap);
    let rowMin = cur[0];
    for (let j = lo; j <= hi; j++) {
      let v: number;
      if (h === ref[j - 1]) {
        v = prev[j - 1];
      } else {
        v = prev[j - 1] + 1;
        if (cur[j - 1] + 1 < v) v = cur[j - 1] + 1;
        if (prev[j] + 1 < v) v = prev[j] + 1;
      }
      cur[j] = v <= cap ? v : big;
      if (cur[j] < rowMin) rowMin = cur[j];
    }
    prev = cur;
    if (rowMin > cap) return big;
  }
  return prev[n] <= cap ? prev[n] : big;
}

function shiftResults(seq: string[]): string[][] {
  const n = seq.length;
  const out: string[][] = [];
  const seen = new Set<string>([JSON.stringify(seq)]);
  for (let start = 0; start < n; start++) {
    const maxLen = Math.min(MAX_SHIFT_SIZE, n - start);
    for (let length = 1; length <= maxLen; length++) {
      const block = seq.slice(start, start + length);
      const rest = seq.slice(0, start).concat(seq.slice(start + length));
      const lo = Math.max(0, start - MAX_SHIFT_DIST);
      const hi = Math.min(rest.length, start + MAX_SHIFT_DIST);
      for (let dest = lo; dest <= hi; dest++) {
        if (dest === start) continue;
        const shifted = rest.slice(0, dest).concat(block, rest.slice(dest));
        const key = JSON.stringify(shifted);
        if (!seen.has(key)) {
          seen.add(key);
          out.push(shifted);
        }
      }
    }
  }
  return out;
}

function bestShift(
  words: string[],
  ref: string[],
  current: number,
  floor = 0,
): [string[], number] | null {
  const n = words.length;
  // when current - 2 < floor, no candidate can reach the cap: skip the scan
  if (n < 2 || current < 2 || current - 2 < floor) return null;
  let bestKey: [number, number, number, number] | null = null;
  let bestWords: string[] | null = null;
  let bestDist = 0;
  const cap = current - 2;
  // candidates enumerate in tie-break order (start, length, dest), so the
  // first one reaching the floor cannot be beaten: stop scanning there
  for (let start = 0; start < n; start++) {
    const maxLen = Math.min(MAX_SHIFT_SIZE, n - start);
    for (let length = 1; length <= maxLen; length++) {
      const block = words.slice(start, start + length);
      const rest = words.slice(0, start).concat(words.slice(start + length));
      const lo = Math.max(0, start - MAX_SHIFT_DIST);
      const hi = Math.min(rest.length, start + MAX_SHIFT_DIST);
      for (let dest = lo; dest <= hi; dest++) {
        if (dest === start) continue;
        const shifted = rest.slice(0, dest).concat(block, rest.slice(dest));
        const d = levenshteinCapped(shifted, ref, cap);
        if (d > cap) continue;
        const key: [number, number, number, number] = [-(current - d), start, length, dest];
        if (
          bestKey === null ||
          key[0] < bestKey[0] ||
          (key[0] === bestKey[0] &&
            (key[1] < bestKey[1] ||
              (key[1] === bestKey[1] &&
                (key[2] < bestKey[2] ||
                  (key[2] === bestKey[2] && key[3] < bestKey[3])))))
        ) {
          bestKey = key;
          bestWords = shifted;
          bestDist = d;
          if (d <= floor) {
            return [bestWords, bestDist];
          }
        }
      }
    }
  }
  return bestWords === null ? null : [bestWords, bestDist];
}

function greedyShiftLoop(words: string[], ref: string[]): [string[], number] {
  let current = levenshteinTotal(words, ref);
  const floor = residualFloor(words, ref); // shifts preserve the multiset
  let shifts = 0;
  for (;;) {
    const found = bestShift(words, ref, current, floor);
    if (found === null) break;
    [words, current] = found;
    shifts += 1;
  }
  return [words, shifts];
}

type Quint = [number, number, number, number, number]; // total, shifts, ins, del, sub

function quintLess(a: Quint, b: Quint): boolean {
  for (let k = 0; k < 5; k++) {
    if (a[k] !== b[k]) return a[k] < b[k];
  }
  return false;
}

/**
 * Lower bound on the Levenshtein distance of ANY permutation of hyp to ref:
 * shifts preserve the hypothesis multiset, so at most the multiset overlap
 * can ever match.
 */
function residualFloor(hyp: string[], ref: string[]): number {
  const counts = new Map<string, number>();
  for (const tok of hyp) counts.set(tok, (counts.get(tok) ?? 0) + 1);
  let overlap = 0;
  for (const tok of ref) {
    const c = counts.get(tok) ?? 0;
    if (c > 0) {
      counts.set(tok, c - 1);
      overlap += 1;
    }
  }
  return Math.max(hyp.length, ref.length) - overlap;
}

function exactCounts(hyp: string[], ref: string[]): [number, number, number, number] {
  const [gwords, gshifts] = greedyShiftLoop(hyp.slice(), ref);
  const [gi, gd, gs] = levenshteinBreakdown(gwords, ref);
  let best: Quint = [gshifts + gi + gd + gs, gshifts, gi, gd, gs];

  const [i0, d0, s0] = levenshteinBreakdown(hyp, ref);
  const base: Quint = [i0 + d0 + s0, 0, i0, d0, s0];
  if (quintLess(base, best)) best = base;

  const floor = residualFloor(hyp, ref);
  const seen = new Set<string>([JSON.stringify(hyp)]);
  let frontier: string[][] = [hyp.slice()];
  let depth = 0;
  while (frontier.length > 0 && depth + 1 + floor < best[0]) {
    depth += 1;
    const next: string[][] = [];
    for (const seq of frontier) {
      for (const child of shiftResults(seq)) {
        const key = JSON.stringify(child);
        if (seen.has(key)) continue;
        seen.add(key);
        next.push(child);
        const [ci, cd, cs] = levenshteinBreakdown(child, ref);
        const cand: Quint = [depth + ci + cd + cs, depth, ci, cd, cs];
        if (quintLess(cand, best)) best = cand;
      }
    }
    frontier = next;
  }
  return [best[2], best[3], best[4], best[1]];
}

export function ter(hypTokens: string[], refTokens: string[]): TerCounts {
  if (refTokens.length === 0) {
    throw new Error("undefined TER: empty reference");
  }
  let ins: number;
  let del: number;
  let sub: number;
  let shifts: number;
  if (hypTokens.length <= EXACT_SEARCH_MAX_HYP) {
    [ins, del, sub, shifts] = exactCounts(hypTokens.slice(), refTokens);
  } else {
    const [words, nShifts] = greedyShiftLoop(hypTokens.slice(), refTokens);
    [ins, del, sub] = levenshteinBreakdown(words, refTokens);
    shifts = nShifts;
  }
  return {
    insertions: ins,
    deletions: del,
    substitutions: sub,
    shifts,
    refLen: refTokens.length,
  };
}
