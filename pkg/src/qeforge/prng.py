"""Deterministic 64-bit PRNG and the ordering primitives built on it.

Every shuffle, subsample, and selection in this package is driven by the
generator defined here (xoshiro256** seeded through splitmix64).  The exact
algorithm is part of the reproducibility contract: given the same seed, any
conforming implementation, in any language, must produce the same permutation.
Do not swap in a platform RNG.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256:
    """xoshiro256** with its 256-bit state expanded from one 64-bit seed."""

    def __init__(self, seed: int):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state, word = _splitmix64(state)
            s.append(word)
        if not any(s):
            # all-zero state is the one forbidden configuration
            s[0] = 0x9E3779B97F4A7C15
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), modulo-bias-free via rejection."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n


def derive_seed(seed: int, label: str) -> int:
    """Stable sub-seed for a named purpose, so one experiment seed can drive
    several independent draws without stream reuse."""
    digest = hashlib.sha256(f"{seed & _MASK64}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of range(n), a pure function of the seed."""
    rng = Xoshiro256(seed)
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def selection(n: int, k: int, seed: int) -> list[int]:
    """k distinct indices out of range(n), returned in ascending order."""
    if not 0 <= k <= n:
        raise ValueError(f"cannot select {k} items from {n}")
    return sorted(permutation(n, seed)[:k])
