from __future__ import annotations

import pytest

from qeforge.prng import Xoshiro256, derive_seed, permutation, selection

# First outputs of xoshiro256** for seed 0 via splitmix64 expansion, frozen at
# first run. Guards the generator against accidental algorithm drift; the
# algorithm itself is the cross-implementation contract.
_SEED0_FIRST5 = [
    11091344671253066420,
    13793997310169335082,
    1900383378846508768,
    7684712102626143532,
    13521403990117723737,
]


def test_seed0_stream_frozen():
    rng = Xoshiro256(0)
    assert [rng.next_u64() for _ in range(5)] == _SEED0_FIRST5


def test_streams_are_deterministic_and_seed_sensitive():
    a = [Xoshiro256(42).next_u64() for _ in range(8)]
    b = [Xoshiro256(42).next_u64() for _ in range(8)]
    c = [Xoshiro256(43).next_u64() for _ in range(8)]
    assert a == b
    assert a != c


def test_below_range_and_rejection():
    rng = Xoshiro256(7)
    draws = [rng.below(10) for _ in range(1000)]
    assert all(0 <= d < 10 for d in draws)
    assert len(set(draws)) == 10
    with pytest.raises(ValueError):
        rng.below(0)


def test_permutation_is_a_permutation():
    for seed in (0, 1, 8, 123456789):
        p = permutation(50, seed)
        assert sorted(p) == list(range(50))
    assert permutation(1, 8) == [0]
    assert permutation(0, 8) == []


def test_permutation_depends_on_seed_only():
    assert permutation(20, 8) == permutation(20, 8)
    assert permutation(20, 8) != permutation(20, 9)


def test_selection_sorted_distinct():
    sel = selection(100, 10, 8)
    assert sel == sorted(sel)
    assert len(set(sel)) == 10
    assert selection(5, 5, 3) == [0, 1, 2, 3, 4]
    assert selection(5, 0, 3) == []
    with pytest.raises(ValueError):
        selection(5, 6, 3)


def test_derive_seed_stable_and_label_sensitive():
    assert derive_seed(8, "a") == derive_seed(8, "a")
    assert derive_seed(8, "a") != derive_seed(8, "b")
    assert derive_seed(8, "a") != derive_seed(9, "a")
