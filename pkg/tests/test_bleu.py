from __future__ import annotations

import math

import pytest

from qeforge.errors import ValidationError
from qeforge.metrics import bleu
from qeforge.prng import Xoshiro256


def test_identity_corpus_scores_100():
    hyps = ["the cat sat on the mat", "a quick brown fox jumps"]
    score = bleu(hyps, hyps)
    assert score.score == pytest.approx(100.0, abs=1e-9)
    assert score.brevity_penalty == 1.0


def test_short_identity_sentences_still_100():
    # sentences shorter than 4 tokens leave high orders empty; identical
    # corpora must still score 100
    hyps = ["a b", "c"]
    assert bleu(hyps, hyps).score == pytest.approx(100.0, abs=1e-9)


def test_no_shared_unigram_scores_0():
    assert bleu(["x y z"], ["a b c"]).score == 0.0


def test_hand_counted_example():
    # hyp "a b c d" vs ref "a b c e": clipped matches 3/4, 2/3, 1/2, and the
    # zero 4-gram count smooths to 1/(2*1); equal lengths give BP = 1
    score = bleu(["a b c d"], ["a b c e"])
    assert score.precisions == pytest.approx((3 / 4, 2 / 3, 1 / 2, 1 / 2))
    expected = 100.0 * math.exp(
        (math.log(3 / 4) + math.log(2 / 3) + math.log(1 / 2) + math.log(1 / 2)) / 4
    )
    assert score.score == pytest.approx(expected, abs=1e-9)
    assert score.brevity_penalty == 1.0


def test_brevity_penalty_hand_case():
    # hyp 2 tokens vs ref 4 tokens: BP = exp(1 - 4/2) = exp(-1)
    score = bleu(["a b"], ["a b c d"])
    assert score.brevity_penalty == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert score.hyp_len == 2
    assert score.ref_len == 4


def test_length_mismatch():
    with pytest.raises(ValidationError, match="length mismatch"):
        bleu(["a"], ["a", "b"])


def test_all_empty_hypotheses_score_0():
    assert bleu(["", ""], ["a b", "c d"]).score == 0.0


def test_corpus_order_invariance():
    hyps = ["a b c d", "e f g h", "x y z w"]
    refs = ["a b c e", "e f g g", "x y w z"]
    base = bleu(hyps, refs).score
    assert bleu(list(reversed(hyps)), list(reversed(refs))).score == pytest.approx(base, abs=1e-12)


def test_score_equals_bp_times_geomean():
    rng = Xoshiro256(99)
    vocab = ["a", "b", "c", "d", "e", "f"]
    for _ in range(50):
        hyps, refs = [], []
        for _ in range(1 + rng.below(4)):
            hyps.append(" ".join(vocab[rng.below(6)] for _ in range(1 + rng.below(8))))
            refs.append(" ".join(vocab[rng.below(6)] for _ in range(1 + rng.below(8))))
        s = bleu(hyps, refs)
        if s.precisions[0] == 0.0 or s.hyp_len == 0:
            assert s.score == 0.0
            continue
        geomean = math.exp(sum(math.log(p) for p in s.precisions) / 4)
        assert s.score == pytest.approx(100.0 * s.brevity_penalty * geomean, abs=1e-9)


def test_tokenization_is_tercom_lowercased():
    # case differences vanish; punctuation becomes tokens on both sides
    assert bleu(["Hello, World!"], ["hello , world !"]).score == pytest.approx(100.0, abs=1e-9)
