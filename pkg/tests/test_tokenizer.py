from __future__ import annotations

import re
import unicodedata

from qeforge.metrics import tokenize_tercom
from qeforge.prng import Xoshiro256


def test_punctuation_splits():
    assert tokenize_tercom("Hello, world!") == ["hello", ",", "world", "!"]


def test_lowercasing():
    assert tokenize_tercom("ABC") == ["abc"]
    assert tokenize_tercom("ABC", lowercase=False) == ["ABC"]


def test_whitespace_normalization():
    assert tokenize_tercom("  a   b ") == ["a", "b"]
    assert tokenize_tercom("a\tb\nc") == ["a", "b", "c"]


def test_empty_input():
    assert tokenize_tercom("") == []
    assert tokenize_tercom("   ") == []


def test_punct_removed_when_disabled():
    assert tokenize_tercom("Hello, world!", keep_punct=False) == ["hello", "world"]


def test_symbols_split_like_punctuation():
    assert tokenize_tercom("price: 5$") == ["price", ":", "5", "$"]
    assert tokenize_tercom("a+b=c") == ["a", "+", "b", "=", "c"]


def test_unicode_punct_and_case():
    assert tokenize_tercom("«Ärger»") == ["«", "ärger", "»"]
    assert tokenize_tercom("don’t") == ["don", "’", "t"]


def test_consecutive_punct_chars_become_single_tokens():
    assert tokenize_tercom("wait...") == ["wait", ".", ".", "."]


def _reference_tokenize(text: str, lowercase: bool, keep_punct: bool) -> list[str]:
    """Independent regex-based tercom-convention tokenizer used as an oracle."""
    if lowercase:
        text = text.lower()
    is_p = lambda ch: unicodedata.category(ch)[0] in ("P", "S")
    out = []
    for chunk in re.split(r"\s+", text):
        if not chunk:
            continue
        pieces = re.findall(r"[^\W_]+|[\W_]", chunk, flags=re.UNICODE)
        for piece in pieces:
            if len(piece) == 1 and is_p(piece):
                if keep_punct:
                    out.append(piece)
            else:
                out.append(piece)
    return out


def test_cross_checked_against_reference_tokenizer():
    """50-string sample cross-check against an independently written
    tokenizer following the same convention."""
    rng = Xoshiro256(50)
    pieces = ["Hello", "world", "a,b", "x!", "«q»", "N°5", "don’t", "1+2=3",
              "tab\tsep", "CAPS", "mixÉd", "...", "semi;colon", "(paren)",
              "slash/slash", "hy-phen", "€99", "１２３", "ＡＢＣ", "quote\"q\""]
    for case in range(50):
        k = 1 + rng.below(6)
        text = " ".join(pieces[rng.below(len(pieces))] for _ in range(k))
        lowercase = rng.below(2) == 0
        keep = rng.below(2) == 0
        got = tokenize_tercom(text, lowercase=lowercase, keep_punct=keep)
        want = _reference_tokenize(text, lowercase, keep)
        assert got == want, f"case {case}: {text!r} -> {got} != {want}"
