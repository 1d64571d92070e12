"""Regenerate the shared conformance fixtures from the reference scorer.

Both the reference implementation (qeforge.metrics) and the native batch
scorer (ter-native) must pass these fixtures; regenerate only when the
scorer contract itself changes, and update both implementations together.
"""

from __future__ import annotations

import json
from pathlib import Path

from qeforge.metrics import ter, tokenize_tercom
from qeforge.prng import Xoshiro256

ROOT = Path(__file__).parent


def tokenizer_cases() -> list[dict]:
    rng = Xoshiro256(4242)
    pieces = [
        "Hello,", "world!", "don't", "N°5", "price:", "5$", "a+b=c", "x", "...",
        "foo_bar", "(paren)", "semi;colon", "hy-phen", "slash/slash", "«quote»",
        "don’t", "mixÉD", "ÄRGER", "€99", "100%", "wait...", "e.g.", "tab",
        "ONE", "two", "Три", "ελλάδα", "中文", "１２３", "ＡＢＣ", "#tag", "@at",
        "[brack]", "{brace}", "a|b", "c\\d", "~tilde", "`tick`", "^caret",
    ]
    cases = []
    for _ in range(160):
        n = 1 + rng.below(6)
        text = " ".join(pieces[rng.below(len(pieces))] for _ in range(n))
        if rng.below(4) == 0:
            text = "  " + text.replace(" ", "   ", 1) + " "
        lowercase = rng.below(2) == 0
        keep = rng.below(2) == 0
        cases.append({"text": text, "lowercase": lowercase, "keep_punct": keep,
                      "tokens": tokenize_tercom(text, lowercase=lowercase, keep_punct=keep)})
    for text, lc, kp in [
        ("", True, True), ("   ", True, True), ("ABC", True, True),
        ("ABC", False, True), ("Hello, world!", True, True),
        ("Hello, world!", True, False), ("  a   b ", True, True),
        ("a\tb\nc", True, True), ("don’t stop", True, True),
        ("«Ärger»", True, True), ("１２３ＡＢＣ", True, True),
        ("a,b,,c", True, True), ("!!!", True, True), ("!!!", True, False),
        ("x-y_z", True, True), ("€5.50", True, True), ("中文，测试。", True, True),
        ("Straße", True, True), ("İstanbul", True, True), ("ҐЕРБ", True, True),
    ]:
        cases.append({"text": text, "lowercase": lc, "keep_punct": kp,
                      "tokens": tokenize_tercom(text, lowercase=lc, keep_punct=kp)})
    for _ in range(40):
        n = 1 + rng.below(8)
        text = " ".join(pieces[rng.below(len(pieces))] for _ in range(n))
        for lc in (True, False):
            cases.append({"text": text, "lowercase": lc, "keep_punct": True,
                          "tokens": tokenize_tercom(text, lowercase=lc, keep_punct=True)})
    assert len(cases) >= 200
    return cases


def ter_cases() -> list[dict]:
    rng = Xoshiro256(777)
    vocab = ["alpha", "beta", "Gamma", "delta,", "eps!", "zeta", "ETA", "theta"]
    cases: list[dict] = []

    def add(hyp: str, ref: str, lowercase: bool = True, keep_punct: bool = True) -> None:
        h = tokenize_tercom(hyp, lowercase=lowercase, keep_punct=keep_punct)
        r = tokenize_tercom(ref, lowercase=lowercase, keep_punct=keep_punct)
        if not r:
            return
        t = ter(h, r)
        cases.append({"hyp": hyp, "ref": ref, "lowercase": lowercase,
                      "keep_punct": keep_punct, "tuple": list(t.as_tuple()),
                      "score6": f"{t.score:.6f}"})

    add("a b c", "a b c")
    add("", "a b")
    add("c d a b", "a b c d")
    add("day good", "good day")
    add("d d a b", "b a d d")
    for _ in range(260):
        nh = rng.below(13)
        nr = 1 + rng.below(12)
        hyp = " ".join(vocab[rng.below(len(vocab))] for _ in range(nh))
        ref = " ".join(vocab[rng.below(len(vocab))] for _ in range(nr))
        add(hyp, ref, lowercase=rng.below(4) != 0, keep_punct=rng.below(4) != 0)
    return cases


def main() -> None:
    with (ROOT / "tokenizer_cases.json").open("w", encoding="utf-8") as fh:
        json.dump(tokenizer_cases(), fh, ensure_ascii=False, indent=1)
        fh.write("\n")
    with (ROOT / "ter_cases.json").open("w", encoding="utf-8") as fh:
        json.dump(ter_cases(), fh, ensure_ascii=False, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
