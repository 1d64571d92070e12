"""tercom-convention tokenization for TER and BLEU scoring.

Whitespace-normalize, Unicode-lowercase, and split punctuation into
standalone single-character tokens.  "Punctuation" here is every character
in the Unicode general categories P* and S*, so currency and math symbols
split the same way ASCII punctuation does.
"""

from __future__ import annotations

import unicodedata


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize_tercom(text: str, lowercase: bool = True, keep_punct: bool = True) -> list[str]:
    """Tokenize one sentence; empty or whitespace-only text yields []."""
    if lowercase:
        text = text.lower()
    tokens: list[str] = []
    for chunk in text.split():
        word: list[str] = []
        for ch in chunk:
            if _is_punct(ch):
                if word:
                    tokens.append("".join(word))
                    word = []
                if keep_punct:
                    tokens.append(ch)
            else:
                word.append(ch)
        if word:
            tokens.append("".join(word))
    return tokens
