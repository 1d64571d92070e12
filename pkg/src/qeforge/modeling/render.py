"""Input rendering with optional domain tags.

The rendered template is "<s> SRC </s> TRG <Tag> </s>" in TAG mode and
"<s> SRC </s> TRG </s>" without tags, single spaces exactly.  Sample text is
screened for literal markup at ingestion, so the template stays injective
over (src, tgt, tag).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..corpus import DOMAIN_ID, DOMAIN_OOD
from ..errors import ValidationError


class TagMode(str, Enum):
    TAG = "TAG"
    NOTAG = "NOTAG"


@dataclass(frozen=True)
class SpecialTokens:
    bos: str = "<s>"
    sep: str = "</s>"
    domain_tags: tuple[str, ...] = ("<OOD>", "<ID>")

    def all(self) -> tuple[str, ...]:
        return (self.bos, self.sep) + self.domain_tags


SPECIAL_TOKENS = SpecialTokens()

_DOMAIN_TAG = {DOMAIN_ID: "<ID>", DOMAIN_OOD: "<OOD>"}


def domain_tag(domain: str) -> str:
    try:
        return _DOMAIN_TAG[domain]
    except KeyError:
        raise ValidationError(f"unknown domain {domain!r}") from None


def render_input(src: str, tgt: str, domain: str, mode: TagMode) -> str:
    if mode == TagMode.TAG:
        return f"<s> {src} </s> {tgt} {domain_tag(domain)} </s>"
    return f"<s> {src} </s> {tgt} </s>"


def render_sample(sample, mode: TagMode, domain_override: str | None = None) -> str:
    """Render a QESample, optionally forcing the tag domain (evaluation-time
    policy: target-domain and zero-shot test sets render as ID, the OOD test
    set as OOD)."""
    domain = domain_override if domain_override is not None else sample.domain
    return render_input(sample.src, sample.tgt, domain, mode)
