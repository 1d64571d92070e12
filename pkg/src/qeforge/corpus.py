"""Loading, validation, splitting, subsampling, and concatenation of QE data.

Datasets are plain lists of frozen samples.  Every operation here is pure:
nothing mutates its inputs, and anything involving randomness is a function of
an explicit seed (see prng for the algorithm contract).
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TypeVar

from .errors import ValidationError
from .prng import permutation, selection

logger = logging.getLogger(__name__)

DOMAIN_ID = "ID"
DOMAIN_OOD = "OOD"
DOMAINS = (DOMAIN_ID, DOMAIN_OOD)

ORIGIN_AUTHENTIC = "authentic"
ORIGIN_SYNTHETIC = "synthetic"
ORIGINS = (ORIGIN_AUTHENTIC, ORIGIN_SYNTHETIC)

# Literal template markup may never appear inside sample text: the rendered
# input "<s> SRC </s> TRG <Tag> </s>" must stay parseable.
RESERVED_MARKUP = ("<s>", "</s>", "<ID>", "<OOD>")

# Labels above this are assumed to be percentages (tercom-style output);
# genuine TER fractions essentially never exceed it.
_PERCENT_DETECT_THRESHOLD = 5.0


def parse_lang_pair(text: str) -> tuple[str, str]:
    """Parse "en-de" into the ordered ("en", "de") pair."""
    parts = text.lower().split("-")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise ValidationError(f"invalid language pair {text!r}, expected like 'en-de'")
    return (parts[0], parts[1])


def format_lang_pair(pair: tuple[str, str]) -> str:
    return f"{pair[0]}-{pair[1]}"


def _check_markup(text: str, what: str) -> None:
    for token in RESERVED_MARKUP:
        if token in text:
            raise ValidationError(
                f"{what} contains reserved template markup {token!r}; "
                "such samples cannot be rendered unambiguously"
            )


@dataclass(frozen=True)
class QESample:
    """One (source, target, quality label) triplet with its metadata.

    The label is a dimensionless TER/HTER-style fraction >= 0.  A synthetic
    sample may carry an empty target (an MT system can emit nothing; the label
    is still well defined against the reference), authentic samples may not.
    """

    src: str
    tgt: str
    label: float
    lang_pair: tuple[str, str]
    domain: str
    origin: str = ORIGIN_AUTHENTIC

    def __post_init__(self) -> None:
        if self.domain not in DOMAINS:
            raise ValidationError(f"domain must be one of {DOMAINS}, got {self.domain!r}")
        if self.origin not in ORIGINS:
            raise ValidationError(f"origin must be one of {ORIGINS}, got {self.origin!r}")
        if not (self.label >= 0):
            raise ValidationError(f"negative label {self.label}")
        if not self.src.strip():
            raise ValidationError("empty source text")
        if not self.tgt.strip() and self.origin != ORIGIN_SYNTHETIC:
            raise ValidationError("empty target text")
        if not (self.lang_pair[0] and self.lang_pair[1]):
            raise ValidationError(f"empty language code in {self.lang_pair}")
        _check_markup(self.src, "source")
        _check_markup(self.tgt, "target")


@dataclass(frozen=True)
class ParallelSample:
    """An aligned (source, reference) sentence pair."""

    src: str
    ref: str
    lang_pair: tuple[str, str]

    def __post_init__(self) -> None:
        if not self.src.strip():
            raise ValidationError("empty source text")
        if not self.ref.strip():
            raise ValidationError("empty reference text")
        _check_markup(self.src, "source")
        _check_markup(self.ref, "reference")


@dataclass(frozen=True)
class SplitSpec:
    """Train/dev/test ratios plus the seed that fixes the permutation."""

    ratios: tuple[float, float, float]
    seed: int
    shuffle: bool = True

    def __post_init__(self) -> None:
        if len(self.ratios) != 3:
            raise ValidationError("ratios must be a (train, dev, test) triple")
        for r in self.ratios:
            if not 0.0 <= r <= 1.0:
                raise ValidationError(f"ratio {r} outside [0, 1]")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValidationError(f"ratios sum to {sum(self.ratios)}, expected 1.0")


S = TypeVar("S", QESample, ParallelSample)


@dataclass(frozen=True)
class DataSplit:
    train: list
    dev: list
    test: list

    def sizes(self) -> tuple[int, int, int]:
        return (len(self.train), len(self.dev), len(self.test))


def load_qe_tsv(
    path: str | Path,
    lang_pair: tuple[str, str],
    domain: str,
    origin: str = ORIGIN_AUTHENTIC,
    label_scale: str = "auto",
) -> list[QESample]:
    """Load a src<TAB>tgt<TAB>label file; extra columns are ignored.

    label_scale: "auto" rescales the whole file by 1/100 when any label
    exceeds 5 (percentage-style files); "fraction" and "percent" force the
    interpretation either way.
    """
    path = Path(path)
    if label_scale not in ("auto", "fraction", "percent"):
        raise ValidationError(f"unknown label_scale {label_scale!r}")
    rows: list[tuple[int, str, str, float]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            fields = line.split("\t")
            if len(fields) < 3:
                raise ValidationError(
                    f"{path}: malformed row at line {lineno}: "
                    f"expected >= 3 tab-separated fields, got {len(fields)}"
                )
            src, tgt, raw_label = fields[0], fields[1], fields[2]
            try:
                label = float(raw_label)
            except ValueError:
                raise ValidationError(
                    f"{path}: non-numeric label {raw_label!r} at line {lineno}"
                ) from None
            if math.isnan(label) or math.isinf(label):
                raise ValidationError(f"{path}: non-finite label at line {lineno}")
            if label < 0:
                raise ValidationError(f"{path}: negative label at line {lineno}")
            rows.append((lineno, src, tgt, label))

    scale = 1.0
    if label_scale == "percent":
        scale = 0.01
    elif label_scale == "auto" and any(label > _PERCENT_DETECT_THRESHOLD for _, _, _, label in rows):
        scale = 0.01
        logger.info(
            "%s: labels look percentage-scaled (max %.3f); dividing by 100 "
            "(pass label_scale='fraction' to override)",
            path,
            max(label for _, _, _, label in rows),
        )

    samples = []
    for lineno, src, tgt, label in rows:
        try:
            samples.append(
                QESample(src=src, tgt=tgt, label=label * scale,
                         lang_pair=lang_pair, domain=domain, origin=origin)
            )
        except ValidationError as exc:
            raise ValidationError(f"{path}: line {lineno}: {exc}") from None
    return samples


def write_qe_tsv(samples: Sequence[QESample], path: str | Path) -> None:
    """Write samples in the triplet file format (canonical float labels)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(f"{s.src}\t{s.tgt}\t{s.label!r}\n")


def load_parallel(
    src_path: str | Path, ref_path: str | Path, lang_pair: tuple[str, str]
) -> list[ParallelSample]:
    """Zip two aligned plain-text files into parallel samples."""
    src_lines = Path(src_path).read_text(encoding="utf-8").splitlines()
    ref_lines = Path(ref_path).read_text(encoding="utf-8").splitlines()
    if len(src_lines) != len(ref_lines):
        raise ValidationError(
            f"line count mismatch {len(src_lines)} vs {len(ref_lines)} "
            f"({src_path} / {ref_path})"
        )
    samples = []
    for lineno, (src, ref) in enumerate(zip(src_lines, ref_lines), start=1):
        try:
            samples.append(ParallelSample(src=src, ref=ref, lang_pair=lang_pair))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    return samples


def _split_order(n: int, spec: SplitSpec) -> list[int]:
    return permutation(n, spec.seed) if spec.shuffle else list(range(n))


def split(dataset: Sequence[S], spec: SplitSpec) -> DataSplit:
    """Partition into train/dev/test.

    Sizes follow the floor rule: dev and test get floor(n * ratio) and train
    keeps the remainder, so train is never starved by rounding.  The shuffled
    order is Fisher-Yates under spec.seed; assignment is train, then dev,
    then test along that order.
    """
    n = len(dataset)
    if n == 0:
        raise ValidationError("cannot split an empty dataset")
    r_train, r_dev, r_test = spec.ratios
    n_dev = math.floor(n * r_dev)
    n_test = math.floor(n * r_test)
    n_train = n - n_dev - n_test
    for part, count, ratio in (("train", n_train, r_train), ("dev", n_dev, r_dev), ("test", n_test, r_test)):
        if ratio > 0 and count == 0:
            raise ValidationError(
                f"dataset of {n} samples too small: {part} ratio {ratio} yields 0 samples"
            )
    order = _split_order(n, spec)
    train = [dataset[i] for i in order[:n_train]]
    dev = [dataset[i] for i in order[n_train:n_train + n_dev]]
    test = [dataset[i] for i in order[n_train + n_dev:]]
    return DataSplit(train=train, dev=dev, test=test)


def split_by_counts(dataset: Sequence[S], n_dev: int, n_test: int, seed: int, shuffle: bool = True) -> DataSplit:
    """Split with explicit dev/test counts instead of ratios."""
    n = len(dataset)
    if n_dev < 0 or n_test < 0 or n_dev + n_test >= n:
        raise ValidationError(
            f"cannot carve dev={n_dev}, test={n_test} out of {n} samples"
        )
    order = permutation(n, seed) if shuffle else list(range(n))
    n_train = n - n_dev - n_test
    return DataSplit(
        train=[dataset[i] for i in order[:n_train]],
        dev=[dataset[i] for i in order[n_train:n_train + n_dev]],
        test=[dataset[i] for i in order[n_train + n_dev:]],
    )


def subsample(dataset: Sequence[S], n: int, seed: int) -> list[S]:
    """n distinct samples, original relative order preserved."""
    if not 0 <= n <= len(dataset):
        raise ValidationError(f"cannot subsample {n} from {len(dataset)} samples")
    return [dataset[i] for i in selection(len(dataset), n, seed)]


def concat(datasets: Iterable[Sequence[QESample]]) -> list[QESample]:
    """Concatenate QE datasets, preserving order and per-sample metadata."""
    out: list[QESample] = []
    for ds in datasets:
        out.extend(ds)
    return out


def content_hash(samples: Sequence[QESample | ParallelSample]) -> str:
    """sha256 over the canonical line encoding of the dataset."""
    h = hashlib.sha256()
    for s in samples:
        if isinstance(s, QESample):
            line = f"{s.src}\t{s.tgt}\t{s.label!r}\t{format_lang_pair(s.lang_pair)}\t{s.domain}\t{s.origin}"
        else:
            line = f"{s.src}\t{s.ref}\t{format_lang_pair(s.lang_pair)}"
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def dataset_manifest(
    samples: Sequence[QESample],
    paths: Sequence[str] = (),
    extra: dict | None = None,
) -> dict:
    """Structured description of a QE dataset (counts, metadata, content hash)."""
    lang_pairs = sorted({format_lang_pair(s.lang_pair) for s in samples})
    domains = sorted({s.domain for s in samples})
    origins = sorted({s.origin for s in samples})
    manifest = {
        "paths": list(paths),
        "lang_pairs": lang_pairs,
        "domains": domains,
        "origins": origins,
        "count": len(samples),
        "content_sha256": content_hash(samples),
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(manifest: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
