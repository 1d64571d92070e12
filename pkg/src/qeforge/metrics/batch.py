"""Batch TER scoring over the shared pair-file contract.

Input: one hyp<TAB>ref pair per line.  Output: one line per input with the
integer edit breakdown and the 6-decimal score,
ins<TAB>del<TAB>sub<TAB>shft<TAB>ref_len<TAB>score.  The native scorer
produces byte-identical integer tuples for the same input; this reference
implementation is single-threaded (throughput is the native scorer's job).
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path

from ..errors import ValidationError
from .ter import TERScore, ter
from .tokenizer import tokenize_tercom


@dataclass(frozen=True)
class BatchSummary:
    pairs: int
    total_edits: int
    total_ref_len: int
    seconds: float

    @property
    def corpus_ter(self) -> float:
        return self.total_edits / self.total_ref_len if self.total_ref_len else 0.0


def format_score_line(score: TERScore) -> str:
    return (f"{score.insertions}\t{score.deletions}\t{score.substitutions}\t"
            f"{score.shifts}\t{score.ref_len}\t{score.score:.6f}")


def score_pair_line(line: str, lineno: int, lowercase: bool = True,
                    keep_punct: bool = True) -> TERScore:
    fields = line.split("\t")
    if len(fields) != 2:
        raise ValidationError(
            f"malformed line {lineno}: expected hyp<TAB>ref, got {len(fields)} fields"
        )
    hyp = tokenize_tercom(fields[0], lowercase=lowercase, keep_punct=keep_punct)
    ref = tokenize_tercom(fields[1], lowercase=lowercase, keep_punct=keep_punct)
    if not ref:
        raise ValidationError(f"malformed line {lineno}: reference tokenizes to nothing")
    return ter(hyp, ref)


def score_pairs_file(
    input_path: str | Path,
    output_path: str | Path,
    lowercase: bool = True,
    keep_punct: bool = True,
) -> BatchSummary:
    """Score every pair in input_path, writing the output atomically.

    On any error the partially written output is removed; the destination
    either ends up complete or untouched.
    """
    input_path = Path(input_path)
    output_path = Path(output_path)
    tmp_path = output_path.with_name(output_path.name + ".tmp")
    start = time.perf_counter()
    pairs = 0
    total_edits = 0
    total_ref = 0
    try:
        with input_path.open("r", encoding="utf-8") as fin, \
                tmp_path.open("w", encoding="utf-8") as fout:
            for lineno, raw in enumerate(fin, start=1):
                score = score_pair_line(raw.rstrip("\n"), lineno,
                                        lowercase=lowercase, keep_punct=keep_punct)
                fout.write(format_score_line(score) + "\n")
                pairs += 1
                total_edits += score.num_edits
                total_ref += score.ref_len
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise
    os.replace(tmp_path, output_path)
    return BatchSummary(pairs=pairs, total_edits=total_edits, total_ref_len=total_ref,
                        seconds=time.perf_counter() - start)
