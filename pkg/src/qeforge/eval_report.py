"""Model scoring and report tables.

Prediction dumps (one file per model x test set; tab-separated sample id,
gold, prediction) are the canonical interface between evaluation and
reporting: every table is a pure function of dump contents or of explicitly
supplied score cells, so regenerating a report twice yields identical bytes.

Scores print with 2 decimals (round-half-even).  Derived cells (deltas,
averages, Increase %) are recomputable from the base cells within +/-0.015,
which absorbs the round-vs-truncate ambiguity of 2-decimal published tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import QESample, format_lang_pair
from .errors import ValidationError
from .metrics import increase_pct, pearson, significance_grid
from .modeling import QEModel, TagMode, render_sample

# column order of the four pipeline variants in every table
VARIANT_COLUMNS = ("NO TAG DAG 1", "NO TAG DAG 2", "TAG DAG 1", "TAG DAG 2")


# -- evaluation and dumps -----------------------------------------------------


def evaluate(
    model: QEModel,
    test_ds: Sequence[QESample],
    tag_mode: TagMode = TagMode.NOTAG,
    tag_domain: str | None = None,
    model_id: str = "model",
) -> float:
    """Rescaled Pearson of model predictions against the gold labels.

    tag_domain forces the rendered tag at evaluation time (target-domain and
    zero-shot test sets render as ID, the out-of-domain test set as OOD).
    """
    if not test_ds:
        raise ValidationError("empty test set")
    rendered = [render_sample(s, tag_mode, domain_override=tag_domain) for s in test_ds]
    preds = model.forward(rendered)
    golds = [s.label for s in test_ds]
    try:
        return pearson(preds.tolist(), golds).rescaled
    except ValidationError as exc:
        raise ValidationError(f"{model_id}: {exc}") from None


def write_prediction_dump(path: str | Path, golds: Sequence[float],
                          preds: Sequence[float]) -> None:
    if len(golds) != len(preds):
        raise ValidationError("gold/prediction length mismatch")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for i, (g, p) in enumerate(zip(golds, preds)):
            fh.write(f"{i}\t{g:.6f}\t{p:.9f}\n")


def read_prediction_dump(path: str | Path) -> tuple[list[float], list[float]]:
    golds: list[float] = []
    preds: list[float] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValidationError(f"{path}: malformed dump line {lineno}")
        golds.append(float(fields[1]))
        preds.append(float(fields[2]))
    return golds, preds


def evaluate_to_dump(
    model: QEModel,
    test_ds: Sequence[QESample],
    path: str | Path,
    tag_mode: TagMode = TagMode.NOTAG,
    tag_domain: str | None = None,
    model_id: str = "model",
) -> float:
    """Write the prediction dump and return the score recomputed from it,
    keeping the dump authoritative."""
    if not test_ds:
        raise ValidationError("empty test set")
    rendered = [render_sample(s, tag_mode, domain_override=tag_domain) for s in test_ds]
    preds = model.forward(rendered)
    write_prediction_dump(path, [s.label for s in test_ds], preds.tolist())
    return score_from_dump(path, model_id=model_id)


def score_from_dump(path: str | Path, model_id: str = "model") -> float:
    golds, preds = read_prediction_dump(path)
    try:
        return pearson(preds, golds).rescaled
    except ValidationError as exc:
        raise ValidationError(f"{model_id}: {exc}") from None


# -- report container ---------------------------------------------------------


def fmt2(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


@dataclass
class EvalReport:
    name: str
    columns: list[str]
    rows: list[tuple[str, dict]]  # (row label, column -> value)
    notes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        header = ["", *self.columns]
        table = [header]
        for label, cells in self.rows:
            table.append([label] + [
                cells.get(c, "") if isinstance(cells.get(c, ""), str) else fmt2(cells.get(c))
                for c in self.columns
            ])
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = [f"# {self.name}"]
        for row in table:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "columns": self.columns,
            "rows": [{"label": label, "cells": cells} for label, cells in self.rows],
            "notes": self.notes,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- tables -------------------------------------------------------------------


def main_results_table(scores: Mapping[str, Mapping[str, float | None]]) -> EvalReport:
    """Main results: one row per language pair with the baseline, the four
    pipeline variants, the best variant marked, and Increase % of the best
    over the baseline (computed over the cells that are present)."""
    columns = ["Baseline", *VARIANT_COLUMNS, "Best", "Increase %"]
    rows = []
    for pair, cells in scores.items():
        baseline = cells.get("Baseline")
        present = {c: cells[c] for c in VARIANT_COLUMNS
                   if cells.get(c) is not None}
        row: dict = {c: cells.get(c) for c in ("Baseline", *VARIANT_COLUMNS)}
        if baseline is not None and present:
            best_col = max(present, key=lambda c: present[c])
            row["Best"] = best_col
            row["Increase %"] = increase_pct(present[best_col], baseline)
        else:
            row["Best"] = ""
            row["Increase %"] = None
        rows.append((pair, row))
    return EvalReport(name="main results", columns=columns, rows=rows)


def crosslingual_matrix(
    model_scores: Mapping[str, Mapping[str, float]],
    baseline_scores: Mapping[str, Mapping[str, float]],
    test_sets: Sequence[str],
    extra_rows: Mapping[str, Mapping[str, float]] | None = None,
) -> EvalReport:
    """Cross-lingual inference: per language-pair model, its baseline row,
    its own row, and the delta row, each with an AVG column; extra rows
    (step-1/step-2/untrained models) follow."""
    columns = [*test_sets, "AVG"]
    rows: list[tuple[str, dict]] = []

    def avg(cells: Mapping[str, float]) -> float:
        vals = [cells[t] for t in test_sets if cells.get(t) is not None]
        return sum(vals) / len(vals) if vals else math.nan

    for pair in model_scores:
        if pair not in baseline_scores:
            raise ValidationError(f"missing baseline scores for {pair}")
        base = baseline_scores[pair]
        mine = model_scores[pair]
        delta = {t: mine[t] - base[t] for t in test_sets}
        rows.append((f"Baseline ({pair})", {**{t: base.get(t) for t in test_sets}, "AVG": avg(base)}))
        rows.append((pair, {**{t: mine.get(t) for t in test_sets}, "AVG": avg(mine)}))
        rows.append((f"Δ ({pair})", {**delta, "AVG": avg(delta)}))
    for name, cells in (extra_rows or {}).items():
        rows.append((name, {**{t: cells.get(t) for t in test_sets}, "AVG": avg(cells)}))
    return EvalReport(name="cross-lingual matrix", columns=columns, rows=rows)


def zeroshot_table(
    scores: Mapping[tuple[str, str], Mapping[str, float | None]],
    trained_pairs: Mapping[str, set[tuple[str, str]]],
    test_set_pairs: Mapping[str, tuple[str, str]],
) -> EvalReport:
    """Zero-shot rows keyed by (training pair, test set).  Every test set's
    language pair must be absent from the corresponding model's training
    manifest."""
    for (trained_on, test_set) in scores:
        test_pair = test_set_pairs.get(test_set)
        if test_pair is None:
            raise ValidationError(f"unknown zero-shot test set {test_set!r}")
        used = trained_pairs.get(trained_on, set())
        if test_pair in used:
            raise ValidationError(
                f"not zero-shot: test set {test_set} ({format_lang_pair(test_pair)}) "
                f"appears in the training data of {trained_on}"
            )
    columns = ["Baseline", *VARIANT_COLUMNS]
    rows = []
    for (trained_on, test_set), cells in scores.items():
        rows.append((f"{trained_on} -> {test_set}", {c: cells.get(c) for c in columns}))
    return EvalReport(name="zero-shot", columns=columns, rows=rows)


def ood_table(
    pipeline_scores: Mapping[str, float],
    baseline_scores: Mapping[str, float],
    ood_model_scores: Mapping[str, float],
    reference: str = "OOD",
) -> EvalReport:
    """Generalization on the out-of-domain test set: per language pair the
    pipeline score, its delta to the baseline, and its delta to the model
    trained solely out-of-domain."""
    if reference not in ood_model_scores:
        raise ValidationError(f"missing reference OOD model {reference!r}")
    pairs = list(pipeline_scores)
    columns = [*pairs, *ood_model_scores.keys()]
    ref_score = ood_model_scores[reference]
    baseline_row: dict = {p: baseline_scores.get(p) for p in pairs}
    pipeline_row: dict = {p: pipeline_scores[p] for p in pairs}
    delta_base = {}
    delta_ood = {}
    for p in pairs:
        if baseline_scores.get(p) is None:
            raise ValidationError(f"missing baseline OOD score for {p}")
        delta_base[p] = pipeline_scores[p] - baseline_scores[p]
        delta_ood[p] = pipeline_scores[p] - ref_score
    for name, score in ood_model_scores.items():
        baseline_row[name] = score
    rows = [
        ("Baseline", baseline_row),
        ("Our pipeline", pipeline_row),
        ("Δ_Baseline", delta_base),
        ("Δ_OOD", delta_ood),
    ]
    return EvalReport(name="out-of-domain performance", columns=columns, rows=rows)


def significance_report(
    per_pair: Mapping[str, tuple[Sequence[float], Mapping[str, Sequence[float]]]],
    alpha: float = 0.05,
    method: str = "williams",
) -> EvalReport:
    """Pairwise significance grid per language pair: rows are baseline + all
    systems except the last, columns all systems except the baseline, upper
    triangle populated with Y/N."""
    rows: list[tuple[str, dict]] = []
    columns: list[str] = []
    for pair, (gold, systems) in per_pair.items():
        grid = significance_grid(gold, systems, alpha=alpha, method=method)
        labels = list(grid.labels)
        cols = labels[1:]
        for c in cols:
            if c not in columns:
                columns.append(c)
        for i, row_label in enumerate(labels[:-1]):
            cells: dict = {}
            for col in cols:
                mark = grid.cell(row_label, col)
                cells[col] = mark if mark is not None else "-"
            rows.append((f"{pair}: {row_label}", cells))
    return EvalReport(name="significance (p < %s)" % alpha, columns=columns, rows=rows)


def timing_report(seconds: Mapping[str, float]) -> EvalReport:
    rows = []
    for name in seconds:
        rows.append((name, {"seconds": f"{seconds[name]:.1f}",
                            "hours": f"{seconds[name] / 3600.0:.4f}"}))
    return EvalReport(name="training time", columns=["seconds", "hours"], rows=rows)
