"""Reference metric implementations: tercom tokenization, TER, BLEU,
Pearson with the x100 reporting scale, and significance testing."""

from .batch import BatchSummary, format_score_line, score_pair_line, score_pairs_file
from .bleu import BleuScore, bleu
from .correlation import (
    PearsonResult,
    SignificanceGrid,
    bootstrap_test,
    increase_pct,
    pearson,
    significance_grid,
    student_t_two_tailed,
    williams_test,
)
from .ter import (
    MAX_SHIFT_DIST,
    MAX_SHIFT_SIZE,
    TERScore,
    levenshtein_breakdown,
    levenshtein_total,
    ter,
    ter_sentence,
)
from .tokenizer import tokenize_tercom

__all__ = [
    "BatchSummary",
    "BleuScore",
    "MAX_SHIFT_DIST",
    "MAX_SHIFT_SIZE",
    "PearsonResult",
    "SignificanceGrid",
    "TERScore",
    "bleu",
    "bootstrap_test",
    "format_score_line",
    "increase_pct",
    "levenshtein_breakdown",
    "levenshtein_total",
    "pearson",
    "score_pair_line",
    "score_pairs_file",
    "significance_grid",
    "student_t_two_tailed",
    "ter",
    "ter_sentence",
    "tokenize_tercom",
    "williams_test",
]
