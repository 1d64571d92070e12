"""Data augmentation: multilingual concatenation of authentic in-domain data,
synthetic in-domain generation through a trained translator with TER pseudo
labels, and the oversampled mixed-corpus composition for the middle training
step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

from .corpus import (
    DOMAIN_ID,
    ORIGIN_SYNTHETIC,
    ParallelSample,
    QESample,
    concat,
    format_lang_pair,
    split_by_counts,
    subsample,
)
from .errors import ValidationError
from .metrics import bleu, ter_sentence
from .modeling.seq2seq import Seq2SeqConfig, ToySeq2Seq, toy_seq2seq
from .prng import derive_seed, permutation

logger = logging.getLogger(__name__)


class Approach(str, Enum):
    DAG1 = "DAG1"  # concatenate all authentic in-domain data
    DAG2 = "DAG2"  # DAG1 plus synthetic in-domain data


class Translator(Protocol):
    def translate(self, texts: list[str]) -> list[str]: ...


@dataclass(frozen=True)
class SynthesisPlan:
    """Parameters of the synthetic-data recipe for one language pair."""

    lang_pair: tuple[str, str]
    n: int            # parallel samples drawn before halving
    seed: int
    portion: int      # how many second-half sources get translated
    metric: str = "TER"

    def __post_init__(self) -> None:
        if self.n <= 0 or self.n % 2 != 0:
            raise ValidationError(f"n must be even and positive, got {self.n}")
        if not 0 < self.portion <= self.n // 2:
            raise ValidationError(
                f"portion must be in (0, n/2] = (0, {self.n // 2}], got {self.portion}"
            )
        if self.metric != "TER":
            raise ValidationError(f"unsupported pseudo-label metric {self.metric!r}")


@dataclass(frozen=True)
class SynthesisHalves:
    s1: list[ParallelSample]  # translator training half
    s2: list[ParallelSample]  # translation/labeling half


@dataclass(frozen=True)
class SyntheticDataset:
    samples: list[QESample]
    hypotheses: list[str]
    plan: SynthesisPlan


@dataclass(frozen=True)
class MTConfig:
    seed: int = 8
    batch_size: int = 8
    eval_interval: int = 50
    patience: int = 5
    max_updates: int = 2000
    lr: float | None = None
    hidden_width: int = 24


def dag1_concat(id_train_sets: Sequence[Sequence[QESample]]) -> list[QESample]:
    """Concatenate authentic in-domain training sets across language pairs."""
    if not id_train_sets:
        raise ValidationError("need at least one in-domain dataset")
    for k, ds in enumerate(id_train_sets):
        for s in ds:
            if s.domain != DOMAIN_ID:
                raise ValidationError(
                    f"dataset {k} contains a {s.domain} sample; "
                    "only in-domain data may be concatenated here"
                )
    return concat(id_train_sets)


def make_halves(parallel: Sequence[ParallelSample], plan: SynthesisPlan) -> SynthesisHalves:
    """Draw plan.n samples and split them into two equal disjoint halves."""
    if len(parallel) < plan.n:
        raise ValidationError(
            f"insufficient parallel data: need {plan.n}, have {len(parallel)}"
        )
    chosen = subsample(parallel, plan.n, plan.seed)
    half = plan.n // 2
    return SynthesisHalves(s1=chosen[:half], s2=chosen[half:])


def train_translator(
    s1: Sequence[ParallelSample],
    mt_config: MTConfig,
    backend: ToySeq2Seq | None = None,
) -> ToySeq2Seq:
    """Train the desk-scale translator on the first half.

    A dev split is carved from s1 (7k a side at full scale, 1% at desk scale)
    and training stops early when the evaluation loss has not improved for
    mt_config.patience evaluations.  The returned translator carries its
    evaluation history and dev BLEU in .train_history / .dev_bleu.
    """
    if not s1:
        raise ValidationError("cannot train a translator on an empty corpus")
    n = len(s1)
    side = 7000 if n >= 70_000 else max(1, n // 100)
    parts = split_by_counts(s1, n_dev=side, n_test=side, seed=mt_config.seed)
    train_pairs = [(p.src, p.ref) for p in parts.train]
    dev_pairs = [(p.src, p.ref) for p in parts.dev]

    model = backend or toy_seq2seq(
        seed=mt_config.seed, config=Seq2SeqConfig(hidden_width=mt_config.hidden_width)
    )
    model.fit_vocabulary([t for pair in train_pairs + dev_pairs for t in pair])
    if mt_config.lr is not None:
        model.config.lr = mt_config.lr

    losses: list[float] = []
    best_loss = float("inf")
    best_snap = model.snapshot()
    updates = 0
    epoch = 0
    stop = False
    while not stop and updates < mt_config.max_updates:
        order = permutation(len(train_pairs), derive_seed(mt_config.seed, f"mt-epoch-{epoch}"))
        epoch += 1
        for start in range(0, len(order), mt_config.batch_size):
            batch = [train_pairs[i] for i in order[start:start + mt_config.batch_size]]
            _, grads = model.step_loss_and_grads(batch)
            model.apply_sgd(grads)
            updates += 1
            if updates % mt_config.eval_interval == 0:
                dev_loss = model.eval_loss(dev_pairs)
                losses.append(dev_loss)
                if dev_loss < best_loss - 1e-9:
                    best_loss = dev_loss
                    best_snap = model.snapshot()
                from .trainer import should_stop  # local import avoids a cycle
                if should_stop(losses, mt_config.patience) or updates >= mt_config.max_updates:
                    stop = True
                    break
    model.restore(best_snap)
    dev_hyps = model.translate([s for s, _ in dev_pairs])
    model.dev_bleu = bleu(dev_hyps, [r for _, r in dev_pairs]).score if dev_pairs else 0.0
    model.train_history = losses
    logger.info("translator trained: %d updates, dev loss %.4f, dev BLEU %.2f",
                updates, best_loss, model.dev_bleu)
    return model


def generate_synthetic(
    translator: Translator,
    s2: Sequence[ParallelSample],
    plan: SynthesisPlan,
) -> SyntheticDataset:
    """Translate a portion of the second half and pseudo-label with exact TER.

    The output triplet per sample is (source, hypothesis, TER(hypothesis,
    reference)); origin is marked synthetic and domain in-domain.
    """
    if plan.portion > len(s2):
        raise ValidationError(
            f"portion {plan.portion} exceeds second-half size {len(s2)}"
        )
    chosen = subsample(s2, plan.portion, derive_seed(plan.seed, "synthesis-portion"))
    sources = [p.src for p in chosen]
    hypotheses = translator.translate(sources)
    if len(hypotheses) != len(sources):
        raise ValidationError(
            f"translator returned {len(hypotheses)} outputs for {len(sources)} inputs"
        )
    samples = []
    for pair, hyp in zip(chosen, hypotheses):
        label = ter_sentence(hyp, pair.ref).score
        samples.append(
            QESample(src=pair.src, tgt=hyp, label=label, lang_pair=plan.lang_pair,
                     domain=DOMAIN_ID, origin=ORIGIN_SYNTHETIC)
        )
    return SyntheticDataset(samples=samples, hypotheses=hypotheses, plan=plan)


def compose_step2_corpus(
    ood_train: Sequence[QESample],
    id_sets: Sequence[Sequence[QESample]],
    synthetic_sets: Sequence[Sequence[QESample]] | None,
    approach: Approach,
    ood_ratio: float,
    seed: int,
) -> list[QESample]:
    """Mix the in-domain part with an oversampled out-of-domain subset.

    The in-domain part is the multilingual concatenation (plus every
    synthetic set under DAG2); the out-of-domain part is a seeded subsample
    of size round(ood_ratio * |ID part|); the union is shuffled.
    """
    if not ood_train:
        raise ValidationError("empty out-of-domain training data")
    if ood_ratio <= 0:
        raise ValidationError(f"ood_ratio must be positive, got {ood_ratio}")
    approach = Approach(approach)
    id_part = dag1_concat(id_sets)
    if approach == Approach.DAG2:
        id_pairs = {s.lang_pair for ds in id_sets for s in ds}
        synthetic_sets = synthetic_sets or []
        synth_pairs = {s.lang_pair for ds in synthetic_sets for s in ds}
        missing = sorted(format_lang_pair(p) for p in id_pairs - synth_pairs)
        if missing:
            raise ValidationError(f"missing synthetic set for language pair(s): {missing}")
        id_part = id_part + concat(synthetic_sets)
    n_ood = round(ood_ratio * len(id_part))
    if n_ood > len(ood_train):
        raise ValidationError(
            f"insufficient out-of-domain data: need {n_ood}, have {len(ood_train)}"
        )
    ood_part = subsample(ood_train, n_ood, derive_seed(seed, "step2-ood"))
    union = id_part + ood_part
    order = permutation(len(union), derive_seed(seed, "step2-shuffle"))
    return [union[i] for i in order]
