"""Training orchestration: early stopping, per-step training with evaluation
intervals, checkpoint lineage, and the three-step domain-adaptation pipeline
(out-of-domain convergence, mixed fine-tuning, in-domain fine-tuning).
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .augment import Approach, compose_step2_corpus
from .corpus import QESample, content_hash, format_lang_pair, subsample
from .errors import ValidationError
from .metrics import pearson
from .modeling import QEModel, TagMode, load_model, render_sample, save_model
from .modeling.registry import build_qe_model
from .prng import derive_seed, permutation

logger = logging.getLogger(__name__)

BASELINE_STEP = "baseline"

# improvement must beat the best loss by more than this to reset patience
IMPROVEMENT_TOLERANCE = 1e-9

DEFAULT_EVAL_INTERVALS = {1: 1000, 2: 500, 3: 500, BASELINE_STEP: 500}


@dataclass(frozen=True)
class StepConfig:
    """Per-step training contract."""

    step_id: int | str
    eval_interval: int
    patience: int = 5
    max_updates: int = 10_000
    batch_size: int = 16
    tag_mode: TagMode = TagMode.NOTAG
    seed: int = 8
    lr: float | None = None  # None -> backend default
    weight_decay: float = 0.0

    def __post_init__(self) -> None:
        if self.step_id not in (1, 2, 3, BASELINE_STEP):
            raise ValidationError(f"invalid step_id {self.step_id!r}")
        if self.eval_interval < 1:
            raise ValidationError(f"eval_interval must be >= 1, got {self.eval_interval}")
        if self.patience < 1:
            raise ValidationError(f"patience must be >= 1, got {self.patience}")
        if self.max_updates < 1:
            raise ValidationError(f"max_updates must be >= 1, got {self.max_updates}")


def default_step_config(step_id: int | str, **overrides) -> StepConfig:
    kwargs = {"step_id": step_id, "eval_interval": DEFAULT_EVAL_INTERVALS[step_id]}
    kwargs.update(overrides)
    return StepConfig(**kwargs)


@dataclass(frozen=True)
class EvalRecord:
    update_count: int
    dev_loss: float
    dev_pearson: float | None  # rescaled; None when undefined
    timestamp: float


@dataclass
class Checkpoint:
    model: QEModel
    manifest: dict

    @property
    def checkpoint_id(self) -> str:
        return self.manifest["checkpoint_id"]


def should_stop(eval_losses: Sequence[float], patience: int) -> bool:
    """True once `patience` evaluations have passed without a strict
    improvement (tolerance 1e-9) over the running best; plateaus count."""
    if patience < 1:
        raise ValidationError(f"patience must be >= 1, got {patience}")
    best = float("inf")
    best_idx = -1
    for i, loss in enumerate(eval_losses):
        if loss < best - IMPROVEMENT_TOLERANCE:
            best = loss
            best_idx = i
    return len(eval_losses) - 1 - best_idx >= patience if eval_losses else False


def _params_fingerprint(model: QEModel) -> str:
    h = hashlib.sha256()
    for name in sorted(model.parameters()):
        h.update(name.encode())
        h.update(np.ascontiguousarray(model.parameters()[name]).tobytes())
    return h.hexdigest()


def _make_manifest(
    model: QEModel,
    cfg: StepConfig,
    parent_id: str | None,
    data_fp: str,
    train_lang_pairs: list[str],
    history: list[EvalRecord],
    wall_clock: float,
) -> dict:
    params_fp = _params_fingerprint(model)
    core = {
        "step_id": cfg.step_id,
        "parent_checkpoint_id": parent_id,
        "seed": cfg.seed,
        "data_fingerprint": data_fp,
        "params_sha256": params_fp,
    }
    checkpoint_id = hashlib.sha256(
        json.dumps(core, sort_keys=True).encode()
    ).hexdigest()[:16]
    return {
        "checkpoint_id": checkpoint_id,
        **core,
        "tag_mode": cfg.tag_mode.value,
        "train_lang_pairs": train_lang_pairs,
        "eval_history": [
            {"update_count": r.update_count, "dev_loss": r.dev_loss,
             "dev_pearson": r.dev_pearson}
            for r in history
        ],
        "wall_clock_seconds": wall_clock,
    }


def _render_all(samples: Sequence[QESample], mode: TagMode) -> list[str]:
    return [render_sample(s, mode) for s in samples]


def _dev_metrics(model: QEModel, rendered: list[str], labels: np.ndarray
                 ) -> tuple[float, float | None]:
    preds = model.forward(rendered)
    loss = float(np.mean((preds - labels) ** 2))
    try:
        rescaled = pearson(preds.tolist(), labels.tolist()).rescaled
    except ValidationError:
        rescaled = None  # constant labels or predictions: loss still drives stopping
    return loss, rescaled


def train_step(
    init: Checkpoint | QEModel,
    train_ds: Sequence[QESample],
    dev_ds: Sequence[QESample],
    cfg: StepConfig,
) -> tuple[Checkpoint, list[EvalRecord]]:
    """Train one pipeline step and return the best (minimum dev loss)
    checkpoint plus the evaluation history."""
    if not train_ds or not dev_ds:
        raise ValidationError("empty training or dev dataset")

    import copy

    if isinstance(init, Checkpoint):
        parent_step = init.manifest["step_id"]
        if cfg.step_id == BASELINE_STEP or cfg.step_id == 1:
            raise ValidationError(
                f"lineage violation: step {cfg.step_id} starts from a fresh backend, "
                f"not a step-{parent_step} checkpoint"
            )
        if parent_step != cfg.step_id - 1:
            raise ValidationError(
                f"lineage violation: step {cfg.step_id} must initialize from a "
                f"step-{cfg.step_id - 1} checkpoint, got step-{parent_step}"
            )
        parent_id = init.checkpoint_id
        model = copy.deepcopy(init.model)  # the parent checkpoint stays intact
        inherited_pairs = init.manifest.get("train_lang_pairs", [])
    else:
        if cfg.step_id not in (1, BASELINE_STEP):
            raise ValidationError(
                f"lineage violation: step {cfg.step_id} requires a parent checkpoint"
            )
        parent_id = None
        model = copy.deepcopy(init)
        inherited_pairs = []

    lr = cfg.lr if cfg.lr is not None else model.backend.default_lr
    rendered_train = _render_all(train_ds, cfg.tag_mode)
    labels_train = np.array([s.label for s in train_ds], dtype=float)
    rendered_dev = _render_all(dev_ds, cfg.tag_mode)
    labels_dev = np.array([s.label for s in dev_ds], dtype=float)

    history: list[EvalRecord] = []
    losses: list[float] = []
    best_loss = float("inf")
    best_snap = model.snapshot()
    updates = 0
    epoch = 0
    start = time.perf_counter()
    stop = False
    n = len(train_ds)
    while not stop and updates < cfg.max_updates:
        order = permutation(n, derive_seed(cfg.seed, f"step{cfg.step_id}-epoch-{epoch}"))
        epoch += 1
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            batch = [rendered_train[i] for i in idx]
            _, grads = model.loss_and_grads(batch, labels_train[idx])
            model.apply_sgd(grads, lr=lr, weight_decay=cfg.weight_decay)
            updates += 1
            if updates % cfg.eval_interval == 0:
                dev_loss, dev_rho = _dev_metrics(model, rendered_dev, labels_dev)
                history.append(EvalRecord(update_count=updates, dev_loss=dev_loss,
                                          dev_pearson=dev_rho, timestamp=time.time()))
                losses.append(dev_loss)
                if dev_loss < best_loss - IMPROVEMENT_TOLERANCE:
                    best_loss = dev_loss
                    best_snap = model.snapshot()
                if should_stop(losses, cfg.patience):
                    stop = True
                    break
            if updates >= cfg.max_updates:
                stop = True
                break
    model.restore(best_snap)
    wall = time.perf_counter() - start
    pairs = sorted({format_lang_pair(s.lang_pair) for s in train_ds}
                   | set(inherited_pairs))
    manifest = _make_manifest(model, cfg, parent_id, content_hash(train_ds),
                              pairs, history, wall)
    logger.info("step %s: %d updates, best dev loss %.6f (%.1fs)",
                cfg.step_id, updates, best_loss, wall)
    return Checkpoint(model=model, manifest=manifest), history


def train_baseline(
    id_train: Sequence[QESample],
    id_dev: Sequence[QESample],
    cfg: StepConfig,
    backend_name: str = "toy",
    backend_options: dict | None = None,
) -> Checkpoint:
    """Single-step training of a fresh backend on in-domain data."""
    if cfg.step_id != BASELINE_STEP:
        raise ValidationError(f"baseline training requires step_id='baseline', got {cfg.step_id}")
    model = build_qe_model(backend_name, backend_options or {}, cfg.tag_mode)
    ckpt, _ = train_step(model, id_train, id_dev, cfg)
    return ckpt


# -- pipeline -----------------------------------------------------------------


@dataclass(frozen=True)
class PipelineData:
    """Prepared datasets for one pipeline run."""

    ood_train: list[QESample]
    ood_dev: list[QESample]
    id_train: dict[str, list[QESample]]   # keyed by "en-de"-style pair
    id_dev: dict[str, list[QESample]]
    synthetic: dict[str, list[QESample]] | None = None


@dataclass(frozen=True)
class PipelineSettings:
    approach: Approach = Approach.DAG1
    ood_ratio: float = 1.0
    tag_mode: TagMode = TagMode.NOTAG
    backend_name: str = "toy"
    backend_options: dict = field(default_factory=dict)
    seed: int = 8
    step_configs: dict = field(default_factory=dict)  # step_id -> StepConfig

    def config_for(self, step_id: int | str) -> StepConfig:
        cfg = self.step_configs.get(step_id)
        if cfg is None:
            cfg = default_step_config(step_id, tag_mode=self.tag_mode, seed=self.seed)
        return cfg


@dataclass
class PipelineResult:
    step1: Checkpoint
    step2: Checkpoint
    step3: dict[str, Checkpoint]
    timing_seconds: dict[str, float]


def step2_dev_set(data: PipelineData, ood_ratio: float, seed: int) -> list[QESample]:
    """Mixed dev set proportioned like the training mix: all in-domain dev
    sets plus an out-of-domain subsample of ood_ratio times their size."""
    id_dev = [s for pair in sorted(data.id_dev) for s in data.id_dev[pair]]
    n_ood = min(round(ood_ratio * len(id_dev)), len(data.ood_dev))
    return id_dev + subsample(data.ood_dev, n_ood, derive_seed(seed, "step2-dev"))


def run_pipeline(
    data: PipelineData,
    settings: PipelineSettings,
    cache: "CheckpointStore | None" = None,
    reuse: bool = False,
) -> PipelineResult:
    """Run the three steps; steps 1-2 are shared across language pairs and
    may be reused from the cache instead of retrained."""
    if reuse and cache is None:
        raise ValidationError("checkpoint reuse requested without a cache directory")
    timing: dict[str, float] = {}

    cfg1 = settings.config_for(1)
    key1 = _cache_key("step1", settings, content_hash(data.ood_train))
    ckpt1 = cache.load(key1) if (cache and reuse and cache.has(key1)) else None
    if ckpt1 is None:
        if reuse and cache is not None:
            raise ValidationError(
                f"reuse requested but no cached step-1 checkpoint under key {key1}"
            )
        model = build_qe_model(settings.backend_name, settings.backend_options,
                               settings.tag_mode)
        t0 = time.perf_counter()
        ckpt1, _ = train_step(model, data.ood_train, data.ood_dev, cfg1)
        timing["step1"] = time.perf_counter() - t0
        if cache is not None:
            cache.save(key1, ckpt1)
    else:
        timing["step1"] = 0.0

    cfg2 = settings.config_for(2)
    corpus2 = compose_step2_corpus(
        data.ood_train,
        [data.id_train[p] for p in sorted(data.id_train)],
        [data.synthetic[p] for p in sorted(data.synthetic)] if data.synthetic else None,
        settings.approach,
        settings.ood_ratio,
        settings.seed,
    )
    dev2 = step2_dev_set(data, settings.ood_ratio, settings.seed)
    key2 = _cache_key("step2", settings, content_hash(corpus2))
    ckpt2 = cache.load(key2) if (cache and reuse and cache.has(key2)) else None
    if ckpt2 is None:
        t0 = time.perf_counter()
        ckpt2, _ = train_step(ckpt1, corpus2, dev2, cfg2)
        timing["step2"] = time.perf_counter() - t0
        if cache is not None:
            cache.save(key2, ckpt2)
    else:
        timing["step2"] = 0.0

    cfg3 = settings.config_for(3)
    step3: dict[str, Checkpoint] = {}
    for pair in sorted(data.id_train):
        t0 = time.perf_counter()
        ckpt3, _ = train_step(ckpt2, data.id_train[pair], data.id_dev[pair], cfg3)
        step3[pair] = ckpt3
        timing[f"step3-{pair}"] = time.perf_counter() - t0
    return PipelineResult(step1=ckpt1, step2=ckpt2, step3=step3, timing_seconds=timing)


def _cache_key(role: str, settings: PipelineSettings, data_fp: str) -> str:
    cfg = settings.config_for(1 if role == "step1" else 2)
    payload = json.dumps(
        {
            "role": role,
            "backend": settings.backend_name,
            "backend_options": settings.backend_options,
            "tag_mode": settings.tag_mode.value,
            "approach": settings.approach.value if role != "step1" else None,
            "ood_ratio": settings.ood_ratio if role != "step1" else None,
            "seed": settings.seed,
            "eval_interval": cfg.eval_interval,
            "patience": cfg.patience,
            "max_updates": cfg.max_updates,
            "batch_size": cfg.batch_size,
            "data": data_fp,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class CheckpointStore:
    """Directory-backed checkpoint cache.

    Layout per checkpoint: <root>/<key>/params/*.npy, vocab.json,
    manifest.json.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _dir(self, key: str) -> Path:
        return self.root / key

    def has(self, key: str) -> bool:
        return (self._dir(key) / "manifest.json").exists()

    def save(self, key: str, ckpt: Checkpoint) -> Path:
        directory = self._dir(key)
        directory.mkdir(parents=True, exist_ok=True)
        save_model(ckpt.model, directory)
        (directory / "manifest.json").write_text(
            json.dumps(ckpt.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return directory

    def load(self, key: str) -> Checkpoint:
        directory = self._dir(key)
        if not self.has(key):
            raise ValidationError(f"no cached checkpoint under key {key} in {self.root}")
        model = load_model(directory)
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
        return Checkpoint(model=model, manifest=manifest)
