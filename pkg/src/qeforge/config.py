"""Declarative experiment configuration.

Config files are JSON (nested key/value).  Validation is strict: unknown keys
are fatal, seeds must be explicit, referenced dataset paths must exist, and
every default is filled in during normalization so the artifact directory
always records the exact configuration that produced it.  The QEFORGE_OUT
environment variable overrides the configured output directory.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .augment import Approach, MTConfig, SynthesisPlan
from .corpus import parse_lang_pair
from .errors import ValidationError
from .modeling import TagMode
from .trainer import DEFAULT_EVAL_INTERVALS, BASELINE_STEP, StepConfig

OUTPUT_ENV_VAR = "QEFORGE_OUT"

_STEP_KEYS = ("step1", "step2", "step3", "baseline")
_STEP_IDS = {"step1": 1, "step2": 2, "step3": 3, "baseline": BASELINE_STEP}

_STEP_DEFAULTS = {
    "patience": 5,
    "max_updates": 10_000,
    "batch_size": 16,
    "lr": None,
    "weight_decay": 0.0,
}

_EVAL_TAG_DEFAULTS = {"id": "ID", "ood": "OOD", "zero_shot": "ID"}


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ValidationError(f"unknown key {sorted(unknown)[0]!r} in {where}")
    missing = required - set(section)
    if missing:
        raise ValidationError(f"missing key {sorted(missing)[0]!r} in {where}")


def _check_path(path: str, where: str, base: Path) -> str:
    resolved = (base / path).resolve() if not os.path.isabs(path) else Path(path)
    if not resolved.exists():
        raise ValidationError(f"{where}: dataset path does not exist: {resolved}")
    return str(resolved)


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalized configuration plus its content fingerprint."""

    raw: dict
    fingerprint: str
    source_path: str

    # -- accessors ------------------------------------------------------------

    @property
    def output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_ENV_VAR) or self.raw["output_dir"])

    @property
    def seed(self) -> int:
        return self.raw["seed"]

    @property
    def tag_mode(self) -> TagMode:
        return TagMode(self.raw["tag_mode"])

    @property
    def approach(self) -> Approach:
        return Approach(self.raw["augment"]["approach"])

    @property
    def ood_ratio(self) -> float:
        return self.raw["augment"]["ood_ratio"]

    @property
    def backend_name(self) -> str:
        return self.raw["backend"]

    def backend_options(self) -> dict:
        opts = dict(self.raw["backend_options"])
        vocab_file = opts.pop("vocab_file", None)
        if vocab_file:
            words = Path(vocab_file).read_text(encoding="utf-8").split()
            opts["vocab_words"] = words
        return opts

    def step_config(self, key: str) -> StepConfig:
        section = self.raw["steps"][key]
        return StepConfig(
            step_id=_STEP_IDS[key],
            eval_interval=section["eval_interval"],
            patience=section["patience"],
            max_updates=section["max_updates"],
            batch_size=section["batch_size"],
            tag_mode=self.tag_mode,
            seed=self.seed,
            lr=section["lr"],
            weight_decay=section["weight_decay"],
        )

    def id_pairs(self) -> list[str]:
        return sorted(self.raw["datasets"]["id"])

    def zero_sets(self) -> list[str]:
        return sorted(self.raw["datasets"].get("zero_shot", {}))

    def synthesis_plan(self, pair: str) -> SynthesisPlan:
        section = self.raw["augment"].get("synthesis")
        if section is None:
            raise ValidationError("config has no augment.synthesis section")
        return SynthesisPlan(
            lang_pair=parse_lang_pair(pair),
            n=section["n"],
            seed=section["seed"],
            portion=section["portion"],
        )

    def mt_config(self) -> MTConfig:
        section = self.raw["augment"].get("mt", {})
        return MTConfig(**section) if section else MTConfig(seed=self.seed)

    def eval_tag_domain(self, test_kind: str) -> str:
        return self.raw["eval_tag_policy"][test_kind]


def _normalize_steps(steps: dict) -> dict:
    out = {}
    for key in _STEP_KEYS:
        section = dict(steps.get(key, {}))
        allowed = {"eval_interval", *_STEP_DEFAULTS}
        _require_keys(section, allowed, set(), f"steps.{key}")
        normalized = dict(_STEP_DEFAULTS)
        normalized["eval_interval"] = DEFAULT_EVAL_INTERVALS[_STEP_IDS[key]]
        normalized.update(section)
        out[key] = normalized
    unknown = set(steps) - set(_STEP_KEYS)
    if unknown:
        raise ValidationError(f"unknown key {sorted(unknown)[0]!r} in steps")
    return out


def _normalize_datasets(datasets: dict, base: Path) -> dict:
    _require_keys(datasets, {"ood", "id", "zero_shot", "parallel"}, {"ood", "id"}, "datasets")
    out: dict = {}

    ood = dict(datasets["ood"])
    _require_keys(ood, {"lang_pair", "train", "dev", "test"},
                  {"lang_pair", "train", "dev", "test"}, "datasets.ood")
    parse_lang_pair(ood["lang_pair"])
    for part in ("train", "dev", "test"):
        ood[part] = _check_path(ood[part], f"datasets.ood.{part}", base)
    out["ood"] = ood

    out["id"] = {}
    if not datasets["id"]:
        raise ValidationError("datasets.id must declare at least one language pair")
    for pair, section in datasets["id"].items():
        parse_lang_pair(pair)
        section = dict(section)
        _require_keys(section, {"train", "dev", "test"}, {"train", "dev", "test"},
                      f"datasets.id.{pair}")
        for part in ("train", "dev", "test"):
            section[part] = _check_path(section[part], f"datasets.id.{pair}.{part}", base)
        out["id"][pair] = section

    out["zero_shot"] = {}
    for pair, section in datasets.get("zero_shot", {}).items():
        parse_lang_pair(pair)
        section = dict(section)
        _require_keys(section, {"test"}, {"test"}, f"datasets.zero_shot.{pair}")
        section["test"] = _check_path(section["test"], f"datasets.zero_shot.{pair}.test", base)
        out["zero_shot"][pair] = section

    out["parallel"] = {}
    for pair, section in datasets.get("parallel", {}).items():
        parse_lang_pair(pair)
        section = dict(section)
        _require_keys(section, {"src", "ref"}, {"src", "ref"}, f"datasets.parallel.{pair}")
        section["src"] = _check_path(section["src"], f"datasets.parallel.{pair}.src", base)
        section["ref"] = _check_path(section["ref"], f"datasets.parallel.{pair}.ref", base)
        out["parallel"][pair] = section
    return out


def validate_config(path: str | Path) -> ExperimentConfig:
    """Parse, validate strictly, and normalize a config file."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config does not parse as JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError("config root must be an object")

    allowed = {"output_dir", "seed", "backend", "backend_options", "tag_mode",
               "datasets", "augment", "steps", "eval_tag_policy"}
    _require_keys(raw, allowed, {"output_dir", "seed", "datasets"}, "config")
    if not isinstance(raw["seed"], int):
        raise ValidationError("seed must be an explicit integer (no implicit defaults)")

    base = path.parent
    normalized: dict = {
        "output_dir": raw["output_dir"],
        "seed": raw["seed"],
        "backend": raw.get("backend", "toy"),
        "backend_options": dict(raw.get("backend_options", {})),
        "tag_mode": raw.get("tag_mode", "NOTAG"),
        "datasets": _normalize_datasets(raw["datasets"], base),
        "augment": {},
        "steps": _normalize_steps(raw.get("steps", {})),
        "eval_tag_policy": dict(_EVAL_TAG_DEFAULTS),
    }
    if normalized["tag_mode"] not in ("TAG", "NOTAG"):
        raise ValidationError(f"tag_mode must be TAG or NOTAG, got {normalized['tag_mode']!r}")

    augment = dict(raw.get("augment", {}))
    _require_keys(augment, {"approach", "ood_ratio", "seed", "synthesis", "mt"}, set(), "augment")
    normalized["augment"] = {
        "approach": augment.get("approach", "DAG1"),
        "ood_ratio": augment.get("ood_ratio", 1.0),
        "seed": augment.get("seed", raw["seed"]),
    }
    if normalized["augment"]["approach"] not in ("DAG1", "DAG2"):
        raise ValidationError(
            f"augment.approach must be DAG1 or DAG2, got {augment.get('approach')!r}"
        )
    if "synthesis" in augment:
        synth = dict(augment["synthesis"])
        _require_keys(synth, {"n", "portion", "seed"}, {"n", "portion", "seed"},
                      "augment.synthesis")
        normalized["augment"]["synthesis"] = synth
    if "mt" in augment:
        mt = dict(augment["mt"])
        _require_keys(mt, {"seed", "batch_size", "eval_interval", "patience",
                           "max_updates", "lr", "hidden_width"}, {"seed"}, "augment.mt")
        normalized["augment"]["mt"] = mt

    policy = dict(raw.get("eval_tag_policy", {}))
    _require_keys(policy, set(_EVAL_TAG_DEFAULTS), set(), "eval_tag_policy")
    for key, value in policy.items():
        if value not in ("ID", "OOD"):
            raise ValidationError(f"eval_tag_policy.{key} must be ID or OOD")
        normalized["eval_tag_policy"][key] = value

    if "vocab_file" in normalized["backend_options"]:
        normalized["backend_options"]["vocab_file"] = _check_path(
            normalized["backend_options"]["vocab_file"], "backend_options.vocab_file", base
        )

    fingerprint = hashlib.sha256(
        json.dumps(normalized, sort_keys=True).encode()
    ).hexdigest()[:16]
    return ExperimentConfig(raw=normalized, fingerprint=fingerprint, source_path=str(path))
