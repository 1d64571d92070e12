"""Command-line surface.

Subcommands front the package operations: data-split, label-ter,
augment-concat, augment-synth, train (--step 1|2|3|baseline), evaluate, and
report.  All side effects land under the configured output directory; exit
codes are 0 on success, 1 on validation errors, 2 on runtime errors.

Run-directory layout:

    normalized-config.json
    checkpoints/<role>/     role = step1 | step2 | step3-<pair> | baseline-<pair>
    augment/                concatenated and synthetic training files
    predictions/<model>__<testset>.tsv
    reports/<name>.txt|.json
    timing.json
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shutil
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from . import augment as aug
from . import corpus, eval_report, trainer
from .config import ExperimentConfig, validate_config
from .errors import QEForgeError, ValidationError
from .metrics import score_pairs_file
from .modeling import TagMode, build_qe_model
from .prng import derive_seed

logger = logging.getLogger(__name__)

NATIVE_ENV_VAR = "QEFORGE_TER_NATIVE"


# -- plumbing -----------------------------------------------------------------


@contextmanager
def _output_lock(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / ".lock"
    if lock.exists():
        raise ValidationError(
            f"output directory {out_dir} is locked by another run "
            f"(stale? remove {lock})"
        )
    lock.write_text(str(os.getpid()), encoding="utf-8")
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


def _write_normalized_config(cfg: ExperimentConfig) -> None:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    payload = {"fingerprint": cfg.fingerprint, "config": cfg.raw}
    (out / "normalized-config.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _load_id(cfg: ExperimentConfig, pair: str, part: str) -> list[corpus.QESample]:
    path = cfg.raw["datasets"]["id"][pair][part]
    return corpus.load_qe_tsv(path, corpus.parse_lang_pair(pair), corpus.DOMAIN_ID)


def _load_ood(cfg: ExperimentConfig, part: str) -> list[corpus.QESample]:
    section = cfg.raw["datasets"]["ood"]
    return corpus.load_qe_tsv(section[part], corpus.parse_lang_pair(section["lang_pair"]),
                              corpus.DOMAIN_OOD)


def _load_zero(cfg: ExperimentConfig, pair: str) -> list[corpus.QESample]:
    path = cfg.raw["datasets"]["zero_shot"][pair]["test"]
    return corpus.load_qe_tsv(path, corpus.parse_lang_pair(pair), corpus.DOMAIN_ID)


def _store(cfg: ExperimentConfig) -> trainer.CheckpointStore:
    return trainer.CheckpointStore(cfg.output_dir / "checkpoints")


def _role_cache_key(cfg: ExperimentConfig, role: str, data_fp: str,
                    parent_id: str | None) -> str:
    import hashlib

    payload = json.dumps(
        {
            "role": role,
            "backend": cfg.backend_name,
            "backend_options": cfg.raw["backend_options"],
            "tag_mode": cfg.raw["tag_mode"],
            "seed": cfg.seed,
            "augment": cfg.raw["augment"],
            "steps": cfg.raw["steps"],
            "data": data_fp,
            "parent": parent_id,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _load_role(cfg: ExperimentConfig, role: str, expected_key: str) -> trainer.Checkpoint:
    store = _store(cfg)
    key_file = store.root / role / "cache-key.txt"
    if not store.has(role) or not key_file.exists() \
            or key_file.read_text(encoding="utf-8").strip() != expected_key:
        raise ValidationError(
            f"missing cached {role} checkpoint for this configuration; "
            f"expected manifest key {expected_key} under {store.root / role} "
            f"(run `qeforge train` for the earlier step first)"
        )
    return store.load(role)


def _save_role(cfg: ExperimentConfig, role: str, ckpt: trainer.Checkpoint, key: str) -> None:
    store = _store(cfg)
    if (store.root / role).exists():
        shutil.rmtree(store.root / role)
    store.save(role, ckpt)
    (store.root / role / "cache-key.txt").write_text(key + "\n", encoding="utf-8")


def _record_timing(cfg: ExperimentConfig, role: str, seconds: float) -> None:
    path = cfg.output_dir / "timing.json"
    timing = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    timing[role] = seconds
    path.write_text(json.dumps(timing, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _variant_column(cfg: ExperimentConfig) -> str:
    tag = "TAG" if cfg.tag_mode == TagMode.TAG else "NO TAG"
    dag = "1" if cfg.approach == aug.Approach.DAG1 else "2"
    return f"{tag} DAG {dag}"


# -- data-split ----------------------------------------------------------------


def cmd_data_split(args) -> int:
    samples = corpus.load_qe_tsv(args.input, corpus.parse_lang_pair(args.lang_pair),
                                 args.domain, args.origin, label_scale=args.label_scale)
    spec = corpus.SplitSpec(ratios=tuple(args.ratios), seed=args.seed,
                            shuffle=not args.no_shuffle)
    parts = corpus.split(samples, spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, ds in (("train", parts.train), ("dev", parts.dev), ("test", parts.test)):
        corpus.write_qe_tsv(ds, out / f"{name}.tsv")
    manifest = corpus.dataset_manifest(
        samples, paths=[str(args.input)],
        extra={"split": {"ratios": list(spec.ratios), "seed": spec.seed,
                         "shuffle": spec.shuffle},
               "sizes": {"train": len(parts.train), "dev": len(parts.dev),
                         "test": len(parts.test)}},
    )
    corpus.write_manifest(manifest, out / "manifest.json")
    print(f"split {len(samples)} samples -> "
          f"{len(parts.train)}/{len(parts.dev)}/{len(parts.test)} under {out}")
    return 0


# -- label-ter -------------------------------------------------------------------


def _find_native() -> str | None:
    override = os.environ.get(NATIVE_ENV_VAR)
    if override:
        return override if Path(override).exists() else None
    return shutil.which("ter-native")


def cmd_label_ter(args) -> int:
    lowercase = not args.no_lowercase
    keep_punct = not args.no_punct
    if args.native in ("on", "auto"):
        native = _find_native()
        if native is None and args.native == "on":
            raise ValidationError(
                f"--native=on but no scorer found (set {NATIVE_ENV_VAR} or put "
                "ter-native on PATH)"
            )
        if native is not None:
            cmd = [native, "--input", str(args.input), "--output", str(args.output),
                   "--workers", str(args.workers)]
            if not lowercase:
                cmd.append("--no-lowercase")
            if not keep_punct:
                cmd.append("--no-punct")
            if native.endswith(".js") or native.endswith(".mjs"):
                cmd = ["node", *cmd]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            if proc.returncode != 0:
                raise QEForgeError(f"native scorer failed: {proc.stderr.strip()}")
            print(proc.stdout.strip())
            return 0
    summary = score_pairs_file(args.input, args.output,
                               lowercase=lowercase, keep_punct=keep_punct)
    print(f"scored {summary.pairs} pairs, corpus TER {summary.corpus_ter:.6f} "
          f"({summary.seconds:.2f}s)")
    return 0


# -- augment ---------------------------------------------------------------------


def cmd_augment_concat(args) -> int:
    cfg = validate_config(args.config)
    with _output_lock(cfg.output_dir):
        _write_normalized_config(cfg)
        id_sets = [_load_id(cfg, pair, "train") for pair in cfg.id_pairs()]
        combined = aug.dag1_concat(id_sets)
        out = cfg.output_dir / "augment"
        out.mkdir(parents=True, exist_ok=True)
        corpus.write_qe_tsv(combined, out / "dag1_train.tsv")
        manifest = corpus.dataset_manifest(
            combined, paths=[cfg.raw["datasets"]["id"][p]["train"] for p in cfg.id_pairs()]
        )
        corpus.write_manifest(manifest, out / "dag1_train.manifest.json")
        print(f"concatenated {len(combined)} in-domain samples "
              f"({len(id_sets)} language pairs) -> {out / 'dag1_train.tsv'}")
    return 0


def cmd_augment_synth(args) -> int:
    cfg = validate_config(args.config)
    pair = args.lang_pair
    parallel_cfg = cfg.raw["datasets"].get("parallel", {})
    if pair not in parallel_cfg:
        raise ValidationError(f"no parallel data configured for {pair!r}")
    with _output_lock(cfg.output_dir):
        _write_normalized_config(cfg)
        parallel = corpus.load_parallel(parallel_cfg[pair]["src"],
                                        parallel_cfg[pair]["ref"],
                                        corpus.parse_lang_pair(pair))
        plan = cfg.synthesis_plan(pair)
        halves = aug.make_halves(parallel, plan)
        translator = aug.train_translator(halves.s1, cfg.mt_config())
        synthetic = aug.generate_synthetic(translator, halves.s2, plan)
        out = cfg.output_dir / "augment"
        out.mkdir(parents=True, exist_ok=True)
        tsv = out / f"synthetic_{pair}.tsv"
        corpus.write_qe_tsv(synthetic.samples, tsv)
        manifest = corpus.dataset_manifest(
            synthetic.samples,
            paths=[parallel_cfg[pair]["src"], parallel_cfg[pair]["ref"]],
            extra={
                "plan": {"n": plan.n, "portion": plan.portion, "seed": plan.seed,
                         "metric": plan.metric},
                "translator": {"backend": translator.name,
                               "dev_bleu": getattr(translator, "dev_bleu", None)},
            },
        )
        corpus.write_manifest(manifest, out / f"synthetic_{pair}.manifest.json")
        print(f"generated {len(synthetic.samples)} synthetic samples for {pair} "
              f"(translator dev BLEU {getattr(translator, 'dev_bleu', 0.0):.2f}) -> {tsv}")
    return 0


def _load_synthetic_sets(cfg: ExperimentConfig) -> list[list[corpus.QESample]]:
    sets = []
    for pair in cfg.id_pairs():
        tsv = cfg.output_dir / "augment" / f"synthetic_{pair}.tsv"
        if not tsv.exists():
            raise ValidationError(
                f"approach DAG2 needs synthetic data for {pair}; run "
                f"`qeforge augment-synth --lang-pair {pair}` first (missing {tsv})"
            )
        sets.append(corpus.load_qe_tsv(tsv, corpus.parse_lang_pair(pair),
                                       corpus.DOMAIN_ID, corpus.ORIGIN_SYNTHETIC))
    return sets


# -- train -----------------------------------------------------------------------


def cmd_train(args) -> int:
    cfg = validate_config(args.config)
    with _output_lock(cfg.output_dir):
        _write_normalized_config(cfg)
        if args.step == "1":
            _train_step1(cfg, args.reuse)
        elif args.step == "2":
            _train_step2(cfg, args.reuse)
        elif args.step == "3":
            pairs = [args.lang_pair] if args.lang_pair else cfg.id_pairs()
            for pair in pairs:
                _train_step3(cfg, pair, args.reuse)
        else:
            pairs = [args.lang_pair] if args.lang_pair else cfg.id_pairs()
            for pair in pairs:
                _train_baseline(cfg, pair, args.reuse)
    return 0


def _train_step1(cfg: ExperimentConfig, reuse: bool) -> None:
    ood_train = _load_ood(cfg, "train")
    key = _role_cache_key(cfg, "step1", corpus.content_hash(ood_train), None)
    if reuse:
        try:
            _load_role(cfg, "step1", key)
            print(f"step1: reusing cached checkpoint (key {key})")
            return
        except ValidationError:
            pass
    model = build_qe_model(cfg.backend_name, cfg.backend_options(), cfg.tag_mode)
    t0 = time.perf_counter()
    ckpt, history = trainer.train_step(model, ood_train, _load_ood(cfg, "dev"),
                                       cfg.step_config("step1"))
    _record_timing(cfg, "step1", time.perf_counter() - t0)
    _save_role(cfg, "step1", ckpt, key)
    print(f"step1: trained ({len(history)} evaluations), checkpoint {ckpt.checkpoint_id}")


def _step2_corpus(cfg: ExperimentConfig) -> tuple[list, list]:
    ood_train = _load_ood(cfg, "train")
    id_sets = [_load_id(cfg, pair, "train") for pair in cfg.id_pairs()]
    synthetic = _load_synthetic_sets(cfg) if cfg.approach == aug.Approach.DAG2 else None
    mixed = aug.compose_step2_corpus(ood_train, id_sets, synthetic, cfg.approach,
                                     cfg.ood_ratio, cfg.raw["augment"]["seed"])
    id_dev = [s for pair in cfg.id_pairs() for s in _load_id(cfg, pair, "dev")]
    ood_dev = _load_ood(cfg, "dev")
    n_ood = min(round(cfg.ood_ratio * len(id_dev)), len(ood_dev))
    dev = id_dev + corpus.subsample(ood_dev, n_ood, derive_seed(cfg.seed, "step2-dev"))
    return mixed, dev


def _train_step2(cfg: ExperimentConfig, reuse: bool) -> None:
    ood_train = _load_ood(cfg, "train")
    key1 = _role_cache_key(cfg, "step1", corpus.content_hash(ood_train), None)
    ckpt1 = _load_role(cfg, "step1", key1)
    mixed, dev = _step2_corpus(cfg)
    key2 = _role_cache_key(cfg, "step2", corpus.content_hash(mixed), ckpt1.checkpoint_id)
    if reuse:
        try:
            _load_role(cfg, "step2", key2)
            print(f"step2: reusing cached checkpoint (key {key2})")
            return
        except ValidationError:
            pass
    t0 = time.perf_counter()
    ckpt, history = trainer.train_step(ckpt1, mixed, dev, cfg.step_config("step2"))
    _record_timing(cfg, "step2", time.perf_counter() - t0)
    _save_role(cfg, "step2", ckpt, key2)
    print(f"step2: trained on {len(mixed)} mixed samples "
          f"({len(history)} evaluations), checkpoint {ckpt.checkpoint_id}")


def _train_step3(cfg: ExperimentConfig, pair: str, reuse: bool) -> None:
    ood_train = _load_ood(cfg, "train")
    key1 = _role_cache_key(cfg, "step1", corpus.content_hash(ood_train), None)
    ckpt1 = _load_role(cfg, "step1", key1)
    mixed, _ = _step2_corpus(cfg)
    key2 = _role_cache_key(cfg, "step2", corpus.content_hash(mixed), ckpt1.checkpoint_id)
    ckpt2 = _load_role(cfg, "step2", key2)
    role = f"step3-{pair}"
    id_train = _load_id(cfg, pair, "train")
    key3 = _role_cache_key(cfg, role, corpus.content_hash(id_train), ckpt2.checkpoint_id)
    if reuse:
        try:
            _load_role(cfg, role, key3)
            print(f"{role}: reusing cached checkpoint (key {key3})")
            return
        except ValidationError:
            pass
    t0 = time.perf_counter()
    ckpt, history = trainer.train_step(ckpt2, id_train, _load_id(cfg, pair, "dev"),
                                       cfg.step_config("step3"))
    _record_timing(cfg, role, time.perf_counter() - t0)
    _save_role(cfg, role, ckpt, key3)
    print(f"{role}: trained ({len(history)} evaluations), checkpoint {ckpt.checkpoint_id}")


def _train_baseline(cfg: ExperimentConfig, pair: str, reuse: bool) -> None:
    role = f"baseline-{pair}"
    id_train = _load_id(cfg, pair, "train")
    key = _role_cache_key(cfg, role, corpus.content_hash(id_train), None)
    if reuse:
        try:
            _load_role(cfg, role, key)
            print(f"{role}: reusing cached checkpoint (key {key})")
            return
        except ValidationError:
            pass
    t0 = time.perf_counter()
    ckpt = trainer.train_baseline(id_train, _load_id(cfg, pair, "dev"),
                                  cfg.step_config("baseline"),
                                  backend_name=cfg.backend_name,
                                  backend_options=cfg.backend_options())
    _record_timing(cfg, role, time.perf_counter() - t0)
    _save_role(cfg, role, ckpt, key)
    print(f"{role}: trained, checkpoint {ckpt.checkpoint_id}")


# -- evaluate --------------------------------------------------------------------


def _testset_samples(cfg: ExperimentConfig, testset: str) -> tuple[list, str]:
    """Resolve a test-set id to (samples, tag-policy kind)."""
    if testset == "ood":
        return _load_ood(cfg, "test"), "ood"
    if testset.startswith("id-"):
        return _load_id(cfg, testset[3:], "test"), "id"
    if testset.startswith("zero-"):
        return _load_zero(cfg, testset[5:]), "zero_shot"
    raise ValidationError(f"unknown test set {testset!r} (use id-<pair>, ood, zero-<pair>)")


def _available_models(cfg: ExperimentConfig) -> list[str]:
    roles = ["step1", "step2"]
    roles += [f"step3-{p}" for p in cfg.id_pairs()]
    roles += [f"baseline-{p}" for p in cfg.id_pairs()]
    store = _store(cfg)
    return [r for r in roles if store.has(r)]


def _model_for(cfg: ExperimentConfig, model_id: str):
    if model_id == "untrained":
        return build_qe_model(cfg.backend_name, cfg.backend_options(), cfg.tag_mode)
    store = _store(cfg)
    if not store.has(model_id):
        raise ValidationError(f"no checkpoint for model {model_id!r} under {store.root}")
    return store.load(model_id).model


def _dump_path(cfg: ExperimentConfig, model_id: str, testset: str) -> Path:
    return cfg.output_dir / "predictions" / f"{model_id}__{testset}.tsv"


def _evaluate_one(cfg: ExperimentConfig, model_id: str, testset: str) -> float:
    samples, kind = _testset_samples(cfg, testset)
    model = _model_for(cfg, model_id)
    tag_domain = cfg.eval_tag_domain(kind)
    score = eval_report.evaluate_to_dump(
        model, samples, _dump_path(cfg, model_id, testset),
        tag_mode=cfg.tag_mode, tag_domain=tag_domain, model_id=model_id,
    )
    print(f"{model_id} on {testset}: {score:.2f}")
    return score


def cmd_evaluate(args) -> int:
    cfg = validate_config(args.config)
    with _output_lock(cfg.output_dir):
        _write_normalized_config(cfg)
        if args.all:
            models = _available_models(cfg) + ["untrained"]
            id_tests = [f"id-{p}" for p in cfg.id_pairs()]
            zero_tests = [f"zero-{p}" for p in cfg.zero_sets()]
            for model_id in models:
                for testset in [*id_tests, "ood"]:
                    _evaluate_one(cfg, model_id, testset)
                if model_id.startswith(("step3-", "baseline-")):
                    for testset in zero_tests:
                        _evaluate_one(cfg, model_id, testset)
            return 0
        if not args.model or not args.testset:
            raise ValidationError("evaluate needs --model and --testset (or --all)")
        _evaluate_one(cfg, args.model, args.testset)
    return 0


# -- report ----------------------------------------------------------------------


def _dump_score(cfg: ExperimentConfig, model_id: str, testset: str) -> float | None:
    path = _dump_path(cfg, model_id, testset)
    if not path.exists():
        return None
    return eval_report.score_from_dump(path, model_id=model_id)


def _write_report(cfg: ExperimentConfig, name: str, report: eval_report.EvalReport) -> None:
    out = cfg.output_dir / "reports"
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.txt").write_text(report.to_text(), encoding="utf-8")
    (out / f"{name}.json").write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(report.to_text())


def _report_main(cfg: ExperimentConfig) -> eval_report.EvalReport:
    variant = _variant_column(cfg)
    scores: dict = {}
    for pair in cfg.id_pairs():
        testset = f"id-{pair}"
        scores[pair] = {
            "Baseline": _dump_score(cfg, f"baseline-{pair}", testset),
            variant: _dump_score(cfg, f"step3-{pair}", testset),
        }
    return eval_report.main_results_table(scores)


def _report_crosslingual(cfg: ExperimentConfig) -> eval_report.EvalReport:
    tests = [f"id-{p}" for p in cfg.id_pairs()]
    model_scores: dict = {}
    baseline_scores: dict = {}
    for pair in cfg.id_pairs():
        model_scores[pair] = {t: _dump_score(cfg, f"step3-{pair}", t) for t in tests}
        baseline_scores[pair] = {t: _dump_score(cfg, f"baseline-{pair}", t) for t in tests}
    extra = {}
    for role, label in (("step2", "Step2"), ("step1", "Step1"),
                        ("untrained", "untrained backend")):
        cells = {t: _dump_score(cfg, role, t) for t in tests}
        if any(v is not None for v in cells.values()):
            extra[label] = cells
    return eval_report.crosslingual_matrix(model_scores, baseline_scores, tests,
                                           extra_rows=extra)


def _report_zeroshot(cfg: ExperimentConfig) -> eval_report.EvalReport:
    variant = _variant_column(cfg)
    store = _store(cfg)
    scores: dict = {}
    trained_pairs: dict = {}
    for pair in cfg.id_pairs():
        manifest = store.load(f"step3-{pair}").manifest if store.has(f"step3-{pair}") else None
        used = {tuple(p.split("-")) for p in (manifest or {}).get("train_lang_pairs", [])}
        trained_pairs[pair] = used
        for z in cfg.zero_sets():
            cells = {
                "Baseline": _dump_score(cfg, f"baseline-{pair}", f"zero-{z}"),
                variant: _dump_score(cfg, f"step3-{pair}", f"zero-{z}"),
            }
            if any(v is not None for v in cells.values()):
                scores[(pair, z)] = cells
    test_set_pairs = {z: corpus.parse_lang_pair(z) for z in cfg.zero_sets()}
    return eval_report.zeroshot_table(scores, trained_pairs, test_set_pairs)


def _report_ood(cfg: ExperimentConfig) -> eval_report.EvalReport:
    pipeline = {}
    baselines = {}
    for pair in cfg.id_pairs():
        p = _dump_score(cfg, f"step3-{pair}", "ood")
        b = _dump_score(cfg, f"baseline-{pair}", "ood")
        if p is not None:
            pipeline[pair] = p
        if b is not None:
            baselines[pair] = b
    ood_models = {}
    step1 = _dump_score(cfg, "step1", "ood")
    if step1 is not None:
        ood_models["OOD"] = step1
    step2 = _dump_score(cfg, "step2", "ood")
    if step2 is not None:
        dag = "DAG 1" if cfg.approach == aug.Approach.DAG1 else "DAG 2"
        ood_models[dag] = step2
    return eval_report.ood_table(pipeline, baselines, ood_models, reference="OOD")


def _report_significance(cfg: ExperimentConfig) -> eval_report.EvalReport:
    variant = _variant_column(cfg)
    per_pair = {}
    for pair in cfg.id_pairs():
        testset = f"id-{pair}"
        systems = {}
        gold = None
        for model_id, label in ((f"baseline-{pair}", "Baseline"),
                                (f"step3-{pair}", variant)):
            path = _dump_path(cfg, model_id, testset)
            if not path.exists():
                continue
            golds, preds = eval_report.read_prediction_dump(path)
            gold = golds
            systems[label] = preds
        if gold is not None and len(systems) >= 2:
            per_pair[pair] = (gold, systems)
    if not per_pair:
        raise ValidationError("no prediction dumps to compare; run evaluate first")
    return eval_report.significance_report(per_pair)


def _report_timing(cfg: ExperimentConfig) -> eval_report.EvalReport:
    path = cfg.output_dir / "timing.json"
    if not path.exists():
        raise ValidationError(f"no timing data at {path}; run training first")
    return eval_report.timing_report(json.loads(path.read_text(encoding="utf-8")))


def cmd_report(args) -> int:
    cfg = validate_config(args.config)
    builders = {
        "main": _report_main,
        "crosslingual": _report_crosslingual,
        "zeroshot": _report_zeroshot,
        "ood": _report_ood,
        "significance": _report_significance,
        "timing": _report_timing,
    }
    report = builders[args.table](cfg)
    _write_report(cfg, args.table, report)
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qeforge",
                                     description="QE domain-adaptation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("data-split", help="split a QE TSV into train/dev/test")
    p.add_argument("--input", required=True)
    p.add_argument("--lang-pair", required=True)
    p.add_argument("--domain", choices=["ID", "OOD"], required=True)
    p.add_argument("--origin", choices=["authentic", "synthetic"], default="authentic")
    p.add_argument("--label-scale", choices=["auto", "fraction", "percent"], default="auto")
    p.add_argument("--ratios", nargs=3, type=float, default=[0.98, 0.01, 0.01])
    p.add_argument("--seed", type=int, default=8)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_data_split)

    p = sub.add_parser("label-ter", help="batch-score hyp<TAB>ref pairs with TER")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--native", choices=["off", "on", "auto"], default="off")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-lowercase", action="store_true")
    p.add_argument("--no-punct", action="store_true")
    p.set_defaults(func=cmd_label_ter)

    p = sub.add_parser("augment-concat", help="concatenate all in-domain training sets")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_augment_concat)

    p = sub.add_parser("augment-synth", help="generate synthetic in-domain data")
    p.add_argument("--config", required=True)
    p.add_argument("--lang-pair", required=True)
    p.set_defaults(func=cmd_augment_synth)

    p = sub.add_parser("train", help="train one pipeline step")
    p.add_argument("--config", required=True)
    p.add_argument("--step", choices=["1", "2", "3", "baseline"], required=True)
    p.add_argument("--lang-pair", default=None,
                   help="restrict step 3 / baseline to one language pair")
    p.add_argument("--reuse", action=argparse.BooleanOptionalAction, default=True,
                   help="reuse a cached checkpoint when the configuration matches")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score checkpoints on test sets")
    p.add_argument("--config", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--testset", default=None)
    p.add_argument("--all", action="store_true",
                   help="evaluate every trained model on every relevant test set")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="assemble a report table from dumps")
    p.add_argument("table", choices=["main", "zeroshot", "crosslingual", "ood",
                                     "significance", "timing"])
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("QEFORGE_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
