from __future__ import annotations

import numpy as np
import pytest

from qeforge.corpus import DOMAIN_OOD, QESample
from qeforge.errors import ValidationError
from qeforge.modeling import TagMode, build_qe_model
from qeforge.prng import Xoshiro256
from qeforge.trainer import (
    BASELINE_STEP,
    CheckpointStore,
    PipelineData,
    PipelineSettings,
    StepConfig,
    default_step_config,
    run_pipeline,
    should_stop,
    step2_dev_set,
    train_baseline,
    train_step,
)

from . import synthtask


class TestShouldStop:
    def test_five_flat_after_minimum(self):
        assert should_stop([1.0, 0.9, 0.95, 0.94, 0.93, 0.92, 0.91], 5) is True

    def test_strictly_decreasing_never_stops(self):
        seq = [1.0 - 0.01 * i for i in range(50)]
        for patience in (1, 3, 5):
            assert should_stop(seq, patience) is False

    def test_plateau_counts_toward_patience(self):
        assert should_stop([0.5] * 6, 5) is True
        assert should_stop([0.5] * 5, 5) is False

    def test_empty_history(self):
        assert should_stop([], 5) is False

    def test_monotone_once_true_stays_true(self):
        rng = Xoshiro256(44)
        for _ in range(500):
            n = 1 + rng.below(20)
            seq = [rng.below(1000) / 1000.0 for _ in range(n)]
            patience = 1 + rng.below(5)
            if not should_stop(seq, patience):
                continue
            extension = seq + [min(seq) + 0.001 + rng.below(100) / 1000.0]
            assert should_stop(extension, patience)


def _mini_task():
    return synthtask.build_task(
        seed=8,
        id_pairs=("en-de", "en-zh"),
        zero_pairs=(),
        sizes=synthtask.TaskSizes(id_train=60, id_dev=24, id_test=30,
                                  ood_train=150, ood_dev=40, ood_test=40),
    )


def _backend_options(task):
    return {"seed": 7, "hidden_width": 16, "vocab_words": task.vocab_words()}


def _cfg(step_id, **kw):
    defaults = dict(eval_interval=5, patience=3, max_updates=40, batch_size=8, seed=8)
    defaults.update(kw)
    return StepConfig(step_id=step_id, **defaults)


class TestTrainStep:
    def test_history_cadence_and_best_selection(self):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        ckpt, history = train_step(model, task.id_data["en-de"]["train"],
                                   task.id_data["en-de"]["dev"], _cfg(1))
        assert history
        for i, record in enumerate(history, start=1):
            assert record.update_count == i * 5
        best = min(r.dev_loss for r in history)
        assert any(r.dev_loss == best for r in history)
        assert ckpt.manifest["step_id"] == 1
        assert ckpt.manifest["parent_checkpoint_id"] is None
        assert ckpt.manifest["train_lang_pairs"] == ["en-de"]
        assert ckpt.manifest["wall_clock_seconds"] > 0

    def test_max_updates_equal_interval_gives_one_eval(self):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        _, history = train_step(model, task.id_data["en-de"]["train"],
                                task.id_data["en-de"]["dev"],
                                _cfg(1, eval_interval=10, max_updates=10))
        assert len(history) == 1
        assert history[0].update_count == 10

    def test_determinism(self):
        task = _mini_task()
        runs = []
        for _ in range(2):
            model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
            ckpt, history = train_step(model, task.id_data["en-de"]["train"],
                                       task.id_data["en-de"]["dev"], _cfg(1))
            runs.append((ckpt, history))
        (a, ha), (b, hb) = runs
        assert [(r.update_count, r.dev_loss, r.dev_pearson) for r in ha] == \
               [(r.update_count, r.dev_loss, r.dev_pearson) for r in hb]
        for name, p in a.model.parameters().items():
            assert np.array_equal(p, b.model.parameters()[name])
        assert a.checkpoint_id == b.checkpoint_id

    def test_lineage_violation_fresh_for_step3(self):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        with pytest.raises(ValidationError, match="lineage violation"):
            train_step(model, task.id_data["en-de"]["train"],
                       task.id_data["en-de"]["dev"], _cfg(3))

    def test_lineage_violation_step1_to_step3(self):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        ckpt1, _ = train_step(model, task.ood_data["train"], task.ood_data["dev"], _cfg(1))
        with pytest.raises(ValidationError, match="lineage violation"):
            train_step(ckpt1, task.id_data["en-de"]["train"],
                       task.id_data["en-de"]["dev"], _cfg(3))

    def test_constant_labels_record_undefined_pearson(self):
        task = _mini_task()
        const_dev = [
            QESample(src=s.src, tgt=s.tgt, label=0.5, lang_pair=s.lang_pair,
                     domain=s.domain) for s in task.id_data["en-de"]["dev"]
        ]
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        ckpt, history = train_step(model, task.id_data["en-de"]["train"],
                                   const_dev, _cfg(1, max_updates=10, eval_interval=5))
        assert all(r.dev_pearson is None for r in history)

    def test_empty_dataset_rejected(self):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        with pytest.raises(ValidationError, match="empty"):
            train_step(model, [], task.id_data["en-de"]["dev"], _cfg(1))

    def test_parent_checkpoint_not_mutated(self):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        ckpt1, _ = train_step(model, task.ood_data["train"], task.ood_data["dev"], _cfg(1))
        before = {k: v.copy() for k, v in ckpt1.model.parameters().items()}
        train_step(ckpt1, task.id_data["en-de"]["train"],
                   task.id_data["en-de"]["dev"], _cfg(2))
        for name, p in ckpt1.model.parameters().items():
            assert np.array_equal(p, before[name])


class TestBaseline:
    def test_manifest_marker(self):
        task = _mini_task()
        ckpt = train_baseline(task.id_data["en-de"]["train"], task.id_data["en-de"]["dev"],
                              _cfg(BASELINE_STEP), backend_options=_backend_options(task))
        assert ckpt.manifest["step_id"] == BASELINE_STEP
        assert ckpt.manifest["parent_checkpoint_id"] is None

    def test_differs_from_lineage_run(self):
        task = _mini_task()
        baseline = train_baseline(task.id_data["en-de"]["train"], task.id_data["en-de"]["dev"],
                                  _cfg(BASELINE_STEP), backend_options=_backend_options(task))
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        ckpt1, _ = train_step(model, task.ood_data["train"], task.ood_data["dev"], _cfg(1))
        ckpt2, _ = train_step(ckpt1, task.ood_data["train"] + task.id_data["en-de"]["train"],
                              task.id_data["en-de"]["dev"], _cfg(2))
        ckpt3, _ = train_step(ckpt2, task.id_data["en-de"]["train"],
                              task.id_data["en-de"]["dev"], _cfg(3))
        assert not np.array_equal(baseline.model.head_w, ckpt3.model.head_w)


class TestDefaults:
    def test_default_eval_intervals(self):
        assert default_step_config(1).eval_interval == 1000
        assert default_step_config(2).eval_interval == 500
        assert default_step_config(3).eval_interval == 500
        assert default_step_config(BASELINE_STEP).eval_interval == 500

    def test_default_patience_is_5(self):
        for sid in (1, 2, 3, BASELINE_STEP):
            assert default_step_config(sid).patience == 5

    def test_validation(self):
        with pytest.raises(ValidationError):
            StepConfig(step_id=4, eval_interval=10)
        with pytest.raises(ValidationError):
            StepConfig(step_id=1, eval_interval=0)
        with pytest.raises(ValidationError):
            StepConfig(step_id=1, eval_interval=10, patience=0)


class TestPipeline:
    def _settings(self, task, **kw):
        defaults = dict(
            tag_mode=TagMode.NOTAG,
            backend_options=_backend_options(task),
            seed=8,
            step_configs={
                1: _cfg(1, max_updates=30),
                2: _cfg(2, max_updates=30),
                3: _cfg(3, max_updates=30),
            },
        )
        defaults.update(kw)
        return PipelineSettings(**defaults)

    def _data(self, task):
        return PipelineData(
            ood_train=task.ood_data["train"],
            ood_dev=task.ood_data["dev"],
            id_train={p: task.id_data[p]["train"] for p in task.id_pairs},
            id_dev={p: task.id_data[p]["dev"] for p in task.id_pairs},
        )

    def test_lineage_chain(self):
        task = _mini_task()
        result = run_pipeline(self._data(task), self._settings(task))
        assert result.step1.manifest["parent_checkpoint_id"] is None
        assert result.step2.manifest["parent_checkpoint_id"] == result.step1.checkpoint_id
        for pair, ckpt3 in result.step3.items():
            assert ckpt3.manifest["parent_checkpoint_id"] == result.step2.checkpoint_id
            assert ckpt3.manifest["step_id"] == 3
        assert set(result.step3) == set(task.id_pairs)

    def test_timing_report_covers_steps(self):
        task = _mini_task()
        result = run_pipeline(self._data(task), self._settings(task))
        assert "step1" in result.timing_seconds
        assert "step2" in result.timing_seconds
        assert all(f"step3-{p}" in result.timing_seconds for p in task.id_pairs)

    def test_reuse_loads_cached_steps(self, tmp_path):
        task = _mini_task()
        store = CheckpointStore(tmp_path / "cache")
        settings = self._settings(task)
        data = self._data(task)
        first = run_pipeline(data, settings, cache=store)
        second = run_pipeline(data, settings, cache=store, reuse=True)
        assert second.timing_seconds["step1"] == 0.0
        assert second.timing_seconds["step2"] == 0.0
        assert second.step1.checkpoint_id == first.step1.checkpoint_id
        # step 3 still trains per language pair
        assert set(second.step3) == set(task.id_pairs)

    def test_reuse_without_cache_rejected(self):
        task = _mini_task()
        with pytest.raises(ValidationError, match="manifest|cache"):
            run_pipeline(self._data(task), self._settings(task), cache=None, reuse=True)

    def test_reuse_with_empty_cache_names_key(self, tmp_path):
        task = _mini_task()
        store = CheckpointStore(tmp_path / "cache")
        with pytest.raises(ValidationError, match="step-1 checkpoint under key"):
            run_pipeline(self._data(task), self._settings(task), cache=store, reuse=True)

    def test_step2_dev_set_proportions(self):
        task = _mini_task()
        data = self._data(task)
        dev = step2_dev_set(data, ood_ratio=1.0, seed=8)
        n_id = sum(len(v) for v in data.id_dev.values())
        assert len(dev) == n_id + min(n_id, len(data.ood_dev))
        assert sum(1 for s in dev if s.domain == DOMAIN_OOD) == min(n_id, len(data.ood_dev))


class TestCheckpointStore:
    def test_round_trip(self, tmp_path):
        task = _mini_task()
        model = build_qe_model("toy", _backend_options(task), TagMode.NOTAG)
        ckpt, _ = train_step(model, task.id_data["en-de"]["train"],
                             task.id_data["en-de"]["dev"], _cfg(1, max_updates=10))
        store = CheckpointStore(tmp_path)
        store.save("abc123", ckpt)
        loaded = store.load("abc123")
        assert loaded.manifest == ckpt.manifest
        for name, p in ckpt.model.parameters().items():
            assert np.array_equal(p, loaded.model.parameters()[name])

    def test_missing_key(self, tmp_path):
        store = CheckpointStore(tmp_path)
        with pytest.raises(ValidationError, match="no cached checkpoint"):
            store.load("nope")
