from __future__ import annotations

import numpy as np
import pytest

from qeforge.errors import ValidationError
from qeforge.modeling import (
    MAX_RENDERED_TOKENS,
    QEModel,
    TagMode,
    extend_vocabulary,
    forward,
    mse_loss,
    render_input,
    save_model,
    load_model,
    toy_encoder,
)
from qeforge.prng import Xoshiro256


class TestRenderInput:
    def test_tag_mode_id(self):
        assert render_input("Hallo", "Hello", "ID", TagMode.TAG) == "<s> Hallo </s> Hello <ID> </s>"

    def test_tag_mode_ood(self):
        assert render_input("Hallo", "Hello", "OOD", TagMode.TAG) == "<s> Hallo </s> Hello <OOD> </s>"

    def test_notag_mode(self):
        assert render_input("Hallo", "Hello", "ID", TagMode.NOTAG) == "<s> Hallo </s> Hello </s>"

    def test_injective_over_src_tgt_tag(self):
        seen = {}
        rng = Xoshiro256(3)
        words = ["alpha", "beta", "gamma", "delta"]
        for _ in range(300):
            src = " ".join(words[rng.below(4)] for _ in range(1 + rng.below(3)))
            tgt = " ".join(words[rng.below(4)] for _ in range(1 + rng.below(3)))
            domain = "ID" if rng.below(2) else "OOD"
            rendered = render_input(src, tgt, domain, TagMode.TAG)
            key = (src, tgt, domain)
            if rendered in seen:
                assert seen[rendered] == key
            seen[rendered] = key


class TestVocabulary:
    def test_extend_grows_count(self):
        enc = toy_encoder(seed=1, hidden_width=16)
        before = enc.vocab_size
        extend_vocabulary(enc, ["<ID>", "<OOD>"])
        assert enc.vocab_size == before + 2

    def test_extend_preserves_existing_rows_bitwise(self):
        enc = toy_encoder(seed=1, hidden_width=16)
        rows_before = enc.params["embeddings"].copy()
        extend_vocabulary(enc, ["<ID>", "<OOD>"])
        assert np.array_equal(enc.params["embeddings"][: len(rows_before)], rows_before)

    def test_duplicate_tag_rejected(self):
        enc = toy_encoder(seed=1, hidden_width=16)
        extend_vocabulary(enc, ["<ID>"])
        with pytest.raises(ValidationError, match="already in vocabulary"):
            extend_vocabulary(enc, ["<ID>"])

    def test_tags_tokenize_as_single_items(self):
        enc = toy_encoder(seed=1, hidden_width=16)
        extend_vocabulary(enc, ["<ID>", "<OOD>"])
        ids = enc.token_ids("<s> a </s> b <ID> </s>")
        assert len(ids) == 1 + 1 + 1 + 1 + 1 + 1  # one id per template token ("a"/"b" are single bytes)

    def test_byte_fallback_covers_unknown_words(self):
        enc = toy_encoder(seed=1, hidden_width=16)
        ids = enc.token_ids("äußerst")
        assert ids  # every UTF-8 byte has a token
        assert all(0 <= i < enc.vocab_size for i in ids)


class TestForward:
    def _model(self, vocab=None):
        return QEModel.fresh(toy_encoder(seed=5, hidden_width=16, vocab_words=vocab))

    def test_shape(self):
        model = self._model()
        preds = forward(model, ["<s> a </s> b </s>", "<s> c </s> d </s>", "<s> e </s> f </s>"])
        assert preds.shape == (3,)

    def test_batching_invariance(self):
        model = self._model()
        x = "<s> hello </s> world </s>"
        y = "<s> other </s> text </s>"
        solo = forward(model, [x])[0]
        batched = forward(model, [x, y])[0]
        assert solo == pytest.approx(batched, abs=1e-6)

    def test_permutation_equivariance(self):
        model = self._model()
        batch = [f"<s> w{i} </s> v{i} </s>" for i in range(5)]
        preds = forward(model, batch)
        rev = forward(model, list(reversed(batch)))
        assert np.allclose(preds[::-1], rev)

    def test_deterministic_across_constructions(self):
        a = self._model()
        b = self._model()
        x = ["<s> determinism </s> check </s>"]
        assert forward(a, x)[0] == forward(b, x)[0]

    def test_frozen_reference_prediction(self):
        # determinism harness: value captured at first run and frozen
        model = QEModel.fresh(toy_encoder(seed=11, hidden_width=16))
        got = forward(model, ["<s> ab </s> cd </s>"])[0]
        assert got == -0.002635660874789826

    def test_empty_batch_rejected(self):
        with pytest.raises(ValidationError, match="empty batch"):
            forward(self._model(), [])

    def test_truncation_keeps_template_tail(self):
        enc = toy_encoder(seed=5, hidden_width=16)
        extend_vocabulary(enc, ["<ID>", "<OOD>"])
        model = QEModel.fresh(enc)
        long_tgt = " ".join("tok" for _ in range(3 * MAX_RENDERED_TOKENS))
        rendered = render_input("short source", long_tgt, "ID", TagMode.TAG)
        ids = enc._truncate(enc.token_ids(rendered))
        assert len(ids) == MAX_RENDERED_TOKENS
        assert enc._tokens[ids[-1]] == "</s>"
        assert enc._tokens[ids[-2]] == "<ID>"
        # prediction still works
        assert np.isfinite(forward(model, [rendered])[0])


class TestLoss:
    def test_zero_when_equal(self):
        assert mse_loss([0.1, 0.2], [0.1, 0.2]) == 0.0

    def test_unit_offset(self):
        assert mse_loss([1.0, 2.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_hand_case(self):
        assert mse_loss([0.0, 1.0], [1.0, 0.0]) == pytest.approx(1.0)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            mse_loss([1.0], [1.0, 2.0])


class TestGradients:
    def _setup(self):
        enc = toy_encoder(seed=9, hidden_width=16, vocab_words=["alpha", "beta", "gamma"])
        extend_vocabulary(enc, ["<ID>", "<OOD>"])
        model = QEModel.fresh(enc)
        batch = [
            "<s> alpha beta </s> gamma <ID> </s>",
            "<s> beta </s> alpha alpha <OOD> </s>",
            "<s> gamma gamma </s> beta <ID> </s>",
            "<s> alpha </s> unseen-word <ID> </s>",
        ]
        labels = np.array([0.2, 0.9, 0.4, 0.6])
        return model, batch, labels

    def test_head_gradients_match_finite_differences(self):
        model, batch, labels = self._setup()
        _, grads = model.loss_and_grads(batch, labels)
        eps = 1e-4
        for k in range(len(model.head_w)):
            model.head_w[k] += eps
            up, _ = model.loss_and_grads(batch, labels)
            model.head_w[k] -= 2 * eps
            down, _ = model.loss_and_grads(batch, labels)
            model.head_w[k] += eps
            fd = (up - down) / (2 * eps)
            assert grads["head_w"][k] == pytest.approx(fd, rel=1e-3, abs=1e-10)

    def test_all_parameter_groups_match_finite_differences(self):
        model, batch, labels = self._setup()
        _, grads = model.loss_and_grads(batch, labels)
        params = model.parameters()
        rng = Xoshiro256(4)
        eps = 1e-4
        for name, tensor in params.items():
            flat = tensor.reshape(-1)
            gflat = grads[name].reshape(-1)
            n_coords = min(32, flat.size)
            coords = sorted({rng.below(flat.size) for _ in range(n_coords * 2)})[:n_coords]
            for k in coords:
                orig = flat[k]
                flat[k] = orig + eps
                up, _ = model.loss_and_grads(batch, labels)
                flat[k] = orig - eps
                down, _ = model.loss_and_grads(batch, labels)
                flat[k] = orig
                fd = (up - down) / (2 * eps)
                if abs(fd) < 1e-12 and abs(gflat[k]) < 1e-12:
                    continue
                assert gflat[k] == pytest.approx(fd, rel=1e-3, abs=1e-9), (name, k)


class TestRoundTrip:
    def test_save_load_preserves_predictions(self, tmp_path):
        enc = toy_encoder(seed=3, hidden_width=16, vocab_words=["w1", "w2"])
        extend_vocabulary(enc, ["<ID>", "<OOD>"])
        model = QEModel.fresh(enc)
        batch = ["<s> w1 </s> w2 <ID> </s>", "<s> w2 w2 </s> w1 <OOD> </s>"]
        before = forward(model, batch)
        save_model(model, tmp_path / "ckpt")
        loaded = load_model(tmp_path / "ckpt")
        after = forward(loaded, batch)
        assert np.array_equal(before, after)
        assert loaded.backend.vocab == enc.vocab
