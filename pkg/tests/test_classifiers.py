"""Classifiers: datasets, gradients vs finite differences, training, serving."""

import numpy as np
import pytest

from mutloc.classifiers import (
    LR,
    MLP,
    ClassifierModel,
    Dataset,
    TrainConfig,
    build_dataset,
    build_query_vector,
    load_model,
    lr_loss_and_grad,
    mlp_loss_and_grad,
    predict_scores,
    save_model,
    train_lr,
    train_mlp,
    training_accuracy,
)
from mutloc.errors import (
    EmptyDataset,
    InvalidConfig,
    InvalidObservation,
    ShapeError,
)
from mutloc.matrix import FailureObservation, KillMatrix, MutantRecord
from mutloc.ranking import Scope


def central_differences(loss_fn, params, step=1e-4):
    """Independent numerical gradient oracle."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            saved = p[idx]
            p[idx] = saved + step
            plus = loss_fn(params)
            p[idx] = saved - step
            minus = loss_fn(params)
            p[idx] = saved
            g[idx] = (plus - minus) / (2 * step)
        grads.append(g)
    return grads


class TestBuildDataset:
    def test_worked_example_layout(self, acme):
        data = build_dataset(acme)
        assert data.features.shape == (7, 4)
        assert data.features[0].tolist() == [0, 0, 0, 1]
        assert data.method_index == ("getType", "resolveType")
        assert data.labels.tolist() == [0, 0, 0, 0, 1, 1, 1]

    def test_duplicate_rows_are_kept(self, acme):
        data = build_dataset(acme)
        # m3 and m4 carry the same kill pattern and the same label
        assert np.array_equal(data.features[2], data.features[3])
        assert data.labels[2] == data.labels[3]

    def test_zero_mutants_rejected(self):
        empty = KillMatrix(["t1"], [], np.empty((0, 1), dtype=bool))
        with pytest.raises(EmptyDataset):
            build_dataset(empty)

    def test_zero_tests_rejected(self):
        no_tests = KillMatrix(
            [], [MutantRecord("m1", "f", "imported")], np.empty((1, 0), dtype=bool)
        )
        with pytest.raises(EmptyDataset):
            build_dataset(no_tests)


class TestGradients:
    def test_lr_matches_finite_differences(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            n, features, classes = 5, int(rng.integers(2, 7)), int(rng.integers(2, 5))
            X = (rng.random((n, features)) < 0.5).astype(float)
            y = rng.integers(0, classes, size=n)
            params = [rng.normal(0, 0.5, (classes, features)), rng.normal(0, 0.5, classes)]
            _, analytic = lr_loss_and_grad(params, X, y)
            numeric = central_differences(lambda p: lr_loss_and_grad(p, X, y)[0], params)
            for a, g in zip(analytic, numeric):
                np.testing.assert_allclose(a, g, rtol=1e-5, atol=1e-8)

    @pytest.mark.parametrize("activation", ["relu", "tanh"])
    def test_mlp_matches_finite_differences(self, activation):
        rng = np.random.default_rng(32)
        for _ in range(10):
            n, features = 5, int(rng.integers(2, 7))
            hidden, classes = int(rng.integers(1, 4)), int(rng.integers(2, 5))
            X = (rng.random((n, features)) < 0.5).astype(float)
            y = rng.integers(0, classes, size=n)
            params = [
                rng.normal(0, 0.5, (features, hidden)),
                rng.normal(0, 0.5, hidden),
                rng.normal(0, 0.5, (hidden, classes)),
                rng.normal(0, 0.5, classes),
            ]
            _, analytic = mlp_loss_and_grad(params, X, y, activation)
            numeric = central_differences(
                lambda p: mlp_loss_and_grad(p, X, y, activation)[0], params
            )
            for a, g in zip(analytic, numeric):
                np.testing.assert_allclose(a, g, rtol=1e-5, atol=1e-8)


def separable_dataset():
    rows = [[1.0, 0.0]] * 10 + [[0.0, 1.0]] * 10
    labels = [0] * 10 + [1] * 10
    return Dataset(
        np.array(rows), np.array(labels), ("method_a", "method_b"), ("t1", "t2")
    )


def xor_dataset():
    rows = ([[0.0, 0.0]] + [[1.0, 1.0]] + [[0.0, 1.0]] + [[1.0, 0.0]]) * 25
    labels = ([0] + [0] + [1] + [1]) * 25
    return Dataset(
        np.array(rows), np.array(labels), ("same", "diff"), ("t1", "t2")
    )


class TestTraining:
    def test_lr_separates_separable_data(self):
        model = train_lr(separable_dataset(), TrainConfig(seed=0))
        assert training_accuracy(model, separable_dataset()) == 1.0

    def test_mlp_learns_xor(self):
        data = xor_dataset()
        cfg = TrainConfig(hidden_size=8, max_iter=500, seed=0)
        model = train_mlp(data, cfg)
        assert training_accuracy(model, data) == 1.0

    def test_loss_decreases_on_worked_example(self, acme):
        data = build_dataset(acme)
        for trainer in (train_lr, train_mlp):
            model = trainer(data, TrainConfig(seed=1))
            assert len(model.loss_curve) == model.config.max_iter + 1
            assert model.final_loss < model.initial_loss

    def test_single_declared_class_is_certain(self):
        data = Dataset(
            np.array([[1.0, 0.0], [0.0, 1.0]]),
            np.array([0, 0]),
            ("only",),
            ("t1", "t2"),
        )
        model = train_lr(data, TrainConfig(seed=0))
        for vector in ([0, 0], [1, 0], [1, 1]):
            assert predict_scores(model, vector)["only"] == pytest.approx(1.0)

    def test_single_present_class_dominates(self):
        # Two declared methods, all training rows labelled with the first.
        data = Dataset(
            np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
            np.array([0, 0, 0]),
            ("hot", "cold"),
            ("t1", "t2"),
        )
        # The all-zero input only sees the bias gap, which grows slowly;
        # a longer, hotter run pushes it past the 0.99 line.
        model = train_lr(data, TrainConfig(max_iter=1000, learning_rate=0.1, seed=0))
        for vector in ([0, 0], [1, 0], [0, 1], [1, 1]):
            assert predict_scores(model, vector)["hot"] >= 0.99

    def test_invalid_hidden_size(self):
        with pytest.raises(InvalidConfig):
            TrainConfig(hidden_size=0)

    def test_determinism_same_seed_same_weights(self):
        data = xor_dataset()
        cfg = TrainConfig(hidden_size=4, max_iter=20, seed=9)
        a = train_mlp(data, cfg)
        b = train_mlp(data, cfg)
        for pa, pb in zip(a.params, b.params):
            assert np.array_equal(pa, pb)

    def test_different_seed_different_mlp(self):
        data = xor_dataset()
        a = train_mlp(data, TrainConfig(hidden_size=4, max_iter=20, seed=1))
        b = train_mlp(data, TrainConfig(hidden_size=4, max_iter=20, seed=2))
        assert any(not np.array_equal(pa, pb) for pa, pb in zip(a.params, b.params))

    def test_tanh_mlp_learns_xor_and_round_trips(self, tmp_path):
        data = xor_dataset()
        cfg = TrainConfig(hidden_size=8, max_iter=500, seed=0, activation="tanh")
        model = train_mlp(data, cfg)
        assert training_accuracy(model, data) == 1.0
        path = tmp_path / "tanh.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.config.activation == "tanh"
        assert predict_scores(loaded, [1.0, 0.0]) == predict_scores(model, [1.0, 0.0])

    def test_unknown_activation_rejected(self):
        with pytest.raises(InvalidConfig):
            TrainConfig(activation="sigmoid")


class TestPredict:
    def test_scores_sum_to_one(self, acme):
        data = build_dataset(acme)
        rng = np.random.default_rng(33)
        for trainer in (train_lr, train_mlp):
            model = trainer(data, TrainConfig(seed=4))
            for _ in range(20):
                vector = (rng.random(4) < 0.5).astype(float)
                scores = predict_scores(model, vector)
                assert sum(scores.values()) == pytest.approx(1.0, abs=1e-9)
                assert all(0.0 <= v <= 1.0 for v in scores.values())

    def test_lr_argmax_on_shared_pattern(self, acme):
        # (0,1,0,1) appears three times in training: twice as getType
        # (m3, m4), once as resolveType (m5); majority should win.
        model = train_lr(build_dataset(acme), TrainConfig(seed=0))
        scores = predict_scores(model, [0, 1, 0, 1])
        assert max(scores, key=scores.get) == "getType"

    def test_wrong_length_raises(self, acme):
        model = train_lr(build_dataset(acme), TrainConfig(seed=0))
        with pytest.raises(ShapeError):
            predict_scores(model, [1, 0])

    def test_permutation_equivariance_of_serving(self, acme):
        # Permuting a model's feature axis together with the query vector
        # must not change the scores.
        rng = np.random.default_rng(34)
        data = build_dataset(acme)
        for kind, trainer in ((LR, train_lr), (MLP, train_mlp)):
            model = trainer(data, TrainConfig(seed=5))
            perm = rng.permutation(len(model.test_index))
            if kind == LR:
                W, b = model.params
                params = (W[:, perm], b)
            else:
                W1, b1, W2, b2 = model.params
                params = (W1[perm, :], b1, W2, b2)
            permuted = ClassifierModel(
                kind,
                params,
                model.method_index,
                tuple(model.test_index[i] for i in perm),
                model.config,
                model.loss_curve,
            )
            vector = (rng.random(4) < 0.5).astype(float)
            direct = predict_scores(model, vector)
            via_perm = predict_scores(permuted, vector[perm])
            assert set(direct) == set(via_perm)
            for method in direct:
                assert direct[method] == pytest.approx(via_perm[method], rel=1e-12)

    def test_lr_training_equivariant_under_column_permutation(self, acme):
        # Zero init makes LR training itself permutation-equivariant.
        perm = [3, 0, 2, 1]
        permuted_matrix = acme.restrict([acme.tests[i] for i in perm])
        base = train_lr(build_dataset(acme), TrainConfig(seed=0))
        permuted = train_lr(build_dataset(permuted_matrix), TrainConfig(seed=0))
        vector = np.array([1.0, 0.0, 0.0, 1.0])
        a = predict_scores(base, vector)
        b = predict_scores(permuted, vector[perm])
        for method in a:
            assert a[method] == pytest.approx(b[method], rel=1e-12)


class TestQueryVector:
    def test_fp_encoding(self):
        obs = FailureObservation({"t1", "t4"}, {"t2", "t3"})
        vector = build_query_vector(obs, ["t1", "t2", "t3", "t4"], Scope.FP)
        assert vector.tolist() == [1.0, 0.0, 0.0, 1.0]

    def test_f_scope_all_ones(self):
        obs = FailureObservation({"t1", "t4"})
        vector = build_query_vector(obs, ["t1", "t4"], Scope.F)
        assert vector.tolist() == [1.0, 1.0]

    def test_fp_unclassified_test(self):
        obs = FailureObservation({"t1", "t4"}, {"t2"})
        with pytest.raises(InvalidObservation):
            build_query_vector(obs, ["t1", "t2", "t3", "t4"], Scope.FP)

    def test_f_scope_index_mismatch(self):
        obs = FailureObservation({"t1", "t4"})
        with pytest.raises(InvalidObservation):
            build_query_vector(obs, ["t1", "t2"], Scope.F)


class TestPersistence:
    @pytest.mark.parametrize("kind,trainer", [(LR, train_lr), (MLP, train_mlp)])
    def test_round_trip_preserves_predictions_exactly(self, tmp_path, acme, kind, trainer):
        model = trainer(build_dataset(acme), TrainConfig(seed=7))
        path = tmp_path / f"{kind}.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == model.kind
        assert loaded.test_index == model.test_index
        assert loaded.method_index == model.method_index
        rng = np.random.default_rng(35)
        for _ in range(10):
            vector = (rng.random(4) < 0.5).astype(float)
            assert predict_scores(loaded, vector) == predict_scores(model, vector)

    def test_serialisation_is_byte_identical(self, tmp_path, acme):
        data = build_dataset(acme)
        cfg = TrainConfig(seed=11)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_model(train_mlp(data, cfg), p1)
        save_model(train_mlp(data, cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()
