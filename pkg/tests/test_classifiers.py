"""
Tests for the nearest-neighbour, logistic regression, MLP and random
feature classifiers.
"""

import numpy as np
import pytest

from src.classifiers import (
    accuracy,
    create_random_net,
    init_mlp,
    knn_classify,
    load_mlp,
    logreg_loss_and_gradient,
    mlp_hidden,
    mlp_hidden_jacobian,
    mlp_loss_and_gradients,
    random_features,
    random_features_jacobian,
    save_mlp,
    train_logreg,
    train_mlp,
)
from src.utils.errors import MissingArtifactError, NonGenericInputError, StaleArtifactError, ZeroVectorError


def numeric_jacobian(f, x, eps=1e-6):
    columns = []
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = eps
        columns.append((f(x + step) - f(x - step)) / (2 * eps))
    return np.stack(columns, axis=1)


class TestKNN:
    def test_recovers_training_labels(self, rng):
        train = rng.standard_normal((30, 5))
        labels = np.arange(30) % 10

        np.testing.assert_array_equal(knn_classify(train, labels, train), labels)

    def test_nearest_point(self):
        train = np.array([[0.0, 0.0], [10.0, 0.0]])
        labels = np.array([3, 7])

        np.testing.assert_array_equal(knn_classify(train, labels, [[9.0, 1.0], [1.0, -1.0]]), [7, 3])

    def test_ties_go_to_lowest_index(self):
        train = np.array([[1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
        labels = np.array([4, 5, 6])

        assert knn_classify(train, labels, [[1.0, 0.0]])[0] == 4
        assert knn_classify(train, labels, [[0.0, 1.0]])[0] == 4

    def test_cosine_ignores_scale(self):
        train = np.array([[1.0, 0.0], [0.0, 1.0]])
        labels = np.array([0, 1])

        predicted = knn_classify(train, labels, [[100.0, 1.0], [0.1, 5.0]], metric="cosine")
        np.testing.assert_array_equal(predicted, [0, 1])

    def test_cosine_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            knn_classify(np.eye(2), [0, 1], [[0.0, 0.0]], metric="cosine")

    def test_block_size_does_not_change_predictions(self, rng):
        train = rng.standard_normal((50, 8))
        labels = rng.integers(10, size=50)
        queries = rng.standard_normal((37, 8))

        expected = knn_classify(train, labels, queries, block_size=1024)
        np.testing.assert_array_equal(knn_classify(train, labels, queries, block_size=5), expected)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            knn_classify(np.zeros((0, 2)), [], [[0.0, 0.0]])
        with pytest.raises(ValueError):
            knn_classify(np.eye(2), [0, 1], [[0.0, 0.0, 0.0]])
        with pytest.raises(ValueError):
            knn_classify(np.eye(2), [0], [[0.0, 0.0]])


def test_accuracy():
    assert accuracy([1, 2, 3, 4], [1, 2, 0, 0]) == 0.5
    assert accuracy([], []) == 0.0
    with pytest.raises(ValueError):
        accuracy([1, 2], [1])


class TestLogisticRegression:
    def test_gradient_matches_finite_differences(self, rng):
        X = rng.standard_normal((12, 4))
        y = rng.integers(3, size=12)
        W = rng.standard_normal((3, 4))
        b = rng.standard_normal(3)

        _, dW, db = logreg_loss_and_gradient(W, b, X, y, lam_w=0.1)

        def loss_of_w(flat):
            return logreg_loss_and_gradient(flat.reshape(3, 4), b, X, y, 0.1)[0]

        def loss_of_b(vector):
            return logreg_loss_and_gradient(W, vector, X, y, 0.1)[0]

        eps = 1e-6
        numeric_w = np.array([
            (loss_of_w(W.ravel() + eps * e) - loss_of_w(W.ravel() - eps * e)) / (2 * eps)
            for e in np.eye(12)
        ])
        numeric_b = np.array([(loss_of_b(b + eps * e) - loss_of_b(b - eps * e)) / (2 * eps) for e in np.eye(3)])

        np.testing.assert_allclose(dW.ravel(), numeric_w, atol=1e-6)
        np.testing.assert_allclose(db, numeric_b, atol=1e-6)

    def test_separable_data(self, rng):
        centers = 4.0 * np.eye(3)
        y = np.repeat(np.arange(3), 20)
        X = centers[y] + 0.3 * rng.standard_normal((60, 3))

        model = train_logreg(X, y, lam_w=1e-3, max_steps=2000, classes=3)

        assert accuracy(model.predict(X), y) == 1.0
        assert model.steps > 0
        assert np.isfinite(model.loss)

    def test_weight_decay_shrinks_weights(self, rng):
        y = np.repeat(np.arange(2), 15)
        X = np.where(y[:, None] == 0, -1.0, 1.0) + 0.5 * rng.standard_normal((30, 2))

        weak = train_logreg(X, y, lam_w=1e-4, max_steps=1000, classes=2)
        strong = train_logreg(X, y, lam_w=1.0, max_steps=1000, classes=2)

        assert np.linalg.norm(strong.W) < np.linalg.norm(weak.W)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError, match="lam_w"):
            train_logreg(np.eye(2), [0, 1], lam_w=-1.0)
        with pytest.raises(ValueError):
            train_logreg(np.zeros((0, 2)), [], lam_w=0.1)


class TestMLP:
    def test_gradients_match_finite_differences(self, rng):
        mlp = init_mlp(5, hidden=4, classes=3, seed=1)
        mlp.b1 = np.full(4, 0.1)
        X = rng.standard_normal((6, 5))
        y = rng.integers(3, size=6)

        _, gradients = mlp_loss_and_gradients(mlp, X, y)

        eps = 1e-6
        for name in ("W1", "b1", "W2", "b2"):
            param = getattr(mlp, name)
            numeric = np.zeros_like(param)
            for index in np.ndindex(param.shape):
                original = param[index]
                param[index] = original + eps
                plus = mlp_loss_and_gradients(mlp, X, y)[0]
                param[index] = original - eps
                minus = mlp_loss_and_gradients(mlp, X, y)[0]
                param[index] = original
                numeric[index] = (plus - minus) / (2 * eps)
            np.testing.assert_allclose(gradients[name], numeric, atol=1e-6, err_msg=name)

    def test_training_beats_chance(self, splits):
        train, validation = splits
        mlp = train_mlp(train, seed=0, validation_set=validation, hidden=32, schedule=((400, 0.1),), batch_size=16)

        assert mlp.train_accuracy > 0.2
        assert mlp.validation_accuracy is not None
        assert [entry["step"] for entry in mlp.log] == [100, 200, 300, 400]

    def test_training_is_deterministic(self, splits):
        a = train_mlp(splits[0], seed=3, hidden=8, schedule=((20, 0.1),), batch_size=8)
        b = train_mlp(splits[0], seed=3, hidden=8, schedule=((20, 0.1),), batch_size=8)

        np.testing.assert_array_equal(a.W1, b.W1)

    def test_hidden_jacobian(self, rng):
        mlp = init_mlp(6, hidden=5, seed=2)
        x = rng.standard_normal(6)

        J = mlp_hidden_jacobian(x, mlp)

        np.testing.assert_allclose(J, numeric_jacobian(lambda v: mlp_hidden(v, mlp), x), atol=1e-6)

    def test_hidden_jacobian_at_a_kink(self):
        mlp = init_mlp(3, hidden=2, seed=0)
        mlp.W1[0] = 0.0

        with pytest.raises(NonGenericInputError):
            mlp_hidden_jacobian(np.ones(3), mlp)

    def test_save_and_load(self, tmp_path):
        mlp = init_mlp(4, hidden=3, seed=0)
        mlp.train_accuracy = 0.5
        path = save_mlp(tmp_path / "mlp.npz", mlp, seed=0, stage_hash="abc")

        loaded = load_mlp(path, expected_hash="abc")

        np.testing.assert_array_equal(loaded.W1, mlp.W1)
        assert loaded.train_accuracy == 0.5
        with pytest.raises(StaleArtifactError):
            load_mlp(path, expected_hash="other")
        with pytest.raises(MissingArtifactError):
            load_mlp(tmp_path / "absent.npz")


class TestRandomFeatures:
    def test_features_are_nonnegative(self, rng):
        net = create_random_net(m=16, width=20, seed=0)
        features = random_features(rng.standard_normal((3, 16)), net)

        assert features.shape == (3, 20)
        assert np.all(features >= 0)

    def test_seeded(self):
        a = create_random_net(m=8, width=10, seed=5)
        b = create_random_net(m=8, width=10, seed=5)

        np.testing.assert_array_equal(a.W2, b.W2)

    def test_jacobian_matches_finite_differences(self, rng):
        net = create_random_net(m=16, width=20, seed=1, dtype=np.float64)
        x = rng.standard_normal(16)

        J = random_features_jacobian(x, net)

        np.testing.assert_allclose(J, numeric_jacobian(lambda v: random_features(v, net), x), atol=1e-5)

    def test_zero_input_is_non_generic(self):
        net = create_random_net(m=4, width=6, seed=0)

        with pytest.raises(NonGenericInputError):
            random_features_jacobian(np.zeros(4), net)

    def test_weights_are_frozen(self):
        net = create_random_net(m=4, width=6, seed=0)

        with pytest.raises(ValueError):
            net.W1[0, 0] = 1.0
