"""
Tests for the objective, shrinkage and the single optimizer steps.
"""

import numpy as np
import pytest

from src.coding import Dictionary, adapt_rate, dict_step, dictionary_gradient, ista_step, objective, shrink
from src.coding.types import normalize_columns, uniqueness_check
from src.utils.errors import DictionaryCollapseError


def test_objective_by_hand():
    X = np.array([[1.0, 0.0]])
    R = np.array([[0.5, 0.5]])

    assert objective(X, R, np.eye(2), lam=0.1) == pytest.approx(0.35)


def test_objective_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        objective(np.zeros((2, 3)), np.zeros((2, 4)), np.eye(3), 0.1)


@pytest.mark.parametrize(
    "u, theta, expected",
    [(2.0, 0.5, 1.5), (-2.0, 0.5, -1.5), (0.3, 0.5, 0.0), (-0.5, 0.5, 0.0), (1.0, 0.0, 1.0)],
)
def test_shrink(u, theta, expected):
    assert shrink(u, theta) == pytest.approx(expected)


def test_shrink_rejects_negative_threshold():
    with pytest.raises(ValueError):
        shrink(np.ones(3), -0.1)


def test_ista_step_matches_formula(small_dictionary, rng):
    D = small_dictionary.atoms
    x = rng.uniform(size=8)
    r = rng.standard_normal(12)

    expected = shrink(r - 0.05 * D.T @ (D @ r - x), 0.05 * 0.3)

    np.testing.assert_allclose(ista_step(r, x, D, 0.3, 0.05), expected)


def test_ista_step_per_image_rates(small_dictionary, rng):
    D = small_dictionary.atoms
    X = rng.uniform(size=(3, 8))
    R = rng.standard_normal((3, 12))
    etas = np.array([0.01, 0.02, 0.03])

    batch = ista_step(R, X, D, 0.3, etas)

    for t in range(3):
        np.testing.assert_allclose(batch[t], ista_step(R[t], X[t], D, 0.3, etas[t]))


def test_ista_step_rejects_nonpositive_rate(small_dictionary):
    with pytest.raises(ValueError):
        ista_step(np.zeros(12), np.zeros(8), small_dictionary.atoms, 0.3, 0.0)


def test_ista_fixed_point_of_exact_solution():
    # Orthonormal dictionary: the exact code is shrink(x, lam)
    x = np.array([1.0, -0.2, 0.5])
    r = shrink(x, 0.3)

    np.testing.assert_allclose(ista_step(r, x, np.eye(3), 0.3, 0.7), r)


def test_dictionary_gradient_finite_differences(small_dictionary, rng):
    D = small_dictionary.atoms.copy()
    X = rng.uniform(size=(5, 8))
    R = rng.standard_normal((5, 12))
    gradient = dictionary_gradient(D, X, R)

    def reconstruction(matrix):
        return objective(X, R, matrix, lam=0.0)

    eps = 1e-6
    for i, j in [(0, 0), (3, 7), (7, 11)]:
        bump = np.zeros_like(D)
        bump[i, j] = eps
        numeric = (reconstruction(D + bump) - reconstruction(D - bump)) / (2 * eps)
        assert gradient[i, j] == pytest.approx(numeric, rel=1e-5, abs=1e-7)


def test_dict_step_keeps_unit_columns(small_dictionary, rng):
    X = rng.uniform(size=(5, 8))
    R = rng.standard_normal((5, 12))

    updated = dict_step(small_dictionary.atoms, X, R, eta=0.1)

    np.testing.assert_allclose(np.linalg.norm(updated, axis=0), 1.0, atol=1e-12)


def test_dict_step_rejects_nonpositive_rate(small_dictionary):
    with pytest.raises(ValueError):
        dict_step(small_dictionary.atoms, np.zeros((1, 8)), np.zeros((1, 12)), eta=-1.0)


def test_normalize_columns_detects_collapse():
    with pytest.raises(DictionaryCollapseError):
        normalize_columns(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_adapt_rate():
    assert adapt_rate(10.0, 9.0, 0.1) == (True, pytest.approx(0.11))
    assert adapt_rate(10.0, 10.0, 0.1) == (False, pytest.approx(0.05))
    assert adapt_rate(10.0, float("nan"), 0.1) == (False, pytest.approx(0.05))


def test_dictionary_requires_unit_columns():
    with pytest.raises(ValueError, match="unit norm"):
        Dictionary(atoms=np.array([[2.0, 0.0], [0.0, 1.0]]), lam=0.1)


def test_uniqueness_check_flags_antipodal_columns():
    atoms = normalize_columns(np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]))

    assert uniqueness_check(atoms) == pytest.approx(1.0)
    assert uniqueness_check(np.eye(3)) == 0.0
