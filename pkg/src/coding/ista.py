"""
Building blocks of the alternating optimizer: the sparse coding objective,
soft thresholding, one ISTA step on the codes, one gradient step on the
dictionary and the accept/reject learning rate rule.

Images and codes are stored one per row: X is T x m, R is T x n, and the
dictionary D is m x n, so the reconstruction of all images is R D^T.
"""

from typing import Tuple, Union

import numpy as np

from src.coding.types import normalize_columns

RATE_INCREASE = 1.1
RATE_DECREASE = 0.5

ArrayOrFloat = Union[np.ndarray, float]


def _as_rows(array: np.ndarray) -> np.ndarray:
    array = np.asarray(array)
    return array[None, :] if array.ndim == 1 else array


def objective(X: np.ndarray, R: np.ndarray, D: np.ndarray, lam: float) -> float:
    """
    Sparse coding energy summed over images.

        sum_t 1/2 ||x(t) - D r(t)||^2 + lam ||r(t)||_1

    Args:
        X: T x m images (or a single length-m image)
        R: T x n codes (or a single length-n code)
        D: m x n dictionary
        lam: Sparsity weight

    Returns:
        Nonnegative objective value, accumulated in double precision

    Raises:
        ValueError: On incompatible shapes
    """
    X, R = _as_rows(X), _as_rows(R)
    if X.shape[0] != R.shape[0] or X.shape[1] != D.shape[0] or R.shape[1] != D.shape[1]:
        raise ValueError(
            f"Incompatible shapes X={X.shape}, R={R.shape}, D={D.shape}"
        )
    residual = (R @ D.T - X).astype(np.float64)
    return float(0.5 * np.sum(residual * residual) + lam * np.sum(np.abs(R, dtype=np.float64)))


def shrink(u: ArrayOrFloat, theta: ArrayOrFloat) -> ArrayOrFloat:
    """
    Soft-threshold u by theta.

    u - theta above the threshold, 0 inside [-theta, theta], u + theta below.

    Raises:
        ValueError: If theta is negative
    """
    if np.any(np.asarray(theta) < 0):
        raise ValueError("shrinkage threshold must be nonnegative")
    result = np.sign(u) * np.maximum(np.abs(u) - theta, 0.0)
    return float(result) if np.ndim(result) == 0 else result


def ista_step(
    r: np.ndarray,
    x: np.ndarray,
    D: np.ndarray,
    lam: float,
    eta: ArrayOrFloat
) -> np.ndarray:
    """
    One proximal gradient step on the codes.

        r' = shrink(r - eta * D^T (D r - x), eta * lam)

    Works on a single code or on a T x n batch. ``eta`` may be a scalar or a
    length-T vector of per-image rates.

    Raises:
        ValueError: If a learning rate is not positive
    """
    eta = np.asarray(eta, dtype=np.float64)
    if np.any(eta <= 0):
        raise ValueError("learning rate eta must be positive")

    single = np.ndim(r) == 1
    R, X = _as_rows(r), _as_rows(x)
    step = eta.reshape(-1, 1) if eta.ndim else eta
    gradient = (R @ D.T - X) @ D
    updated = shrink(R - step * gradient, step * lam).astype(R.dtype, copy=False)
    return updated[0] if single else updated


def dictionary_gradient(D: np.ndarray, X: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Gradient of sum_t 1/2 ||x(t) - D r(t)||^2 with respect to D (m x n)."""
    X, R = _as_rows(X), _as_rows(R)
    return (R @ D.T - X).T @ R


def dict_step(D: np.ndarray, X: np.ndarray, R: np.ndarray, eta: float) -> np.ndarray:
    """
    Gradient step on the reconstruction term followed by column renormalization.

    Raises:
        ValueError: If eta is not positive
        DictionaryCollapseError: If a column becomes exactly zero
    """
    if eta <= 0:
        raise ValueError("learning rate eta must be positive")
    updated = D - eta * dictionary_gradient(D, X, R).astype(D.dtype, copy=False)
    return normalize_columns(updated)


def adapt_rate(loss_prev: float, loss_new: float, eta: float) -> Tuple[bool, float]:
    """
    Accept/reject rule shared by every adaptive optimizer in the toolkit.

    A strict decrease is accepted and grows the rate by 1.1; a tie or an
    increase (including NaN) is rejected and halves the rate. The caller
    rolls the rejected update back.

    Returns:
        (accepted, new learning rate)

    Examples:
        >>> adapt_rate(10.0, 9.0, 0.1)
        (True, 0.11000000000000001)
        >>> adapt_rate(10.0, 10.0, 0.1)
        (False, 0.05)
    """
    if eta <= 0:
        raise ValueError("learning rate eta must be positive")
    if loss_new < loss_prev:
        return True, eta * RATE_INCREASE
    return False, eta * RATE_DECREASE
