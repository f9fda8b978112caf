"""
Exact sparse inference.

ISTA with per-image adaptive learning rates runs until every code satisfies
the fixed-point conditions of the shrinkage map. At each check the current
support and sign pattern is "polished" through the closed-form active
solution, which makes converged codes exact to machine precision.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from src.coding.ista import RATE_DECREASE, RATE_INCREASE, ista_step
from src.coding.types import Dictionary, Precision, SparseCode, uniqueness_check
from src.utils.errors import InferenceNotConvergedError, RankDeficientError

logger = logging.getLogger(__name__)

INACTIVE_TOLERANCE = 1e-5
ACTIVE_TOLERANCE = 1e-4
MAX_CONDITION = 1e12
DEFAULT_CHECK_EVERY = 10_000
DEFAULT_MAX_ITERS = 1_000_000

DictionaryLike = Union[Dictionary, np.ndarray]


def _atoms(D: DictionaryLike) -> np.ndarray:
    return D.atoms if isinstance(D, Dictionary) else np.asarray(D, dtype=np.float64)


def _code_vector(code: Union[SparseCode, np.ndarray]) -> np.ndarray:
    return code.r if isinstance(code, SparseCode) else np.asarray(code, dtype=np.float64)


def solve_gram(D_plus: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve (D_+^T D_+) z = rhs without forming an explicit inverse.

    Raises:
        RankDeficientError: If the Gram matrix is singular or its condition
            number exceeds 1e12
    """
    gram = D_plus.T @ D_plus
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise RankDeficientError(
            f"Active dictionary of {D_plus.shape[1]} filters is rank deficient "
            f"(Gram condition number {condition:.3e})"
        )
    return scipy.linalg.solve(gram, rhs, assume_a="pos")


def active_solution(
    x: np.ndarray,
    D: DictionaryLike,
    active: Sequence[int],
    signs: Sequence[float],
    lam: float,
) -> np.ndarray:
    """
    Locally linear solution on a fixed support and sign pattern.

        r_+ = (D_+^T D_+)^{-1} (D_+^T x - lam s_+)

    Args:
        x: length-m image
        D: m x n dictionary
        active: Indices of the active filters
        signs: Signs of the active coefficients
        lam: Sparsity weight

    Returns:
        length-k vector r_+ (empty for an empty support)

    Raises:
        RankDeficientError: If D_+ does not have full column rank
    """
    atoms = _atoms(D)
    active = np.asarray(active, dtype=np.intp)
    if active.size == 0:
        return np.zeros(0)
    D_plus = atoms[:, active]
    rhs = D_plus.T @ np.asarray(x, dtype=np.float64) - lam * np.asarray(signs, dtype=np.float64)
    return solve_gram(D_plus, rhs)


def preactivation(x: np.ndarray, r: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Return d_i . x - sum_j d_i . d_j r_j for every unit i."""
    return D.T @ (np.asarray(x, dtype=np.float64) - D @ r)


def threshold_margin(
    x: np.ndarray,
    code: Union[SparseCode, np.ndarray],
    D: DictionaryLike,
    lam: float,
) -> float:
    """
    Distance of a code from the kink of the shrinkage map.

    The minimum over inactive units of lam - |preactivation| and over active
    units of |r_i|. Codes with a margin below 1e-6 are treated as non-generic.
    """
    atoms = _atoms(D)
    r = _code_vector(code)
    active = r != 0
    margins = []
    if np.any(~active):
        margins.append(np.min(lam - np.abs(preactivation(x, r, atoms)[~active])))
    if np.any(active):
        margins.append(np.min(np.abs(r[active])))
    return float(min(margins))


def check_fixed_point(
    x: np.ndarray,
    code: Union[SparseCode, np.ndarray],
    D: DictionaryLike,
    lam: float,
) -> Tuple[bool, Dict[str, float]]:
    """
    Check the convergence conditions of exact inference.

    (a) every inactive unit has |preactivation| - lam < 1e-5
    (b) ||r_+ - (D_+^T D_+)^{-1}(D_+^T x - lam s_+)|| / ||r_+|| < 1e-4

    Only (a) applies to the all-zero code.

    Args:
        x: length-m image
        code: SparseCode or length-n vector
        D: m x n dictionary
        lam: Sparsity weight

    Returns:
        (converged, {"inactive_excess": ..., "relative_residual": ...})

    Raises:
        RankDeficientError: If D_+^T D_+ is singular
    """
    atoms = _atoms(D)
    r = _code_vector(code)
    active = np.flatnonzero(r)
    inactive = np.setdiff1d(np.arange(r.shape[0]), active, assume_unique=True)

    excess = -np.inf
    if inactive.size:
        excess = float(np.max(np.abs(preactivation(x, r, atoms)[inactive]) - lam))

    residual = 0.0
    if active.size:
        r_plus = r[active]
        target = active_solution(x, atoms, active, np.sign(r_plus), lam)
        residual = float(np.linalg.norm(r_plus - target) / np.linalg.norm(r_plus))

    converged = excess < INACTIVE_TOLERANCE and residual < ACTIVE_TOLERANCE
    return converged, {"inactive_excess": excess, "relative_residual": residual}


def _polish(x: np.ndarray, r: np.ndarray, D: np.ndarray, lam: float) -> Optional[np.ndarray]:
    """Replace r by the exact solution on its support, or None if signs disagree."""
    active = np.flatnonzero(r)
    polished = np.zeros(r.shape[0])
    if active.size == 0:
        return polished
    signs = np.sign(r[active])
    try:
        r_plus = active_solution(x, D, active, signs, lam)
    except RankDeficientError:
        return None
    if np.any(np.sign(r_plus) != signs):
        return None
    polished[active] = r_plus
    return polished


def _row_objective(X: np.ndarray, R: np.ndarray, D: np.ndarray, lam: float) -> np.ndarray:
    residual = (R @ D.T - X).astype(np.float64)
    return 0.5 * np.sum(residual * residual, axis=1) + lam * np.sum(np.abs(R, dtype=np.float64), axis=1)


def infer_batch(
    X: np.ndarray,
    D: DictionaryLike,
    lam: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    check_every: int = DEFAULT_CHECK_EVERY,
    precision: Precision = Precision.SINGLE,
) -> List[SparseCode]:
    """
    Exact sparse codes for a batch of images.

    Args:
        X: T x m images
        D: m x n dictionary with unit-norm columns
        lam: Sparsity weight
        max_iters: ISTA iteration budget
        check_every: Iterations between fixed-point checks
        precision: Starting floating point mode; the whole batch moves to
            double precision when an unconverged objective stops decreasing

    Returns:
        One SparseCode per image, each carrying its threshold margin

    Raises:
        RankDeficientError: If two dictionary columns are duplicates or
            antipodal
        InferenceNotConvergedError: If some image has not converged after
            max_iters iterations
    """
    atoms64 = _atoms(D)
    X64 = np.atleast_2d(np.asarray(X, dtype=np.float64))
    T, n = X64.shape[0], atoms64.shape[1]
    if check_every < 1 or max_iters < 1:
        raise ValueError("max_iters and check_every must be at least 1")
    if n > 1 and uniqueness_check(atoms64) >= 1.0:
        raise RankDeficientError("Dictionary has duplicated or antipodal columns")

    precision = Precision(precision)
    dtype = precision.dtype
    atoms, Xw = atoms64.astype(dtype), X64.astype(dtype)
    R = np.zeros((T, n), dtype=dtype)
    eta = np.full(T, 1.0 / max(np.linalg.norm(atoms64, 2) ** 2, 1e-12))
    loss = _row_objective(Xw, R, atoms, lam)
    loss_at_check = loss.copy()

    results: List[Optional[np.ndarray]] = [None] * T
    pending = np.arange(T)
    residuals: Dict[int, Dict[str, float]] = {}

    for iteration in range(1, max_iters + 1):
        if pending.size == 0:
            break

        proposal = ista_step(R[pending], Xw[pending], atoms, lam, eta[pending])
        new_loss = _row_objective(Xw[pending], proposal, atoms, lam)
        accepted = new_loss < loss[pending]
        R[pending[accepted]] = proposal[accepted]
        loss[pending[accepted]] = new_loss[accepted]
        eta[pending] *= np.where(accepted, RATE_INCREASE, RATE_DECREASE)
        np.maximum(eta, np.finfo(np.float64).tiny, out=eta)

        if iteration % check_every and iteration != max_iters:
            continue

        still_pending = []
        for t in pending:
            r = R[t].astype(np.float64)
            for candidate in (_polish(X64[t], r, atoms64, lam), r):
                if candidate is None:
                    continue
                try:
                    converged, residuals[t] = check_fixed_point(X64[t], candidate, atoms64, lam)
                except RankDeficientError:
                    # intermediate iterates may have more active units than pixels
                    continue
                if converged:
                    results[t] = candidate
                    break
            if results[t] is None:
                still_pending.append(t)
        pending = np.asarray(still_pending, dtype=np.intp)
        logger.debug(f"Inference check at iteration {iteration}: {pending.size}/{T} images pending")

        if pending.size and precision is Precision.SINGLE:
            stalled = ~(loss[pending] < loss_at_check[pending])
            if np.any(stalled):
                logger.info(f"Inference stalled at iteration {iteration}; switching to double precision")
                precision = Precision.DOUBLE
                atoms, Xw, R = atoms64, X64, R.astype(np.float64)
                loss = _row_objective(Xw, R, atoms, lam)
        loss_at_check = loss.copy()

    if pending.size:
        report = [{"index": int(t), **residuals.get(int(t), {})} for t in pending]
        raise InferenceNotConvergedError(
            f"{pending.size} of {T} images did not reach the fixed point in {max_iters} iterations",
            residuals=report,
        )

    return [
        SparseCode.from_vector(r, margin=threshold_margin(X64[t], r, atoms64, lam))
        for t, r in enumerate(results)
    ]


def infer_exact(
    x: np.ndarray,
    D: DictionaryLike,
    lam: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    check_every: int = DEFAULT_CHECK_EVERY,
    precision: Precision = Precision.SINGLE,
) -> SparseCode:
    """
    Exact sparse code of a single image.

    Example:
        >>> code = infer_exact(images.image(0), dictionary, lam=0.3)
        >>> code.k, code.is_generic
    """
    return infer_batch(
        np.asarray(x, dtype=np.float64).reshape(1, -1),
        D,
        lam,
        max_iters=max_iters,
        check_every=check_every,
        precision=precision,
    )[0]


def stack_codes(codes: Sequence[SparseCode]) -> np.ndarray:
    """Stack codes into a T x n matrix."""
    if not codes:
        return np.zeros((0, 0))
    return np.vstack([code.r for code in codes])


def sparsity_stats(codes: Union[Sequence[SparseCode], np.ndarray]) -> Dict[str, Any]:
    """
    Fraction of nonzero units per image and on average.

    Returns:
        Dictionary with per-image ``active_fraction`` and the mean
        ``mean_active_fraction`` and ``mean_active`` over images
    """
    R = codes if isinstance(codes, np.ndarray) else stack_codes(codes)
    if R.size == 0:
        return {"active_fraction": np.zeros(0), "mean_active_fraction": 0.0, "mean_active": 0.0}
    counts = np.count_nonzero(R, axis=1)
    fraction = counts / R.shape[1]
    return {
        "active_fraction": fraction,
        "mean_active_fraction": float(fraction.mean()),
        "mean_active": float(counts.mean()),
    }
