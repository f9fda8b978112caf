"""
Locally linear analysis of the image-to-code map.

Away from the shrinkage kinks the exact sparse code depends linearly on the
image through the active Jacobian (D_+^T D_+)^{-1} D_+^T, the pseudo-inverse
of the active dictionary.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from src.coding.inference import MAX_CONDITION
from src.coding.types import GENERIC_MARGIN, Dictionary, SparseCode
from src.perturbations.directions import PerturbationDirection
from src.utils.errors import DegenerateDirectionError, NonGenericInputError, RankDeficientError, SpectrumError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActiveJacobian:
    """
    Jacobian of the active code entries with respect to the image.

    Attributes:
        J: k x m matrix; rows follow ``active``
        active: Indices of the active units (rows of inactive units are zero)
        non_generic: True if the input sits within the generic margin of a kink
    """

    J: np.ndarray
    active: np.ndarray
    non_generic: bool = False

    @property
    def k(self) -> int:
        return self.J.shape[0]

    @property
    def m(self) -> int:
        return self.J.shape[1]

    def full(self, n: int) -> np.ndarray:
        """Embed into the n x m Jacobian of the full code."""
        full = np.zeros((n, self.m))
        full[self.active] = self.J
        return full


def pseudo_inverse(D_plus: np.ndarray) -> np.ndarray:
    """
    Left inverse (D_+^T D_+)^{-1} D_+^T through a thin SVD.

    Raises:
        RankDeficientError: If the Gram condition number exceeds 1e12
        SpectrumError: If the SVD fails
    """
    if D_plus.shape[1] > D_plus.shape[0]:
        raise RankDeficientError(
            f"{D_plus.shape[1]} active filters exceed the image dimension {D_plus.shape[0]}"
        )
    try:
        U, s, Vt = scipy.linalg.svd(D_plus, full_matrices=False, lapack_driver="gesdd")
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SpectrumError(f"SVD of the active dictionary failed: {e}") from e
    if s.size and (s[-1] == 0.0 or (s[0] / s[-1]) ** 2 > MAX_CONDITION):
        raise RankDeficientError(
            f"Active dictionary of {D_plus.shape[1]} filters is rank deficient "
            f"(smallest singular value {s[-1]:.3e})"
        )
    return (Vt.T / s) @ U.T


def active_jacobian(
    D: Union[Dictionary, np.ndarray],
    code: SparseCode,
    allow_non_generic: bool = False,
) -> ActiveJacobian:
    """
    Active Jacobian of an exact sparse code.

    Args:
        D: m x n dictionary
        code: Exact code of the image
        allow_non_generic: Return a flagged Jacobian instead of raising when
            the code is within the generic margin of a kink

    Returns:
        ActiveJacobian (0 x m for an empty active set)

    Raises:
        NonGenericInputError: If the code is non-generic and not allowed
        RankDeficientError: If D_+ does not have full column rank
    """
    atoms = D.atoms if isinstance(D, Dictionary) else np.asarray(D, dtype=np.float64)
    non_generic = not code.is_generic
    if non_generic and not allow_non_generic:
        raise NonGenericInputError(
            f"Code margin {code.margin:.3e} is below {GENERIC_MARGIN:g}; the map is not differentiable"
        )
    if code.k == 0:
        J = np.zeros((0, atoms.shape[0]))
    else:
        J = pseudo_inverse(atoms[:, code.active])
    return ActiveJacobian(J=J, active=code.active, non_generic=non_generic)


def directional_derivative(
    J: Union[ActiveJacobian, np.ndarray],
    delta: Union[PerturbationDirection, np.ndarray],
) -> float:
    """
    Norm of the directional derivative, ||J dx|| / ||dx||.

    Raises:
        DegenerateDirectionError: If the direction is zero
    """
    matrix = J.J if isinstance(J, ActiveJacobian) else np.asarray(J, dtype=np.float64)
    dx = delta.delta if isinstance(delta, PerturbationDirection) else np.asarray(delta, dtype=np.float64)
    norm = np.linalg.norm(dx)
    if norm == 0.0:
        raise DegenerateDirectionError("Directional derivative along a zero direction")
    if matrix.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(matrix @ dx) / norm)


def pair_gain(c: float) -> float:
    """
    Gain along the difference of two active filters with overlap c.

    Diverges as c approaches 1.

    Examples:
        >>> round(pair_gain(0.975), 4)
        6.3246
    """
    if not 0.0 <= c < 1.0:
        raise ValueError(f"overlap c must lie in [0, 1), got {c}")
    return float(1.0 / np.sqrt(1.0 - c))
