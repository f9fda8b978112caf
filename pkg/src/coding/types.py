"""
Core types for sparse coding: the dictionary, per-image codes and the
state of the alternating optimizer.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from src.utils.errors import DictionaryCollapseError

NORM_TOLERANCE = 1e-9
GENERIC_MARGIN = 1e-6


class Precision(str, Enum):
    """Floating point mode of an optimizer."""
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def dtype(self) -> type:
        return np.float32 if self is Precision.SINGLE else np.float64


def normalize_columns(matrix: np.ndarray) -> np.ndarray:
    """
    Rescale every column to unit Euclidean norm.

    Raises:
        DictionaryCollapseError: If some column is exactly zero
    """
    norms = np.linalg.norm(matrix, axis=0)
    collapsed = np.flatnonzero(~(norms > 0.0))
    if collapsed.size:
        raise DictionaryCollapseError(
            f"Dictionary columns {collapsed[:10].tolist()} collapsed to zero"
        )
    return matrix / norms


@dataclass(frozen=True)
class Dictionary:
    """
    An m x n matrix of unit-norm filters together with its sparsity weight.

    Attributes:
        atoms: m x n matrix D whose columns d_i are the filters
        lam: Nonnegative sparsity weight used to learn and infer with D
    """

    atoms: np.ndarray
    lam: float

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=np.float64)
        if atoms.ndim != 2:
            raise ValueError(f"Dictionary must be a matrix, got shape {atoms.shape}")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        deviation = np.abs(np.linalg.norm(atoms, axis=0) - 1.0)
        if deviation.size and deviation.max() > NORM_TOLERANCE:
            raise ValueError(
                f"Dictionary columns must have unit norm (max deviation {deviation.max():.3e})"
            )
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, lam: float) -> "Dictionary":
        """Build a dictionary, normalizing the columns of ``matrix`` first."""
        return cls(atoms=normalize_columns(np.asarray(matrix, dtype=np.float64)), lam=lam)

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    def gram(self) -> np.ndarray:
        """Return D^T D."""
        return self.atoms.T @ self.atoms


@dataclass(frozen=True)
class SparseCode:
    """
    Sparse representation r of one image.

    Attributes:
        r: length-n coefficient vector
        active: indices of the nonzero entries of r
        signs: +1/-1 signs of the active entries (the vector s_+)
        margin: distance of the closest pre-activation to the shrinkage
            kink, or None when unknown
    """

    r: np.ndarray
    active: np.ndarray
    signs: np.ndarray
    margin: Optional[float] = None

    @classmethod
    def from_vector(cls, r: np.ndarray, margin: Optional[float] = None) -> "SparseCode":
        r = np.array(r, dtype=np.float64).reshape(-1)
        active = np.flatnonzero(r)
        signs = np.sign(r[active])
        r.setflags(write=False)
        return cls(r=r, active=active, signs=signs, margin=margin)

    @property
    def k(self) -> int:
        """Number of active units."""
        return int(self.active.shape[0])

    @property
    def is_generic(self) -> bool:
        """True when no pre-activation lies within GENERIC_MARGIN of threshold."""
        return self.margin is None or self.margin >= GENERIC_MARGIN


@dataclass
class TrainState:
    """
    Mutable state of the alternating dictionary optimizer.

    Attributes:
        step: Completed iterations
        eta_dict: Learning rate of the dictionary gradient step
        eta_code: Learning rate of the ISTA step on the codes
        history: Objective value after every accepted update
        precision: Current floating point mode
        baseline: Objective recomputed after a precision switch, if any
    """

    step: int = 0
    eta_dict: float = 1e-2
    eta_code: float = 1e-2
    history: List[float] = field(default_factory=list)
    precision: Precision = Precision.SINGLE
    accepted_dict: int = 0
    accepted_code: int = 0
    baseline: Optional[float] = None

    @property
    def objective(self) -> float:
        """Value a proposal has to beat; never above the last history entry."""
        last = self.history[-1] if self.history else float("inf")
        return last if self.baseline is None else min(last, self.baseline)


def uniqueness_check(atoms: np.ndarray) -> float:
    """
    Largest absolute cosine between two distinct unit-norm columns.

    A value of exactly 1 means a duplicated or antipodal pair, in which case
    sparse codes need not be unique.

    Args:
        atoms: m x n matrix with unit-norm columns (or a Dictionary)

    Returns:
        max_{i != j} |d_i . d_j| (0 for a single column)
    """
    if isinstance(atoms, Dictionary):
        atoms = atoms.atoms
    gram = np.abs(atoms.T @ atoms)
    np.fill_diagonal(gram, 0.0)
    return float(gram.max()) if gram.size else 0.0
