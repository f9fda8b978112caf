"""
Gain spectra of active dictionaries.

The singular value decomposition D_+ = U S V^T splits image space into
directions u_i amplified by 1/sigma_i in the code. Spectra are ordered by
decreasing gain, so index 0 holds the maximum cancellation direction.
Image-space vectors are the left singular vectors of the m x k matrix D_+;
columns k..m-1 of U span the orthogonal complement, which has zero gain.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from src.coding.types import Dictionary
from src.utils.errors import SpectrumError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GainSpectrum:
    """
    Singular structure of an active dictionary.

    Attributes:
        sigma: k singular values in ascending order
        gains: 1 / sigma in descending order
        U: m x m orthonormal image-space vectors; the first k columns pair
            with ``sigma``, the rest span the zero-gain complement
        V: k x k orthonormal representation-space vectors, column i pairs
            with sigma[i]
    """

    sigma: np.ndarray
    gains: np.ndarray
    U: np.ndarray
    V: np.ndarray

    @property
    def k(self) -> int:
        return self.sigma.shape[0]

    @property
    def m(self) -> int:
        return self.U.shape[0]

    @property
    def image_vectors(self) -> np.ndarray:
        """m x k image-space singular vectors of the active filters."""
        return self.U[:, : self.k]


class Cancellation(NamedTuple):
    """Unit coefficients v whose combination D_+ v has the smallest norm sigma."""
    sigma: float
    v: np.ndarray
    u: np.ndarray


def svd_gain_spectrum(D_plus: np.ndarray) -> GainSpectrum:
    """
    SVD of an m x k active dictionary ordered by decreasing gain.

    Raises:
        ValueError: If k is 0 or exceeds m
        SpectrumError: If the input is not finite or the SVD fails
    """
    D_plus = np.asarray(D_plus, dtype=np.float64)
    m, k = D_plus.shape
    if k < 1 or k > m:
        raise ValueError(f"Active dictionary must have 1 <= k <= m columns, got k={k}, m={m}")
    try:
        U, s, Vt = scipy.linalg.svd(D_plus, full_matrices=True, lapack_driver="gesdd")
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SpectrumError(f"SVD of the active dictionary failed: {e}") from e

    order = np.argsort(s, kind="stable")
    sigma = s[order]
    U = np.concatenate([U[:, :k][:, order], U[:, k:]], axis=1)
    with np.errstate(divide="ignore"):
        gains = 1.0 / sigma
    return GainSpectrum(sigma=sigma, gains=gains, U=U, V=Vt.T[:, order])


def max_cancellation(D_plus: Union[np.ndarray, GainSpectrum]) -> Cancellation:
    """
    Unit coefficient vector v* minimizing ||D_+ v|| and its image direction.

    Returns:
        Cancellation(sigma*, v*, u*) with u* the unit image-space direction
        of maximal gain
    """
    spectrum = D_plus if isinstance(D_plus, GainSpectrum) else svd_gain_spectrum(D_plus)
    return Cancellation(sigma=float(spectrum.sigma[0]), v=spectrum.V[:, 0], u=spectrum.U[:, 0])


def power_spectrum(delta: np.ndarray, spectrum: GainSpectrum) -> np.ndarray:
    """
    Squared overlaps of a unit direction with every image-space vector.

    The direction is normalized first; entries sum to 1.

    Returns:
        length-m vector; entries beyond k belong to the zero-gain complement
    """
    delta = np.asarray(delta, dtype=np.float64).reshape(-1)
    norm = np.linalg.norm(delta)
    if norm == 0.0:
        raise ValueError("Power spectrum of a zero direction is undefined")
    overlaps = spectrum.U.T @ (delta / norm)
    return overlaps * overlaps


def amplitude_spectrum(
    directions: Union[np.ndarray, Sequence[np.ndarray]],
    spectrum: GainSpectrum,
) -> np.ndarray:
    """
    Root mean squared overlap of many directions with the image-space vectors.

    Args:
        directions: N x m matrix or a sequence of length-m directions
        spectrum: Gain spectrum to project on

    Returns:
        length-m vector
    """
    directions = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    if directions.shape[0] == 0:
        raise ValueError("amplitude_spectrum needs at least one direction")
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("Amplitude spectrum of a zero direction is undefined")
    overlaps = (directions / norms) @ spectrum.U
    return np.sqrt(np.mean(overlaps * overlaps, axis=0))


def norm_ratio(D: Union[Dictionary, np.ndarray], r: np.ndarray) -> float:
    """Return ||D r|| / ||r||."""
    atoms = D.atoms if isinstance(D, Dictionary) else np.asarray(D, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    norm = np.linalg.norm(r)
    if norm == 0.0:
        raise ValueError("norm_ratio of a zero code is undefined")
    return float(np.linalg.norm(atoms @ r) / norm)


@dataclass(frozen=True)
class RIPReport:
    """
    Extremes of ||D r|| / ||r|| on sparse vectors.

    Attributes:
        random_min, random_max: Over random supports and coefficients
        observed_min, observed_max: Over the active sets of real codes
            (the extreme singular values of each D_+), NaN when none given
        gain_spread: observed_max / observed_min, the ratio of the largest
            to the smallest gain on real active sets
    """

    support_size: int
    trials: int
    random_min: float
    random_max: float
    observed_min: float = float("nan")
    observed_max: float = float("nan")

    @property
    def gain_spread(self) -> float:
        return self.observed_max / self.observed_min

    def as_dict(self) -> dict:
        return {
            "support_size": self.support_size,
            "trials": self.trials,
            "random_min": self.random_min,
            "random_max": self.random_max,
            "observed_min": self.observed_min,
            "observed_max": self.observed_max,
            "gain_spread": self.gain_spread,
        }


def rip_range(
    D: Union[Dictionary, np.ndarray],
    support_size: int,
    trials: int,
    seed: int,
    observed_supports: Optional[Iterable[Sequence[int]]] = None,
) -> RIPReport:
    """
    Measure how far a dictionary is from an isometry on sparse vectors.

    Args:
        D: m x n dictionary
        support_size: Number of nonzero coefficients in the random trials
        trials: Number of random sparse vectors
        seed: Seed of the random supports and coefficients
        observed_supports: Active sets of real codes

    Returns:
        RIPReport
    """
    atoms = D.atoms if isinstance(D, Dictionary) else np.asarray(D, dtype=np.float64)
    n = atoms.shape[1]
    if not 1 <= support_size <= n:
        raise ValueError(f"support_size must lie in [1, {n}], got {support_size}")
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")

    rng = np.random.default_rng(seed)
    ratios = np.empty(trials)
    for trial in range(trials):
        support = rng.choice(n, size=support_size, replace=False)
        r = np.zeros(n)
        r[support] = rng.standard_normal(support_size)
        ratios[trial] = norm_ratio(atoms, r)

    observed: List[float] = []
    for support in observed_supports or []:
        support = np.asarray(support, dtype=np.intp)
        if support.size == 0:
            continue
        s = scipy.linalg.svd(atoms[:, support], compute_uv=False, lapack_driver="gesdd")
        observed.extend((float(s.min()), float(s.max())))

    report = RIPReport(
        support_size=support_size,
        trials=trials,
        random_min=float(ratios.min()),
        random_max=float(ratios.max()),
        observed_min=min(observed) if observed else float("nan"),
        observed_max=max(observed) if observed else float("nan"),
    )
    logger.info(
        f"RIP range for support {support_size}: random [{report.random_min:.4f}, {report.random_max:.4f}], "
        f"observed [{report.observed_min:.4f}, {report.observed_max:.4f}]"
    )
    return report
