"""
Statistics of dictionary filters and their pairwise overlaps.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from src.coding.types import Dictionary

logger = logging.getLogger(__name__)


def normalized_mean(v: np.ndarray) -> float:
    """
    Sum of the entries over the sum of their magnitudes, in [-1, 1].

    1 for a nonnegative vector, 0 for a vector whose entries cancel.
    """
    v = np.asarray(v, dtype=np.float64)
    total = np.sum(np.abs(v))
    if total == 0.0:
        raise ValueError("normalized_mean of a zero vector is undefined")
    return float(np.sum(v) / total)


def overlap_distribution(D_plus: Union[Dictionary, np.ndarray]) -> np.ndarray:
    """All pairwise overlaps d_i . d_j (i < j) of the given filters."""
    atoms = D_plus.atoms if isinstance(D_plus, Dictionary) else np.asarray(D_plus, dtype=np.float64)
    rows, cols = np.triu_indices(atoms.shape[1], k=1)
    return (atoms.T @ atoms)[rows, cols]


@dataclass(frozen=True)
class FilterPair:
    i: int
    j: int
    overlap: float
    mean_i: float
    mean_j: float
    mean_difference: float

    def as_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "overlap": self.overlap,
            "mean_i": self.mean_i,
            "mean_j": self.mean_j,
            "mean_difference": self.mean_difference,
        }


@dataclass
class PairReport:
    """
    Highly overlapping filter pairs.

    Attributes:
        pairs: Pairs ordered by decreasing overlap
        filter_mean_average: Average |normalized mean| of the paired filters
        difference_mean_average: Average |normalized mean| of d_i - d_j
    """

    threshold: float
    pairs: List[FilterPair] = field(default_factory=list)

    @property
    def filter_mean_average(self) -> float:
        if not self.pairs:
            return float("nan")
        return float(np.mean([abs(p.mean_i) for p in self.pairs] + [abs(p.mean_j) for p in self.pairs]))

    @property
    def difference_mean_average(self) -> float:
        if not self.pairs:
            return float("nan")
        return float(np.mean([abs(p.mean_difference) for p in self.pairs]))

    def summary(self) -> dict:
        return {
            "threshold": self.threshold,
            "pairs": len(self.pairs),
            "filter_mean_average": self.filter_mean_average,
            "difference_mean_average": self.difference_mean_average,
        }


def filter_pair_stats(
    D: Union[Dictionary, np.ndarray],
    threshold: float = 0.0,
    top: Optional[int] = None,
) -> PairReport:
    """
    Normalized means of overlapping filter pairs and of their differences.

    Filters of a pair with large overlap tend to share a large mean, while
    their difference is close to mean free.

    Args:
        D: m x n dictionary with unit-norm columns
        threshold: Keep pairs with overlap strictly above this value
        top: Keep at most this many of the most overlapping pairs

    Returns:
        PairReport
    """
    atoms = D.atoms if isinstance(D, Dictionary) else np.asarray(D, dtype=np.float64)
    rows, cols = np.triu_indices(atoms.shape[1], k=1)
    overlaps = (atoms.T @ atoms)[rows, cols]
    keep = np.flatnonzero(overlaps > threshold)
    keep = keep[np.argsort(-overlaps[keep], kind="stable")]
    if top is not None:
        keep = keep[:top]

    pairs = []
    for index in keep:
        i, j = int(rows[index]), int(cols[index])
        pairs.append(FilterPair(
            i=i,
            j=j,
            overlap=float(overlaps[index]),
            mean_i=normalized_mean(atoms[:, i]),
            mean_j=normalized_mean(atoms[:, j]),
            mean_difference=normalized_mean(atoms[:, i] - atoms[:, j]),
        ))

    report = PairReport(threshold=threshold, pairs=pairs)
    logger.info(
        f"{len(pairs)} filter pairs above overlap {threshold}: filter mean "
        f"{report.filter_mean_average:.3f}, difference mean {report.difference_mean_average:.3f}"
    )
    return report
