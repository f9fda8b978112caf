"""
Distributions of directional derivatives over sampled images.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from src.analysis.jacobian import ActiveJacobian, directional_derivative
from src.data.image_set import ImageSet
from src.perturbations.directions import (
    PerturbationDirection,
    PerturbationKind,
    distortion_direction,
    noise_direction,
    swap_direction,
)
from src.perturbations.elastic import CONTROL_GRID, CONTROL_STD
from src.utils.errors import DegenerateDirectionError, NonGenericInputError
from src.utils.helpers import sample_rng

logger = logging.getLogger(__name__)

DEFAULT_BINS = 100
MAX_RETRIES = 10

JacobianProvider = Callable[[np.ndarray], Union[ActiveJacobian, np.ndarray]]


@dataclass
class SensitivityHistogram:
    """
    Directional derivatives of one representation.

    Attributes:
        representation: Name of the representation
        requested: Number of samples requested
        values: Derivatives per perturbation kind
        sample_ids: Sample index of every value
        image_ids: Image index of every value
        skipped: Samples excluded because the image was non-generic
    """

    representation: str
    requested: int
    values: Dict[PerturbationKind, List[float]] = field(default_factory=dict)
    sample_ids: Dict[PerturbationKind, List[int]] = field(default_factory=dict)
    image_ids: Dict[PerturbationKind, List[int]] = field(default_factory=dict)
    skipped: int = 0

    def add(self, kind: PerturbationKind, sample: int, image: int, value: float) -> None:
        self.values.setdefault(kind, []).append(value)
        self.sample_ids.setdefault(kind, []).append(sample)
        self.image_ids.setdefault(kind, []).append(image)

    def count(self, kind: PerturbationKind) -> int:
        return len(self.values.get(kind, []))

    def median(self, kind: PerturbationKind) -> float:
        return float(np.median(self.values[kind]))

    def bins(self, n_bins: int = DEFAULT_BINS) -> Dict[PerturbationKind, Tuple[np.ndarray, np.ndarray]]:
        """
        Histogram counts on n_bins uniform bins spanning [0, max observed].

        All kinds share the same edges.
        """
        observed = [v for values in self.values.values() for v in values]
        upper = max(observed) if observed else 1.0
        if upper <= 0.0:
            upper = 1.0
        edges = np.linspace(0.0, upper, n_bins + 1)
        return {
            kind: (np.histogram(values, bins=edges)[0], edges)
            for kind, values in self.values.items()
        }

    def rows(self) -> List[Dict[str, Any]]:
        """One record per (sample, kind)."""
        records = []
        for kind in self.values:
            for sample, image, value in zip(self.sample_ids[kind], self.image_ids[kind], self.values[kind]):
                records.append({
                    "representation": self.representation,
                    "kind": kind.value,
                    "sample": sample,
                    "image": image,
                    "derivative": value,
                })
        return records

    def summary(self) -> Dict[str, Any]:
        """Counts, medians and means per kind."""
        kinds = {}
        for kind, values in self.values.items():
            data = np.asarray(values)
            kinds[kind.value] = {
                "count": int(data.size),
                "median": float(np.median(data)),
                "mean": float(np.mean(data)),
                "min": float(np.min(data)),
                "max": float(np.max(data)),
            }
        return {
            "representation": self.representation,
            "requested": self.requested,
            "skipped_non_generic": self.skipped,
            "kinds": kinds,
        }


def draw_direction(
    kind: PerturbationKind,
    x: np.ndarray,
    image_set: ImageSet,
    t: int,
    rng: np.random.Generator,
    grid_size: int = CONTROL_GRID,
    std: float = CONTROL_STD,
) -> PerturbationDirection:
    """
    One perturbation direction for image t, resampling degenerate draws.

    Raises:
        DegenerateDirectionError: If every draw is degenerate
    """
    if kind is PerturbationKind.NOISE:
        return noise_direction(x.shape[0], rng=rng)

    for _ in range(MAX_RETRIES):
        try:
            if kind is PerturbationKind.SWAP:
                other = int(rng.integers(len(image_set) - 1))
                other += other >= t
                return swap_direction(x, image_set.pixels[other])
            return distortion_direction(x, grid_size=grid_size, std=std, rng=rng)
        except DegenerateDirectionError:
            logger.debug(f"Degenerate {kind.value} direction for image {t}; resampling")
    raise DegenerateDirectionError(f"No usable {kind.value} direction for image {t} after {MAX_RETRIES} draws")


def sensitivity_histogram(
    provider: JacobianProvider,
    image_set: ImageSet,
    kinds: Sequence[PerturbationKind] = tuple(PerturbationKind),
    samples: int = 4000,
    seed: int = 0,
    representation: str = "representation",
    grid_size: int = CONTROL_GRID,
    std: float = CONTROL_STD,
) -> SensitivityHistogram:
    """
    Sample images and record the directional derivative for each perturbation.

    Every sample draws its image and directions from independent random
    streams keyed by (seed, sample), so results do not depend on the order
    in which samples are processed.

    Args:
        provider: Maps an image to the Jacobian of the representation
        image_set: Images to sample from
        kinds: Perturbation kinds to measure
        samples: Number of sampled images
        seed: Experiment seed
        representation: Name recorded in the histogram
        grid_size: Control points of the distortion grid
        std: Control displacement standard deviation

    Returns:
        SensitivityHistogram

    Raises:
        ValueError: If samples < 1 or swaps are requested on a single image
    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    kinds = [PerturbationKind(kind) for kind in kinds]
    if PerturbationKind.SWAP in kinds and len(image_set) < 2:
        raise ValueError("Swap perturbations need at least two images")

    histogram = SensitivityHistogram(representation=representation, requested=samples)
    logger.info(f"Measuring {representation} sensitivity on {samples} samples ({', '.join(k.value for k in kinds)})")

    for sample in range(samples):
        t = int(sample_rng(seed, sample).integers(len(image_set)))
        x = image_set.pixels[t]
        try:
            J = provider(x)
        except NonGenericInputError:
            histogram.skipped += 1
            continue

        for kind in kinds:
            rng = sample_rng(seed, sample, kind.key + 1)
            direction = draw_direction(kind, x, image_set, t, rng, grid_size, std)
            histogram.add(kind, sample, t, directional_derivative(J, direction))

    logger.info(
        f"{representation}: "
        + ", ".join(f"median {k.value}={histogram.median(k):.4f}" for k in kinds if histogram.count(k))
        + f" ({histogram.skipped} non-generic samples skipped)"
    )
    return histogram
