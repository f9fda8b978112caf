"""
Perturbation directions in image space: Gaussian noise, swaps to another
image and elastic distortions.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.perturbations.elastic import (
    CONTROL_GRID,
    CONTROL_STD,
    DisplacementField,
    elastic_field,
    warp_image,
)
from src.utils.errors import DegenerateDirectionError


class PerturbationKind(str, Enum):
    """The three families of image perturbations."""
    NOISE = "noise"
    SWAP = "swap"
    DISTORTION = "distortion"

    @property
    def key(self) -> int:
        """Stable integer used to key per-sample random streams."""
        return list(PerturbationKind).index(self)


@dataclass(frozen=True)
class PerturbationDirection:
    """
    A direction of change in image space.

    Attributes:
        delta: length-m vector
        kind: Perturbation family
        seed: Seed that generated it (None for swaps)
    """

    delta: np.ndarray
    kind: PerturbationKind
    seed: Optional[int] = None

    def __post_init__(self):
        delta = np.array(self.delta, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(delta)):
            raise ValueError("Perturbation direction must be finite")
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "kind", PerturbationKind(self.kind))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))

    def unit(self) -> np.ndarray:
        """Direction rescaled to unit norm."""
        norm = self.norm
        if norm == 0.0:
            raise DegenerateDirectionError(f"Zero {self.kind.value} direction has no unit vector")
        return self.delta / norm


def noise_direction(
    m: int,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> PerturbationDirection:
    """
    Isotropic Gaussian direction with i.i.d. standard normal entries.

    Args:
        m: Image dimension
        seed: Seed of the draw (ignored when rng is given)
        rng: Optional generator to draw from
    """
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    return PerturbationDirection(delta=rng.standard_normal(m), kind=PerturbationKind.NOISE, seed=seed)


def swap_direction(x: np.ndarray, x_other: np.ndarray) -> PerturbationDirection:
    """
    Direction from one image to another, x_other - x.

    Raises:
        ValueError: If the shapes differ
        DegenerateDirectionError: If the two images are identical
    """
    x = np.asarray(x, dtype=np.float64)
    x_other = np.asarray(x_other, dtype=np.float64)
    if x.shape != x_other.shape:
        raise ValueError(f"Cannot swap images of shapes {x.shape} and {x_other.shape}")
    delta = x_other - x
    if not np.any(delta):
        raise DegenerateDirectionError("Swap partner is identical to the image")
    return PerturbationDirection(delta=delta, kind=PerturbationKind.SWAP)


def distortion_direction(
    x: np.ndarray,
    seed: Optional[int] = None,
    field: Optional[DisplacementField] = None,
    grid_size: int = CONTROL_GRID,
    std: float = CONTROL_STD,
    rng: Optional[np.random.Generator] = None,
) -> PerturbationDirection:
    """
    Difference between an elastically warped image and the original.

    Args:
        x: Flattened square image
        seed: Seed of the displacement field
        field: Explicit field, overriding the random one
        grid_size: Control points per axis
        std: Control displacement standard deviation in pixels
        rng: Optional generator for the control displacements

    Raises:
        DegenerateDirectionError: If the warp leaves the image unchanged
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    side = int(round(np.sqrt(x.shape[0])))
    if side * side != x.shape[0]:
        raise ValueError(f"Image of length {x.shape[0]} is not square")
    if field is None:
        field = elastic_field(seed, side=side, grid_size=grid_size, std=std, rng=rng)
    delta = warp_image(x, field) - x
    if not np.any(delta):
        raise DegenerateDirectionError("Distortion left the image unchanged")
    return PerturbationDirection(delta=delta, kind=PerturbationKind.DISTORTION, seed=seed)
