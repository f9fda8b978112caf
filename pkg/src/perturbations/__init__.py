"""
Perturbation directions and elastic distortions.
"""

from src.perturbations.directions import (
    PerturbationDirection,
    PerturbationKind,
    distortion_direction,
    noise_direction,
    swap_direction,
)
from src.perturbations.elastic import (
    DisplacementField,
    elastic_field,
    interpolation_matrix,
    upsample_control_grid,
    warp_image,
)

__all__ = [
    "PerturbationDirection",
    "PerturbationKind",
    "distortion_direction",
    "noise_direction",
    "swap_direction",
    "DisplacementField",
    "elastic_field",
    "interpolation_matrix",
    "upsample_control_grid",
    "warp_image",
]
