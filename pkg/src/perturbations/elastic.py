"""
Elastic distortions.

A coarse grid of Gaussian control displacements is upsampled to one
displacement per pixel with Catmull-Rom bicubic interpolation, and the image
is resampled along the displaced coordinates with bilinear interpolation.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from src.data.image_set import MNIST_SIDE

CONTROL_GRID = 5
CONTROL_STD = 0.25


@dataclass(frozen=True)
class DisplacementField:
    """
    Per-pixel displacements in pixel units.

    Attributes:
        dx: side x side horizontal (column) displacements
        dy: side x side vertical (row) displacements
    """

    dx: np.ndarray
    dy: np.ndarray

    def __post_init__(self):
        if self.dx.shape != self.dy.shape or self.dx.ndim != 2:
            raise ValueError(f"Field grids must share a 2D shape, got {self.dx.shape} and {self.dy.shape}")
        if not (np.all(np.isfinite(self.dx)) and np.all(np.isfinite(self.dy))):
            raise ValueError("Displacement field must be finite")

    @property
    def side(self) -> int:
        return self.dx.shape[0]

    @classmethod
    def zeros(cls, side: int = MNIST_SIDE) -> "DisplacementField":
        return cls(dx=np.zeros((side, side)), dy=np.zeros((side, side)))

    @classmethod
    def constant(cls, dx: float, dy: float, side: int = MNIST_SIDE) -> "DisplacementField":
        return cls(dx=np.full((side, side), float(dx)), dy=np.full((side, side), float(dy)))


def _catmull_rom_weights(f: float) -> np.ndarray:
    f2, f3 = f * f, f * f * f
    return 0.5 * np.array([
        -f3 + 2 * f2 - f,
        3 * f3 - 5 * f2 + 2,
        -3 * f3 + 4 * f2 + f,
        f3 - f2,
    ])


def interpolation_matrix(n_knots: int, side: int) -> np.ndarray:
    """
    Separable Catmull-Rom interpolation matrix.

    Knots sit at the first and last pixel and are evenly spaced in between.
    Out-of-range neighbours are clamped to the edge knots.

    Returns:
        side x n_knots matrix M so that M @ values upsamples a knot vector
    """
    if n_knots < 1 or side < 1:
        raise ValueError("n_knots and side must be positive")
    M = np.zeros((side, n_knots))
    if n_knots == 1:
        M[:, 0] = 1.0
        return M

    scale = (n_knots - 1) / (side - 1) if side > 1 else 0.0
    for i in range(side):
        t = i * scale
        k = min(int(np.floor(t)), n_knots - 2)
        weights = _catmull_rom_weights(t - k)
        for offset, weight in zip(range(-1, 3), weights):
            M[i, min(max(k + offset, 0), n_knots - 1)] += weight
    return M


def upsample_control_grid(control: np.ndarray, side: int = MNIST_SIDE) -> np.ndarray:
    """Upsample a square grid of control values to side x side."""
    control = np.asarray(control, dtype=np.float64)
    if control.ndim != 2 or control.shape[0] != control.shape[1]:
        raise ValueError(f"Control grid must be square, got {control.shape}")
    M = interpolation_matrix(control.shape[0], side)
    return M @ control @ M.T


def elastic_field(
    seed: int,
    side: int = MNIST_SIDE,
    grid_size: int = CONTROL_GRID,
    std: float = CONTROL_STD,
    rng: Optional[np.random.Generator] = None,
) -> DisplacementField:
    """
    Random smooth displacement field.

    Args:
        seed: Seed of the control displacements (ignored when rng is given)
        side: Image side
        grid_size: Control points per axis
        std: Standard deviation of the control displacements in pixels
        rng: Optional generator to draw from

    Returns:
        DisplacementField of shape side x side
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    control_x = rng.normal(0.0, std, size=(grid_size, grid_size))
    control_y = rng.normal(0.0, std, size=(grid_size, grid_size))
    return DisplacementField(
        dx=upsample_control_grid(control_x, side),
        dy=upsample_control_grid(control_y, side),
    )


def warp_image(image: np.ndarray, field: DisplacementField) -> np.ndarray:
    """
    Resample an image along a displacement field.

    Output pixel (i, j) reads the source at (i + dy, j + dx) with bilinear
    interpolation; sources outside the image read as 0.

    Args:
        image: side x side image or its flattened row-major form
        field: Displacement field of matching side

    Returns:
        Warped image with the same shape as ``image``
    """
    image = np.asarray(image, dtype=np.float64)
    flat = image.ndim == 1
    grid = image.reshape(field.side, field.side) if flat else image
    if grid.shape != field.dx.shape:
        raise ValueError(f"Image shape {grid.shape} does not match field {field.dx.shape}")

    rows, cols = np.indices(grid.shape, dtype=np.float64)
    coordinates = np.stack([rows + field.dy, cols + field.dx])
    warped = ndimage.map_coordinates(grid, coordinates, order=1, mode="grid-constant", cval=0.0)
    return warped.reshape(-1) if flat else warped
