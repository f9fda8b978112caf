"""
Raw pixels: the identity representation.
"""

import numpy as np

from src.representations.base import BaseRepresentation


class PixelRepresentation(BaseRepresentation):
    """Images represented by their own pixels; every direction has gain 1."""

    name = "pixels"

    @property
    def dim(self) -> int:
        return self.m

    def encode(self, pixels: np.ndarray) -> np.ndarray:
        return np.asarray(pixels, dtype=np.float64)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return np.eye(self.m)
