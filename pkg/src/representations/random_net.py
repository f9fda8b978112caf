"""
Features of a random two-layer rectified network.
"""

import numpy as np

from src.classifiers.random_features import RandomNet, random_features, random_features_jacobian
from src.representations.base import BaseRepresentation

ENCODE_BLOCK = 1000


class RandomNetRepresentation(BaseRepresentation):
    """Untrained random features; encodes in blocks to bound memory."""

    name = "random"

    def __init__(self, net: RandomNet):
        super().__init__(net.m)
        self.net = net

    @property
    def dim(self) -> int:
        return self.net.width

    def encode(self, pixels: np.ndarray) -> np.ndarray:
        pixels = np.atleast_2d(pixels)
        blocks = [
            random_features(pixels[start:start + ENCODE_BLOCK], self.net)
            for start in range(0, pixels.shape[0], ENCODE_BLOCK)
        ]
        if not blocks:
            return np.zeros((0, self.dim), dtype=self.net.W1.dtype)
        return np.vstack(blocks)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return random_features_jacobian(x, self.net)
