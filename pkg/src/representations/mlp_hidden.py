"""
Hidden layer of the supervised two-layer MLP.
"""

import numpy as np

from src.classifiers.mlp import TrainedMLP, mlp_hidden, mlp_hidden_jacobian
from src.representations.base import BaseRepresentation


class MLPHiddenRepresentation(BaseRepresentation):
    """Rectified hidden activations of a trained MLP."""

    name = "mlp"

    def __init__(self, mlp: TrainedMLP):
        super().__init__(mlp.W1.shape[1])
        self.mlp = mlp

    @property
    def dim(self) -> int:
        return self.mlp.hidden_dim

    def encode(self, pixels: np.ndarray) -> np.ndarray:
        return mlp_hidden(np.atleast_2d(pixels), self.mlp)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return mlp_hidden_jacobian(x, self.mlp)
