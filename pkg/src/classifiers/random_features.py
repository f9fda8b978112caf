"""
Random two-layer rectified network used as an untrained baseline
representation: z(x) = relu(W2 relu(W1 x)) with unit normal weights.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.data.image_set import MNIST_SIDE
from src.utils.errors import NonGenericInputError

logger = logging.getLogger(__name__)

RANDOM_WIDTH = 10 * MNIST_SIDE * MNIST_SIDE


@dataclass(frozen=True)
class RandomNet:
    """
    Frozen random network.

    Attributes:
        W1: width x m first layer
        W2: width x width second layer
        seed: Seed the weights were drawn from
    """

    W1: np.ndarray
    W2: np.ndarray
    seed: int

    def __post_init__(self):
        if self.W2.shape != (self.W1.shape[0], self.W1.shape[0]):
            raise ValueError(f"W2 must be {self.W1.shape[0]} x {self.W1.shape[0]}, got {self.W2.shape}")
        self.W1.setflags(write=False)
        self.W2.setflags(write=False)

    @property
    def width(self) -> int:
        return self.W1.shape[0]

    @property
    def m(self) -> int:
        return self.W1.shape[1]


def create_random_net(
    m: int = MNIST_SIDE * MNIST_SIDE,
    width: int = RANDOM_WIDTH,
    seed: int = 0,
    dtype: type = np.float32,
) -> RandomNet:
    """
    Draw a random network with i.i.d. unit normal weights.

    The default width is ten times the image dimension; the weights are kept
    in single precision since the second layer alone has width^2 entries.
    """
    rng = np.random.default_rng(seed)
    W1 = rng.standard_normal((width, m), dtype=dtype)
    W2 = rng.standard_normal((width, width), dtype=dtype)
    logger.info(f"Created random network: {m} -> {width} -> {width} (seed={seed})")
    return RandomNet(W1=W1, W2=W2, seed=seed)


def random_features(x: np.ndarray, net: RandomNet) -> np.ndarray:
    """
    Features of one image (length-m) or a batch (T x m).

    Returns:
        Nonnegative features of length ``net.width`` per image
    """
    X = np.asarray(x, dtype=net.W1.dtype)
    hidden = np.maximum(X @ net.W1.T, 0)
    return np.maximum(hidden @ net.W2.T, 0)


def random_features_jacobian(x: np.ndarray, net: RandomNet) -> np.ndarray:
    """
    Jacobian diag(1[W2 h > 0]) W2 diag(1[W1 x > 0]) W1 at a single image.

    Raises:
        NonGenericInputError: If some pre-activation is exactly zero
    """
    x = np.asarray(x, dtype=np.float64)
    W1 = net.W1.astype(np.float64)
    pre1 = W1 @ x
    active1 = pre1 > 0
    hidden = np.where(active1, pre1, 0.0)
    W2_active = net.W2[:, active1].astype(np.float64)
    pre2 = W2_active @ hidden[active1]
    if np.any(pre1 == 0) or np.any(pre2 == 0):
        raise NonGenericInputError("Random network pre-activation is exactly zero")
    active2 = pre2 > 0
    J = np.zeros((net.width, net.m))
    J[active2] = W2_active[active2] @ W1[active1]
    return J
