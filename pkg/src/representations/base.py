"""
Base interface for image representations.
"""

from abc import ABC, abstractmethod
from typing import Union

import numpy as np

from src.analysis.jacobian import ActiveJacobian


class BaseRepresentation(ABC):
    """
    Abstract base class for representations of images.

    Every representation maps a batch of images to feature vectors and
    exposes the Jacobian of that map at a single image, so the same
    sensitivity and evaluation code runs on pixels, sparse codes and
    network features.
    """

    name: str = "representation"

    def __init__(self, m: int):
        """
        Args:
            m: Image dimension
        """
        self.m = m

    @property
    @abstractmethod
    def dim(self) -> int:
        """Length of one representation vector."""

    @abstractmethod
    def encode(self, pixels: np.ndarray) -> np.ndarray:
        """
        Represent a batch of images.

        Args:
            pixels: T x m images

        Returns:
            T x dim representation matrix
        """

    @abstractmethod
    def jacobian(self, x: np.ndarray) -> Union[ActiveJacobian, np.ndarray]:
        """
        Jacobian of the representation at one image.

        Args:
            x: length-m image

        Returns:
            Matrix with m columns whose omitted rows are identically zero

        Raises:
            NonGenericInputError: If the map is not differentiable at x
        """

    def __call__(self, x: np.ndarray) -> Union[ActiveJacobian, np.ndarray]:
        return self.jacobian(x)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r}, dim={self.dim})"
