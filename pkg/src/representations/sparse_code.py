"""
Exact sparse codes of a trained dictionary.
"""

import logging

import numpy as np

from src.analysis.jacobian import ActiveJacobian, active_jacobian
from src.coding.inference import DEFAULT_CHECK_EVERY, DEFAULT_MAX_ITERS, infer_batch, infer_exact, stack_codes
from src.coding.types import Dictionary, Precision
from src.representations.base import BaseRepresentation

logger = logging.getLogger(__name__)


class SparseCodeRepresentation(BaseRepresentation):
    """
    Images represented by their exact sparse codes.

    Usage:
        rep = SparseCodeRepresentation(dictionary)
        codes = rep.encode(images.pixels)
        J = rep.jacobian(images.image(0))
    """

    name = "sparse"

    def __init__(
        self,
        dictionary: Dictionary,
        max_iters: int = DEFAULT_MAX_ITERS,
        check_every: int = DEFAULT_CHECK_EVERY,
        precision: Precision = Precision.SINGLE,
    ):
        """
        Args:
            dictionary: Trained dictionary, carrying its sparsity weight
            max_iters: ISTA budget of exact inference
            check_every: Iterations between fixed-point checks
            precision: Starting floating point mode of inference
        """
        super().__init__(dictionary.m)
        self.dictionary = dictionary
        self.max_iters = max_iters
        self.check_every = check_every
        self.precision = Precision(precision)

    @property
    def dim(self) -> int:
        return self.dictionary.n

    def encode(self, pixels: np.ndarray) -> np.ndarray:
        pixels = np.atleast_2d(pixels)
        codes = infer_batch(
            pixels,
            self.dictionary,
            self.dictionary.lam,
            max_iters=self.max_iters,
            check_every=self.check_every,
            precision=self.precision,
        )
        if not codes:
            return np.zeros((0, self.dim))
        return stack_codes(codes)

    def jacobian(self, x: np.ndarray) -> ActiveJacobian:
        code = infer_exact(
            x,
            self.dictionary,
            self.dictionary.lam,
            max_iters=self.max_iters,
            check_every=self.check_every,
            precision=self.precision,
        )
        return active_jacobian(self.dictionary, code)
