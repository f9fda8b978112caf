"""
Labeled image collections and the split/sampling operations on them.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.utils.errors import InsufficientClassError

logger = logging.getLogger(__name__)

NUM_CLASSES = 10
MNIST_SIDE = 28


class Split(str, Enum):
    """Which part of the source data an image set came from."""
    TRAIN = "train"
    VALIDATION = "validation"


@dataclass(frozen=True)
class ImageSet:
    """
    A labeled collection of flattened square grayscale images.

    Attributes:
        pixels: T x m array with values in [0, 1], one image per row (row-major)
        labels: length-T integer labels in 0..9
        split: train or validation
    """

    pixels: np.ndarray
    labels: np.ndarray
    split: Split = Split.TRAIN

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)

        if pixels.ndim != 2:
            raise ValueError(f"pixels must be a T x m matrix, got shape {pixels.shape}")
        if pixels.shape[0] != labels.shape[0]:
            raise ValueError(
                f"labels length {labels.shape[0]} does not match {pixels.shape[0]} pixel rows"
            )
        if pixels.size and (pixels.min() < 0.0 or pixels.max() > 1.0):
            raise ValueError("pixel values must lie in [0, 1]")
        if labels.size and (labels.min() < 0 or labels.max() >= NUM_CLASSES):
            raise ValueError(f"labels must lie in 0..{NUM_CLASSES - 1}")
        side = math.isqrt(pixels.shape[1])
        if side * side != pixels.shape[1]:
            raise ValueError(f"image dimension {pixels.shape[1]} is not a square")

        pixels.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "split", Split(self.split))

    def __len__(self) -> int:
        return self.pixels.shape[0]

    @property
    def dim(self) -> int:
        """Image dimensionality m."""
        return self.pixels.shape[1]

    @property
    def side(self) -> int:
        """Side length of the square images."""
        return math.isqrt(self.dim)

    def image(self, index: int) -> np.ndarray:
        """Return image ``index`` reshaped to side x side."""
        return self.pixels[index].reshape(self.side, self.side)

    def subset(self, indices: np.ndarray, split: Optional[Split] = None) -> "ImageSet":
        """
        Select rows by index.

        Args:
            indices: Row indices, in the order they should appear
            split: Split tag of the result (defaults to this set's tag)

        Returns:
            New ImageSet
        """
        indices = np.asarray(indices, dtype=np.int64)
        return ImageSet(
            pixels=self.pixels[indices],
            labels=self.labels[indices],
            split=split or self.split,
        )


@dataclass(frozen=True)
class LabeledSubset:
    """Indices of k labeled examples per class drawn from an ImageSet."""

    indices: np.ndarray
    k: int
    seed: int
    classes: Tuple[int, ...] = field(default=tuple(range(NUM_CLASSES)))

    def __len__(self) -> int:
        return int(self.indices.shape[0])


def split_train_val(image_set: ImageSet, n_train: int) -> Tuple[ImageSet, ImageSet]:
    """
    Split an image set into leading train rows and trailing validation rows.

    Args:
        image_set: Source images (typically the MNIST train file)
        n_train: Number of leading rows kept for training

    Returns:
        (train, validation) with order preserved

    Raises:
        ValueError: If n_train is negative or exceeds the set size
    """
    total = len(image_set)
    if n_train < 0 or n_train > total:
        raise ValueError(f"n_train={n_train} must lie in [0, {total}]")

    train = ImageSet(image_set.pixels[:n_train], image_set.labels[:n_train], Split.TRAIN)
    validation = ImageSet(
        image_set.pixels[n_train:], image_set.labels[n_train:], Split.VALIDATION
    )
    logger.info(f"Split {total} images into {len(train)} train / {len(validation)} validation")
    return train, validation


def sample_labeled_subset(image_set: ImageSet, k: int, seed: int) -> LabeledSubset:
    """
    Draw exactly k examples of every class without replacement.

    Args:
        image_set: Labeled source images
        k: Labels per class
        seed: Random seed; the same seed always yields the same subset

    Returns:
        LabeledSubset with 10 * k unique indices, grouped by class

    Raises:
        ValueError: If k is not positive
        InsufficientClassError: If some class has fewer than k members
    """
    indices = sample_label_indices(image_set.labels, k, seed)
    return LabeledSubset(indices=indices, k=k, seed=seed)


def sample_label_indices(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Indices of k randomly chosen members of every class, grouped by class."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")

    rng = np.random.default_rng(seed)
    chosen = []
    for label in range(NUM_CLASSES):
        members = np.flatnonzero(labels == label)
        if members.shape[0] < k:
            raise InsufficientClassError(
                f"Class {label} has {members.shape[0]} members, fewer than k={k}"
            )
        chosen.append(rng.choice(members, size=k, replace=False))

    return np.concatenate(chosen).astype(np.int64)
