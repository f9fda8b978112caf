"""
Offline stand-in for MNIST: seven-segment style digits rendered with jitter.

Each pseudo-class is the seven-segment pattern of the corresponding digit.
Samples differ by shift, scale, shear, stroke width and ink intensity, so
sparse codes and classifiers see realistic within-class variation.
"""

import logging

import numpy as np

from src.data.image_set import NUM_CLASSES, ImageSet, Split

logger = logging.getLogger(__name__)

MIN_SIDE = 8

# Segment endpoints in unit-square coordinates (x right, y down).
_SEGMENTS = {
    "a": ((0.32, 0.18), (0.68, 0.18)),
    "b": ((0.68, 0.18), (0.68, 0.50)),
    "c": ((0.68, 0.50), (0.68, 0.82)),
    "d": ((0.32, 0.82), (0.68, 0.82)),
    "e": ((0.32, 0.50), (0.32, 0.82)),
    "f": ((0.32, 0.18), (0.32, 0.50)),
    "g": ((0.32, 0.50), (0.68, 0.50)),
}

_DIGIT_SEGMENTS = {
    0: "abcdef",
    1: "bc",
    2: "abged",
    3: "abgcd",
    4: "fgbc",
    5: "afgcd",
    6: "afgedc",
    7: "abc",
    8: "abcdefg",
    9: "abcdfg",
}


def _segment_distance(points: np.ndarray, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    direction = end - start
    t = np.clip((points - start) @ direction / (direction @ direction), 0.0, 1.0)
    nearest = start + t[:, None] * direction
    return np.linalg.norm(points - nearest, axis=1)


def _render(label: int, side: int, rng: np.random.Generator) -> np.ndarray:
    shift = rng.uniform(-0.06, 0.06, size=2)
    scale = rng.uniform(0.85, 1.1)
    shear = rng.uniform(-0.2, 0.2)
    width = rng.uniform(0.035, 0.06)
    ink = rng.uniform(0.8, 1.0)

    centre = np.array([0.5, 0.5])
    transform = scale * np.array([[1.0, shear], [0.0, 1.0]])

    coords = (np.arange(side) + 0.5) / side
    xs, ys = np.meshgrid(coords, coords)
    points = np.column_stack([xs.ravel(), ys.ravel()])

    intensity = np.zeros(side * side)
    for name in _DIGIT_SEGMENTS[label]:
        start, end = (np.asarray(p) for p in _SEGMENTS[name])
        start = centre + transform @ (start - centre) + shift
        end = centre + transform @ (end - centre) + shift
        distance = _segment_distance(points, start, end)
        intensity = np.maximum(intensity, np.exp(-0.5 * (distance / width) ** 2))

    return np.clip(ink * intensity, 0.0, 1.0)


def synthetic_digits(count: int, side: int = 28, seed: int = 0) -> ImageSet:
    """
    Render deterministic digit-like images with 10 balanced pseudo-classes.

    Args:
        count: Number of images
        side: Image side length (at least 8)
        seed: Random seed; identical seeds give bit-identical pixels

    Returns:
        ImageSet of shape count x side^2 tagged as the train split

    Raises:
        ValueError: If side < 8 or count < 0
    """
    if side < MIN_SIDE:
        raise ValueError(f"side must be at least {MIN_SIDE}, got {side}")
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")

    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(count) % NUM_CLASSES)
    pixels = np.zeros((count, side * side))
    for row, label in enumerate(labels):
        pixels[row] = _render(int(label), side, rng)

    logger.debug(f"Rendered {count} synthetic digits of side {side}")
    return ImageSet(pixels=pixels, labels=labels, split=Split.TRAIN)
