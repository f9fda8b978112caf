"""
Exact 1-nearest-neighbour classification by blocked brute force.
"""

import logging
from enum import Enum
from typing import Union

import numpy as np

from src.utils.errors import ZeroVectorError

logger = logging.getLogger(__name__)

DEFAULT_BLOCK = 1024


class DistanceMetric(str, Enum):
    """Distances supported by the nearest-neighbour classifier."""
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


def _unit_rows(matrix: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    zero = np.flatnonzero(norms[:, 0] == 0.0)
    if zero.size:
        raise ZeroVectorError(f"Cosine distance undefined for zero {what} vectors {zero[:10].tolist()}")
    return matrix / norms


def knn_classify(
    train_reps: np.ndarray,
    train_labels: np.ndarray,
    queries: np.ndarray,
    metric: Union[DistanceMetric, str] = DistanceMetric.EUCLIDEAN,
    block_size: int = DEFAULT_BLOCK,
) -> np.ndarray:
    """
    Label every query with the label of its nearest training point.

    Distance ties go to the lowest training index.

    Args:
        train_reps: N x p training representations
        train_labels: length-N labels
        queries: Q x p query representations
        metric: "euclidean" or "cosine"
        block_size: Queries processed per distance block

    Returns:
        length-Q predicted labels

    Raises:
        ValueError: On an empty training set or mismatched dimensions
        ZeroVectorError: For a zero vector under the cosine metric
    """
    metric = DistanceMetric(metric)
    train = np.atleast_2d(np.asarray(train_reps, dtype=np.float64))
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    train_labels = np.asarray(train_labels)
    if train.shape[0] == 0:
        raise ValueError("1-NN needs at least one training point")
    if train.shape[0] != train_labels.shape[0]:
        raise ValueError(f"{train.shape[0]} training points but {train_labels.shape[0]} labels")
    if train.shape[1] != queries.shape[1]:
        raise ValueError(f"Dimension mismatch: train {train.shape[1]}, queries {queries.shape[1]}")

    if metric is DistanceMetric.COSINE:
        train = _unit_rows(train, "training")
        queries = _unit_rows(queries, "query")
        train_sq = None
    else:
        train_sq = np.einsum("ij,ij->i", train, train)

    predictions = np.empty(queries.shape[0], dtype=train_labels.dtype)
    for start in range(0, queries.shape[0], block_size):
        block = queries[start:start + block_size]
        if metric is DistanceMetric.COSINE:
            distances = -(block @ train.T)
        else:
            distances = train_sq[None, :] - 2.0 * (block @ train.T)
        predictions[start:start + block.shape[0]] = train_labels[np.argmin(distances, axis=1)]

    logger.debug(f"1-NN ({metric.value}) labelled {queries.shape[0]} queries against {train.shape[0]} points")
    return predictions
