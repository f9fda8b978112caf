"""
Classification metrics.
"""

import numpy as np


def accuracy(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of predictions equal to the labels (0.0 for empty input)."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ValueError(f"Shape mismatch: {predictions.shape} predictions, {labels.shape} labels")
    if predictions.size == 0:
        return 0.0
    return float(np.mean(predictions == labels))
