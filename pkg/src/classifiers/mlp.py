"""
Two-layer rectified MLP trained with minibatch SGD on cross-entropy.

Its hidden layer serves as a supervised baseline representation with the
same dimension as the sparse codes.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import log_softmax, softmax

from src.classifiers.metrics import accuracy
from src.data.image_set import NUM_CLASSES, ImageSet
from src.utils.artifacts import load_arrays, save_arrays
from src.utils.errors import NonGenericInputError, TrainingDivergenceError

logger = logging.getLogger(__name__)

BATCH_SIZE = 64
DEFAULT_SCHEDULE: Tuple[Tuple[int, float], ...] = ((1000, 0.1), (1000, 0.01))


@dataclass
class TrainedMLP:
    """
    Weights of the two-layer network and its training log.

    Attributes:
        W1: hidden x m first-layer weights
        b1: hidden first-layer bias
        W2: classes x hidden readout weights
        b2: classes readout bias
        log: Loss records collected during training
    """

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    log: List[Dict[str, float]] = field(default_factory=list)
    train_accuracy: Optional[float] = None
    validation_accuracy: Optional[float] = None

    @property
    def hidden_dim(self) -> int:
        return self.W1.shape[0]

    def logits(self, X: np.ndarray) -> np.ndarray:
        return mlp_hidden(X, self) @ self.W2.T + self.b2

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.logits(X), axis=-1)

    def copy(self) -> "TrainedMLP":
        return TrainedMLP(
            W1=self.W1.copy(), b1=self.b1.copy(), W2=self.W2.copy(), b2=self.b2.copy(),
            log=list(self.log), train_accuracy=self.train_accuracy,
            validation_accuracy=self.validation_accuracy,
        )


def init_mlp(m: int, hidden: int = 784, classes: int = NUM_CLASSES, seed: int = 0) -> TrainedMLP:
    """Zero biases and normal weights with standard deviation 1/sqrt(fan_in)."""
    rng = np.random.default_rng(seed)
    return TrainedMLP(
        W1=rng.standard_normal((hidden, m)) / np.sqrt(m),
        b1=np.zeros(hidden),
        W2=rng.standard_normal((classes, hidden)) / np.sqrt(hidden),
        b2=np.zeros(classes),
    )


def mlp_hidden(x: np.ndarray, mlp: TrainedMLP) -> np.ndarray:
    """Rectified hidden activations of one image or a T x m batch."""
    return np.maximum(np.asarray(x, dtype=np.float64) @ mlp.W1.T + mlp.b1, 0.0)


def mlp_hidden_jacobian(x: np.ndarray, mlp: TrainedMLP) -> np.ndarray:
    """
    Jacobian of the hidden layer at one image: active rows of W1, zeros elsewhere.

    Raises:
        NonGenericInputError: If some hidden pre-activation is exactly zero
    """
    pre = mlp.W1 @ np.asarray(x, dtype=np.float64) + mlp.b1
    if np.any(pre == 0.0):
        raise NonGenericInputError("MLP hidden pre-activation is exactly zero")
    return np.where((pre > 0.0)[:, None], mlp.W1, 0.0)


def mlp_loss_and_gradients(
    mlp: TrainedMLP,
    X: np.ndarray,
    y: np.ndarray,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Mean cross-entropy of a batch and its gradients.

    Returns:
        (loss, {"W1": ..., "b1": ..., "W2": ..., "b2": ...})
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    batch = X.shape[0]

    pre = X @ mlp.W1.T + mlp.b1
    hidden = np.maximum(pre, 0.0)
    logits = hidden @ mlp.W2.T + mlp.b2
    loss = float(-np.mean(log_softmax(logits, axis=1)[np.arange(batch), y]))

    d_logits = softmax(logits, axis=1)
    d_logits[np.arange(batch), y] -= 1.0
    d_logits /= batch
    d_pre = (d_logits @ mlp.W2) * (pre > 0.0)
    gradients = {
        "W2": d_logits.T @ hidden,
        "b2": d_logits.sum(axis=0),
        "W1": d_pre.T @ X,
        "b1": d_pre.sum(axis=0),
    }
    return loss, gradients


def train_mlp(
    train_set: ImageSet,
    seed: int = 0,
    validation_set: Optional[ImageSet] = None,
    hidden: int = 784,
    schedule: Sequence[Tuple[int, float]] = DEFAULT_SCHEDULE,
    batch_size: int = BATCH_SIZE,
) -> TrainedMLP:
    """
    Train the two-layer network with plain minibatch SGD.

    Args:
        train_set: Labeled training images
        seed: Seed for initialization and batch sampling
        validation_set: Optional images for the final validation accuracy
        hidden: Hidden layer width
        schedule: (steps, learning rate) phases run in order
        batch_size: Images per SGD step

    Returns:
        TrainedMLP with final train/validation accuracy

    Raises:
        TrainingDivergenceError: If the loss becomes NaN or infinite
    """
    if len(train_set) == 0:
        raise ValueError("Cannot train an MLP on an empty set")

    mlp = init_mlp(train_set.dim, hidden=hidden, seed=seed)
    rng = np.random.default_rng([seed, 1])
    X, y = train_set.pixels, train_set.labels
    batch_size = min(batch_size, len(train_set))

    step = 0
    for steps, rate in schedule:
        logger.info(f"MLP phase: {steps} steps at learning rate {rate}")
        for _ in range(steps):
            batch = rng.choice(len(train_set), size=batch_size, replace=False)
            loss, gradients = mlp_loss_and_gradients(mlp, X[batch], y[batch])
            if not np.isfinite(loss):
                raise TrainingDivergenceError(f"MLP loss became {loss} at step {step}")
            for name, gradient in gradients.items():
                setattr(mlp, name, getattr(mlp, name) - rate * gradient)
            step += 1
            if step % 100 == 0:
                mlp.log.append({"step": step, "rate": rate, "loss": loss})
                logger.debug(f"MLP step {step}: loss={loss:.4f}")

    mlp.train_accuracy = accuracy(mlp.predict(X), y)
    if validation_set is not None and len(validation_set):
        mlp.validation_accuracy = accuracy(mlp.predict(validation_set.pixels), validation_set.labels)
    logger.info(
        f"MLP trained: train accuracy {mlp.train_accuracy:.4f}, "
        f"validation accuracy {mlp.validation_accuracy}"
    )
    return mlp


def save_mlp(path: Union[str, Path], mlp: TrainedMLP, seed: int, stage_hash: Optional[str] = None) -> Path:
    header = {
        "kind": "mlp",
        "seed": int(seed),
        "stage_hash": stage_hash,
        "train_accuracy": mlp.train_accuracy,
        "validation_accuracy": mlp.validation_accuracy,
        "log": mlp.log,
    }
    return save_arrays(path, header, W1=mlp.W1, b1=mlp.b1, W2=mlp.W2, b2=mlp.b2)


def load_mlp(path: Union[str, Path], expected_hash: Optional[str] = None) -> TrainedMLP:
    header, arrays = load_arrays(path, expected_hash=expected_hash)
    return TrainedMLP(
        W1=arrays["W1"], b1=arrays["b1"], W2=arrays["W2"], b2=arrays["b2"],
        log=header.get("log", []),
        train_accuracy=header.get("train_accuracy"),
        validation_accuracy=header.get("validation_accuracy"),
    )
