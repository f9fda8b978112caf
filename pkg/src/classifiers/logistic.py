"""
Multinomial logistic regression with weight decay, trained by full-batch
gradient descent under the same accept/reject step rule as dictionary
learning.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from src.coding.ista import adapt_rate
from src.data.image_set import NUM_CLASSES
from src.utils.errors import TrainingDivergenceError

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 50_000
GRADIENT_TOLERANCE = 1e-6
INITIAL_RATE = 1.0


@dataclass(frozen=True)
class LinearModel:
    """
    Softmax classifier.

    Attributes:
        W: classes x p weights
        b: classes bias (not regularized)
        lam_w: Weight decay used for training
        steps: Gradient steps taken
        converged: Whether the gradient norm fell below tolerance
    """

    W: np.ndarray
    b: np.ndarray
    lam_w: float
    steps: int = 0
    converged: bool = False
    loss: float = float("nan")

    def decision(self, X: np.ndarray) -> np.ndarray:
        return np.atleast_2d(np.asarray(X, dtype=np.float64)) @ self.W.T + self.b

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.decision(X), axis=1)


def logreg_loss_and_gradient(
    W: np.ndarray,
    b: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    lam_w: float,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Mean cross-entropy plus lam_w ||W||^2, with gradients.

    Returns:
        (loss, dW, db)
    """
    n = X.shape[0]
    logits = X @ W.T + b
    data_loss = -np.mean(log_softmax(logits, axis=1)[np.arange(n), y])
    loss = float(data_loss + lam_w * np.sum(W * W))

    d_logits = softmax(logits, axis=1)
    d_logits[np.arange(n), y] -= 1.0
    d_logits /= n
    dW = d_logits.T @ X + 2.0 * lam_w * W
    db = d_logits.sum(axis=0)
    return loss, dW, db


def train_logreg(
    reps: np.ndarray,
    labels: np.ndarray,
    lam_w: float,
    max_steps: int = DEFAULT_MAX_STEPS,
    tol: float = GRADIENT_TOLERANCE,
    classes: int = NUM_CLASSES,
    eta: float = INITIAL_RATE,
    W0: Optional[np.ndarray] = None,
) -> LinearModel:
    """
    Fit a weight-decayed softmax classifier.

    Stops when the gradient norm drops below ``tol`` or after ``max_steps``
    proposals.

    Args:
        reps: N x p representations
        labels: length-N integer labels
        lam_w: Weight decay (>= 0)
        max_steps: Step budget
        tol: Gradient norm tolerance
        classes: Number of classes
        eta: Initial learning rate
        W0: Optional initial weights (zeros otherwise)

    Returns:
        LinearModel

    Raises:
        ValueError: If lam_w is negative or the inputs are empty
        TrainingDivergenceError: If the initial loss is not finite
    """
    if lam_w < 0:
        raise ValueError(f"lam_w must be nonnegative, got {lam_w}")
    X = np.atleast_2d(np.asarray(reps, dtype=np.float64))
    y = np.asarray(labels, dtype=np.intp)
    if X.shape[0] == 0 or X.shape[0] != y.shape[0]:
        raise ValueError(f"Need matching nonempty inputs, got {X.shape[0]} rows and {y.shape[0]} labels")

    W = np.zeros((classes, X.shape[1])) if W0 is None else np.array(W0, dtype=np.float64)
    b = np.zeros(classes)
    loss, dW, db = logreg_loss_and_gradient(W, b, X, y, lam_w)
    if not np.isfinite(loss):
        raise TrainingDivergenceError(f"Initial logistic loss is {loss}")

    converged = False
    step = 0
    for step in range(1, max_steps + 1):
        if np.sqrt(np.sum(dW * dW) + np.sum(db * db)) < tol:
            converged = True
            break
        W_new, b_new = W - eta * dW, b - eta * db
        new_loss, new_dW, new_db = logreg_loss_and_gradient(W_new, b_new, X, y, lam_w)
        accepted, eta = adapt_rate(loss, new_loss, eta)
        if accepted:
            W, b, loss, dW, db = W_new, b_new, new_loss, new_dW, new_db
        if eta < np.finfo(np.float64).tiny:
            break

    logger.debug(
        f"Logistic regression lam_w={lam_w}: loss={loss:.6f} after {step} steps "
        f"({'converged' if converged else 'budget exhausted'})"
    )
    return LinearModel(W=W, b=b, lam_w=float(lam_w), steps=step, converged=converged, loss=loss)
