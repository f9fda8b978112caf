"""
Baseline representations and the classifiers used to evaluate codes.
"""

from src.classifiers.evaluation import (
    K_GRID,
    LAMBDA_W_GRID,
    SEEDS,
    EvalRecord,
    EvalReport,
    RepresentationSplits,
    evaluation_sweep,
)
from src.classifiers.knn import DistanceMetric, knn_classify
from src.classifiers.logistic import LinearModel, logreg_loss_and_gradient, train_logreg
from src.classifiers.metrics import accuracy
from src.classifiers.mlp import (
    TrainedMLP,
    init_mlp,
    load_mlp,
    mlp_hidden,
    mlp_hidden_jacobian,
    mlp_loss_and_gradients,
    save_mlp,
    train_mlp,
)
from src.classifiers.random_features import (
    RandomNet,
    create_random_net,
    random_features,
    random_features_jacobian,
)

__all__ = [
    "K_GRID",
    "LAMBDA_W_GRID",
    "SEEDS",
    "EvalRecord",
    "EvalReport",
    "RepresentationSplits",
    "evaluation_sweep",
    "DistanceMetric",
    "knn_classify",
    "LinearModel",
    "logreg_loss_and_gradient",
    "train_logreg",
    "accuracy",
    "TrainedMLP",
    "init_mlp",
    "load_mlp",
    "mlp_hidden",
    "mlp_hidden_jacobian",
    "mlp_loss_and_gradients",
    "save_mlp",
    "train_mlp",
    "RandomNet",
    "create_random_net",
    "random_features",
    "random_features_jacobian",
]
