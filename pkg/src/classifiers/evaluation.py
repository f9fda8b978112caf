"""
Label-budget sweep of nearest-neighbour and logistic classifiers over
several representations.

Weight decay for logistic regression is selected two ways: by the highest
accuracy on the evaluation split itself ("test" selection, which leaks the
evaluation labels into model selection), and by accuracy on the first half
of the evaluation split with the score reported on the second half
("validation" selection).
"""

import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from src.classifiers.knn import DistanceMetric, knn_classify
from src.classifiers.logistic import DEFAULT_MAX_STEPS, train_logreg
from src.classifiers.metrics import accuracy
from src.data.image_set import sample_label_indices
from src.utils.errors import ClassifierError, InsufficientClassError

logger = logging.getLogger(__name__)

K_GRID = (1, 3, 10, 30, 100, 300, 1000, 3000)
LAMBDA_W_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
SEEDS = (0, 1, 2, 3, 4)

KNN = "knn"
LOGREG = "logreg"


class RepresentationSplits(NamedTuple):
    """Precomputed representation of the training and evaluation images."""
    train: Optional[np.ndarray]
    evaluation: Optional[np.ndarray]


@dataclass(frozen=True)
class EvalRecord:
    """
    Accuracy of one sweep cell.

    ``selection`` is "none" for 1-NN, "sweep" for a logistic model at a
    fixed lam_w, and "test" or "validation" for the selected lam_w.
    """

    representation: str
    classifier: str
    metric: str
    k: int
    seed: int
    lam_w: Optional[float]
    selection: str
    train_accuracy: float
    test_accuracy: float

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class EvalReport:
    records: List[EvalRecord] = field(default_factory=list)

    def rows(self) -> List[Dict[str, Any]]:
        return [record.as_dict() for record in self.records]

    def summary(self) -> Dict[str, Dict[str, Dict[str, float]]]:
        """
        Mean test accuracy over seeds keyed by representation, then
        "classifier:metric:selection", then k.
        """
        grouped: Dict[tuple, List[float]] = defaultdict(list)
        for record in self.records:
            if record.selection == "sweep":
                continue
            key = (record.representation, f"{record.classifier}:{record.metric}:{record.selection}", str(record.k))
            grouped[key].append(record.test_accuracy)

        summary: Dict[str, Dict[str, Dict[str, float]]] = {}
        for (representation, configuration, k), values in grouped.items():
            summary.setdefault(representation, {}).setdefault(configuration, {})[k] = float(np.mean(values))
        return summary

    def mean_accuracy(self, representation: str, configuration: str, k: int) -> float:
        return self.summary()[representation][configuration][str(k)]


def _check_splits(name: str, splits: RepresentationSplits, n_train: int, n_eval: int) -> None:
    if splits.train is None or splits.evaluation is None:
        raise ClassifierError(f"Representation {name!r} is missing a split")
    if splits.train.shape[0] != n_train or splits.evaluation.shape[0] != n_eval:
        raise ClassifierError(
            f"Representation {name!r} has {splits.train.shape[0]}/{splits.evaluation.shape[0]} rows, "
            f"expected {n_train}/{n_eval}"
        )


def evaluation_sweep(
    representations: Mapping[str, RepresentationSplits],
    train_labels: np.ndarray,
    eval_labels: np.ndarray,
    k_grid: Sequence[int] = K_GRID,
    seeds: Sequence[int] = SEEDS,
    lam_w_grid: Sequence[float] = LAMBDA_W_GRID,
    metrics: Sequence[str] = (DistanceMetric.EUCLIDEAN.value, DistanceMetric.COSINE.value),
    classifiers: Sequence[str] = (KNN, LOGREG),
    logreg_steps: int = DEFAULT_MAX_STEPS,
    skip_infeasible: bool = False,
) -> EvalReport:
    """
    Evaluate every representation at every label budget and seed.

    Args:
        representations: Name -> precomputed train/evaluation matrices
        train_labels: Labels of the training images
        eval_labels: Labels of the evaluation images
        k_grid: Labels per class
        seeds: Seeds of the labeled subsets
        lam_w_grid: Weight decay values for logistic regression
        metrics: 1-NN distances
        classifiers: Subset of {"knn", "logreg"}
        logreg_steps: Step budget of each logistic fit
        skip_infeasible: Skip label budgets larger than the smallest class
            instead of raising

    Returns:
        EvalReport with one record per configuration cell

    Raises:
        ClassifierError: If a representation lacks a split
        InsufficientClassError: If a class is too small for some k and
            skip_infeasible is False
    """
    train_labels = np.asarray(train_labels)
    eval_labels = np.asarray(eval_labels)
    for name, splits in representations.items():
        _check_splits(name, splits, train_labels.shape[0], eval_labels.shape[0])

    half = eval_labels.shape[0] // 2
    report = EvalReport()

    for k in k_grid:
        for seed in seeds:
            try:
                subset = sample_label_indices(train_labels, k, seed)
            except InsufficientClassError:
                if not skip_infeasible:
                    raise
                logger.warning(f"Skipping k={k}: some class has fewer than {k} training images")
                break
            labels = train_labels[subset]

            for name, splits in representations.items():
                train_reps = splits.train[subset]

                if KNN in classifiers:
                    for metric in metrics:
                        train_pred = knn_classify(train_reps, labels, train_reps, metric)
                        test_pred = knn_classify(train_reps, labels, splits.evaluation, metric)
                        report.records.append(EvalRecord(
                            representation=name, classifier=KNN, metric=metric, k=k, seed=seed,
                            lam_w=None, selection="none",
                            train_accuracy=accuracy(train_pred, labels),
                            test_accuracy=accuracy(test_pred, eval_labels),
                        ))

                if LOGREG in classifiers:
                    report.records.extend(
                        _logreg_cell(name, train_reps, labels, splits.evaluation, eval_labels,
                                     k, seed, lam_w_grid, half, logreg_steps)
                    )

            logger.info(f"Evaluated k={k}, seed={seed} on {len(representations)} representations")

    return report


def _logreg_cell(
    name: str,
    train_reps: np.ndarray,
    labels: np.ndarray,
    eval_reps: np.ndarray,
    eval_labels: np.ndarray,
    k: int,
    seed: int,
    lam_w_grid: Sequence[float],
    half: int,
    steps: int,
) -> List[EvalRecord]:
    records = []
    validation_scores = []
    held_out_scores = []
    for lam_w in lam_w_grid:
        model = train_logreg(train_reps, labels, lam_w, max_steps=steps)
        predictions = model.predict(eval_reps)
        records.append(EvalRecord(
            representation=name, classifier=LOGREG, metric="softmax", k=k, seed=seed,
            lam_w=float(lam_w), selection="sweep",
            train_accuracy=accuracy(model.predict(train_reps), labels),
            test_accuracy=accuracy(predictions, eval_labels),
        ))
        validation_scores.append(accuracy(predictions[:half], eval_labels[:half]))
        held_out_scores.append(accuracy(predictions[half:], eval_labels[half:]))

    best_test = int(np.argmax([record.test_accuracy for record in records]))
    records.append(EvalRecord(**{**records[best_test].as_dict(), "selection": "test"}))

    best_validation = int(np.argmax(validation_scores))
    records.append(EvalRecord(**{
        **records[best_validation].as_dict(),
        "selection": "validation",
        "test_accuracy": held_out_scores[best_validation],
    }))
    return records
