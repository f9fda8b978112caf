"""
Sparse Sensitivity

Dictionary learning and exact sparse inference on handwritten digits, with
locally linear tools to measure how strongly the codes react to noise,
swaps and elastic distortions, and classifiers to compare them against
pixels, random features and a trained MLP.
"""

__version__ = "0.1.0"

from src.coding import Dictionary, infer_exact, train_dictionary
from src.experiment.core import ExperimentRunner

__all__ = ["Dictionary", "infer_exact", "train_dictionary", "ExperimentRunner"]
