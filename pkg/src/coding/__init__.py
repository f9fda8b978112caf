"""
Sparse coding: dictionary learning and exact inference.
"""

from src.coding.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from src.coding.inference import (
    active_solution,
    check_fixed_point,
    infer_batch,
    infer_exact,
    sparsity_stats,
    stack_codes,
    threshold_margin,
)
from src.coding.ista import adapt_rate, dict_step, dictionary_gradient, ista_step, objective, shrink
from src.coding.training import DictionaryTrainer, default_iterations, train_dictionary
from src.coding.types import Dictionary, Precision, SparseCode, TrainState, uniqueness_check

__all__ = [
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "active_solution",
    "check_fixed_point",
    "infer_batch",
    "infer_exact",
    "sparsity_stats",
    "stack_codes",
    "threshold_margin",
    "adapt_rate",
    "dict_step",
    "dictionary_gradient",
    "ista_step",
    "objective",
    "shrink",
    "DictionaryTrainer",
    "default_iterations",
    "train_dictionary",
    "Dictionary",
    "Precision",
    "SparseCode",
    "TrainState",
    "uniqueness_check",
]
