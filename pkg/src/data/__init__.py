"""
Image data: IDX loading, train/validation splits, labeled subsets and
synthetic digits for offline runs.
"""

from src.data.image_set import (
    NUM_CLASSES,
    ImageSet,
    LabeledSubset,
    Split,
    sample_label_indices,
    sample_labeled_subset,
    split_train_val,
)
from src.data.idx import load_idx, load_mnist, write_idx
from src.data.synthetic import synthetic_digits

__all__ = [
    "NUM_CLASSES",
    "ImageSet",
    "LabeledSubset",
    "Split",
    "sample_label_indices",
    "sample_labeled_subset",
    "split_train_val",
    "load_idx",
    "load_mnist",
    "write_idx",
    "synthetic_digits",
]
