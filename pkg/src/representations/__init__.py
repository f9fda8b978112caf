"""
Image representations compared by the sensitivity and classification
experiments: pixels, sparse codes, MLP hidden units and random features.
"""

from src.representations.base import BaseRepresentation
from src.representations.factory import RepresentationFactory, RepresentationType
from src.representations.mlp_hidden import MLPHiddenRepresentation
from src.representations.pixels import PixelRepresentation
from src.representations.random_net import RandomNetRepresentation
from src.representations.sparse_code import SparseCodeRepresentation

__all__ = [
    "BaseRepresentation",
    "RepresentationFactory",
    "RepresentationType",
    "MLPHiddenRepresentation",
    "PixelRepresentation",
    "RandomNetRepresentation",
    "SparseCodeRepresentation",
]
