"""
Factory for creating representation instances.
"""

import logging
from typing import Any, Dict, List, Type

from src.representations.base import BaseRepresentation
from src.representations.mlp_hidden import MLPHiddenRepresentation
from src.representations.pixels import PixelRepresentation
from src.representations.random_net import RandomNetRepresentation
from src.representations.sparse_code import SparseCodeRepresentation

logger = logging.getLogger(__name__)


class RepresentationType:
    """Supported representation types."""
    PIXELS = "pixels"
    SPARSE = "sparse"
    MLP = "mlp"
    RANDOM = "random"

    @classmethod
    def all(cls) -> List[str]:
        """Get all supported representation types."""
        return [cls.PIXELS, cls.SPARSE, cls.MLP, cls.RANDOM]


class RepresentationFactory:
    """
    Factory for creating representations from their trained components.

    Usage:
        rep = RepresentationFactory.create("sparse", dictionary=dictionary)
        rep = RepresentationFactory.create("pixels", m=784)
        rep = RepresentationFactory.create("mlp", mlp=trained_mlp)
        rep = RepresentationFactory.create("random", net=random_net)
    """

    _representation_classes: Dict[str, Type[BaseRepresentation]] = {
        RepresentationType.PIXELS: PixelRepresentation,
        RepresentationType.SPARSE: SparseCodeRepresentation,
        RepresentationType.MLP: MLPHiddenRepresentation,
        RepresentationType.RANDOM: RandomNetRepresentation,
    }

    @classmethod
    def create(cls, kind: str, **components: Any) -> BaseRepresentation:
        """
        Create a representation.

        Args:
            kind: Representation type
            **components: Constructor arguments of the representation

        Returns:
            Instance of the matching representation

        Raises:
            ValueError: If the kind is unsupported or components are missing
        """
        if not kind:
            raise ValueError(f"Representation kind is required. Supported: {cls.supported()}")

        kind = kind.lower()
        if kind not in cls._representation_classes:
            raise ValueError(f"Unsupported representation: {kind}. Supported: {cls.supported()}")

        representation_class = cls._representation_classes[kind]
        try:
            representation = representation_class(**components)
        except TypeError as e:
            raise ValueError(f"Cannot build {kind} representation from {sorted(components)}: {e}") from e

        logger.info(f"Created {kind} representation with dimension {representation.dim}")
        return representation

    @classmethod
    def supported(cls) -> List[str]:
        """Get list of registered representation types."""
        return sorted(cls._representation_classes)

    @classmethod
    def register(cls, kind: str, representation_class: type) -> None:
        """
        Register a custom representation.

        Args:
            kind: Identifier of the representation
            representation_class: Class inheriting from BaseRepresentation
        """
        if not (isinstance(representation_class, type) and issubclass(representation_class, BaseRepresentation)):
            raise ValueError(
                f"Representation class must inherit from BaseRepresentation, got {representation_class}"
            )
        cls._representation_classes[kind.lower()] = representation_class
        logger.info(f"Registered custom representation: {kind}")
