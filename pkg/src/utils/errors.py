"""
Exception hierarchy for the sparse sensitivity toolkit.

Every error raised on purpose by the library derives from
SparseSensitivityError. The ``exit_code`` attribute is what the CLI
returns when the error escapes a subcommand.
"""

from typing import Any, Dict, List, Optional


class SparseSensitivityError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


# Dataset

class DatasetError(SparseSensitivityError):
    """Problems reading, splitting or sampling image sets."""

    exit_code = 3


class IDXFormatError(DatasetError):
    """Bad magic number or truncated IDX payload."""


class DimensionMismatchError(DatasetError):
    """Image and label files disagree on the item count."""


class InsufficientClassError(DatasetError):
    """A class has fewer members than the requested labels per class."""

    exit_code = 1


# Sparse coding

class CodingError(SparseSensitivityError):
    """Failures of dictionary learning or sparse inference."""


class DictionaryCollapseError(CodingError):
    """A dictionary column collapsed to zero and cannot be renormalized."""


class NonFiniteObjectiveError(CodingError):
    """The training objective became NaN or infinite."""


class RankDeficientError(CodingError):
    """The active dictionary is singular, so the code is not unique."""


class InferenceNotConvergedError(CodingError):
    """Exact inference hit its iteration budget before the fixed point."""

    exit_code = 2

    def __init__(self, message: str, residuals: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.residuals = residuals or []


# Perturbations

class PerturbationError(SparseSensitivityError):
    """Problems generating perturbation directions."""


class DegenerateDirectionError(PerturbationError):
    """The perturbation direction is exactly zero."""


# Sensitivity analysis

class AnalysisError(SparseSensitivityError):
    """Problems in the locally linear analysis."""


class NonGenericInputError(AnalysisError):
    """A pre-activation sits at threshold, so the map is not differentiable."""


class SpectrumError(AnalysisError):
    """The singular value decomposition could not be computed."""


# Classifiers

class ClassifierError(SparseSensitivityError):
    """Problems training or applying classifiers."""


class ZeroVectorError(ClassifierError):
    """A zero representation vector was given to the cosine metric."""


class TrainingDivergenceError(ClassifierError):
    """A classifier loss became NaN or infinite."""

    exit_code = 2


# Experiment orchestration

class ExperimentError(SparseSensitivityError):
    """Problems orchestrating an experiment run."""


class ConfigError(ExperimentError):
    """Invalid experiment configuration."""


class MissingArtifactError(ExperimentError):
    """An upstream checkpoint required by a subcommand does not exist."""

    exit_code = 3


class StaleArtifactError(ExperimentError):
    """An upstream checkpoint was produced by a different configuration."""


class ExperimentLockedError(ExperimentError):
    """Another experiment process holds the output directory lock."""

    exit_code = 3


class ArtifactWriteError(ExperimentError):
    """A report or checkpoint could not be written."""

    exit_code = 3
