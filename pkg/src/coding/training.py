"""
Dictionary learning by full-batch alternating minimization.

Every iteration proposes one ISTA step on all codes and one gradient step on
the dictionary. Each proposal is kept only if it lowers the full objective,
and its learning rate is adapted by ``adapt_rate``.
"""

import logging
import math
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

import numpy as np

from src.coding.ista import adapt_rate, dict_step, ista_step, objective
from src.coding.types import Dictionary, Precision, TrainState, normalize_columns
from src.data.image_set import ImageSet
from src.utils.artifacts import load_arrays, save_arrays
from src.utils.errors import NonFiniteObjectiveError

logger = logging.getLogger(__name__)

BASE_ITERATIONS = 5000
BASE_LAMBDA = 0.3
INITIAL_RATE = 1e-2

CheckpointCallback = Callable[["DictionaryTrainer"], None]


def default_iterations(lam: float) -> int:
    """
    Iteration budget for a given sparsity weight.

    5,000 iterations at lam=0.3, more for smaller lam and fewer for larger,
    scaled by sqrt(0.3 / lam).
    """
    if lam <= 0:
        return BASE_ITERATIONS * 4
    return max(1, int(round(BASE_ITERATIONS * math.sqrt(BASE_LAMBDA / lam))))


class DictionaryTrainer:
    """
    Stateful alternating optimizer for the sparse coding objective.

    Usage:
        trainer = DictionaryTrainer(images.pixels, lam=0.3, n_atoms=784, seed=0)
        trainer.run(iterations=5000)
        dictionary, codes = trainer.dictionary(), trainer.codes
    """

    def __init__(
        self,
        X: np.ndarray,
        lam: float,
        n_atoms: int,
        seed: int = 0,
        precision: Precision = Precision.SINGLE,
        eta_dict: float = INITIAL_RATE,
        eta_code: float = INITIAL_RATE,
    ):
        """
        Initialize dictionary and codes from a unit normal distribution.

        Args:
            X: T x m training images
            lam: Sparsity weight
            n_atoms: Number of dictionary columns n
            seed: Seed for the initialization
            precision: Starting floating point mode
            eta_dict: Initial dictionary learning rate
            eta_code: Initial code learning rate
        """
        if n_atoms < 1:
            raise ValueError(f"n_atoms must be at least 1, got {n_atoms}")
        if lam < 0:
            raise ValueError(f"lam must be nonnegative, got {lam}")

        self.lam = float(lam)
        self.seed = seed
        self.state = TrainState(
            eta_dict=eta_dict, eta_code=eta_code, precision=Precision(precision)
        )

        rng = np.random.default_rng(seed)
        m = X.shape[1]
        atoms = normalize_columns(rng.standard_normal((m, n_atoms)))
        codes = rng.standard_normal((X.shape[0], n_atoms))

        self._X64 = np.asarray(X, dtype=np.float64)
        self._cast(atoms, codes)

        initial = objective(self.X, self.codes, self.atoms, self.lam)
        if not np.isfinite(initial):
            raise NonFiniteObjectiveError("Initial objective is not finite")
        self.state.history.append(initial)

    def _cast(self, atoms: np.ndarray, codes: np.ndarray) -> None:
        dtype = self.state.precision.dtype
        self.X = self._X64.astype(dtype, copy=False)
        self.atoms = atoms.astype(dtype)
        self.codes = codes.astype(dtype)

    def _escalate(self) -> None:
        logger.info(f"Objective stalled at step {self.state.step}; switching to double precision")
        self.state.precision = Precision.DOUBLE
        self._cast(self.atoms, self.codes)
        # not an accepted update, so it stays out of the history
        self.state.baseline = float(objective(self.X, self.codes, self.atoms, self.lam))

    def _check_finite(self, loss: float, what: str) -> bool:
        if np.isfinite(loss):
            return True
        if self.state.precision is Precision.DOUBLE:
            raise NonFiniteObjectiveError(
                f"{what} update produced a non-finite objective at step {self.state.step}"
            )
        return False

    def step(self) -> bool:
        """
        Run one alternating iteration.

        Returns:
            True if at least one of the two proposals was accepted
        """
        state = self.state
        improved = False

        # 1. ISTA proposal on every code
        proposal = ista_step(self.codes, self.X, self.atoms, self.lam, state.eta_code)
        loss = objective(self.X, proposal, self.atoms, self.lam)
        finite = self._check_finite(loss, "Code")
        accepted, state.eta_code = adapt_rate(state.objective, loss, state.eta_code)
        if accepted:
            self.codes = proposal
            state.history.append(loss)
            state.accepted_code += 1
            improved = True

        # 2. Gradient proposal on the dictionary
        proposal = dict_step(self.atoms, self.X, self.codes, state.eta_dict)
        loss = objective(self.X, self.codes, proposal, self.lam)
        finite = self._check_finite(loss, "Dictionary") and finite
        accepted, state.eta_dict = adapt_rate(state.objective, loss, state.eta_dict)
        if accepted:
            self.atoms = proposal
            state.history.append(loss)
            state.accepted_dict += 1
            improved = True

        state.step += 1
        if (not improved or not finite) and state.precision is Precision.SINGLE:
            self._escalate()
        return improved

    def run(
        self,
        iterations: int,
        checkpoint: Optional[CheckpointCallback] = None,
        checkpoint_every: int = 500,
    ) -> TrainState:
        """
        Run a number of alternating iterations.

        Args:
            iterations: Number of iterations (at least 1)
            checkpoint: Optional callback invoked with the trainer
            checkpoint_every: Iterations between checkpoint callbacks

        Returns:
            Final TrainState
        """
        if iterations < 1:
            raise ValueError(f"iterations must be at least 1, got {iterations}")

        logger.info(
            f"Training dictionary: lam={self.lam}, n={self.atoms.shape[1]}, "
            f"T={self.X.shape[0]}, iterations={iterations}"
        )
        for _ in range(iterations):
            self.step()
            if self.state.step % 100 == 0:
                logger.debug(
                    f"step={self.state.step} objective={self.state.objective:.6f} "
                    f"eta_dict={self.state.eta_dict:.3e} eta_code={self.state.eta_code:.3e}"
                )
            if checkpoint and self.state.step % checkpoint_every == 0:
                checkpoint(self)

        logger.info(
            f"Finished at objective {self.state.objective:.6f} "
            f"({self.state.accepted_code} code / {self.state.accepted_dict} dictionary steps accepted)"
        )
        return self.state

    def save_state(self, path: Union[str, Path], stage_hash: Optional[str] = None) -> Path:
        """Persist the raw optimizer state so training can resume bit for bit."""
        state = self.state
        header = {
            "kind": "training_state",
            "lam": self.lam,
            "seed": self.seed,
            "step": state.step,
            "eta_dict": state.eta_dict,
            "eta_code": state.eta_code,
            "precision": state.precision.value,
            "accepted_dict": state.accepted_dict,
            "accepted_code": state.accepted_code,
            "baseline": state.baseline,
            "stage_hash": stage_hash,
        }
        return save_arrays(path, header, atoms=self.atoms, codes=self.codes, history=np.asarray(state.history))

    @classmethod
    def restore(
        cls,
        path: Union[str, Path],
        X: np.ndarray,
        expected_hash: Optional[str] = None,
    ) -> "DictionaryTrainer":
        """
        Rebuild a trainer from ``save_state`` output.

        Raises:
            MissingArtifactError: If the file does not exist
            StaleArtifactError: If the stage hash does not match
        """
        header, arrays = load_arrays(path, expected_hash=expected_hash)
        trainer = cls(X, lam=header["lam"], n_atoms=arrays["atoms"].shape[1], seed=header["seed"])
        trainer.state = TrainState(
            step=header["step"],
            eta_dict=header["eta_dict"],
            eta_code=header["eta_code"],
            history=arrays["history"].tolist(),
            precision=Precision(header["precision"]),
            accepted_dict=header["accepted_dict"],
            accepted_code=header["accepted_code"],
            baseline=header.get("baseline"),
        )
        trainer._cast(arrays["atoms"], arrays["codes"])
        logger.info(f"Resumed dictionary training at step {trainer.state.step}")
        return trainer

    def dictionary(self) -> Dictionary:
        """Current dictionary in double precision with freshly normalized columns."""
        return Dictionary.from_matrix(self.atoms.astype(np.float64), self.lam)


def train_dictionary(
    image_set: ImageSet,
    lam: float,
    n: int,
    iters: int,
    seed: int = 0,
    precision: Precision = Precision.SINGLE,
) -> Tuple[Dictionary, np.ndarray]:
    """
    Learn a dictionary for an image set.

    Args:
        image_set: Training images
        lam: Sparsity weight
        n: Number of dictionary elements
        iters: Number of alternating iterations
        seed: Initialization seed
        precision: Starting floating point mode

    Returns:
        (dictionary, T x n persistent codes)
    """
    trainer = DictionaryTrainer(image_set.pixels, lam=lam, n_atoms=n, seed=seed, precision=precision)
    trainer.run(iters)
    return trainer.dictionary(), trainer.codes.astype(np.float64)
