"""
Experiment Runner

Coordinates the stages of an experiment: dictionary learning, exact
inference, sensitivity histograms, gain spectra, filter pair statistics and
the supervised evaluation sweep. Every stage reads its inputs from, and
writes its artifacts to, one output directory.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.analysis import (
    amplitude_spectrum,
    draw_direction,
    filter_pair_stats,
    max_cancellation,
    overlap_distribution,
    rip_range,
    sensitivity_histogram,
    svd_gain_spectrum,
)
from src.analysis.histogram import SensitivityHistogram
from src.classifiers import (
    RepresentationSplits,
    TrainedMLP,
    create_random_net,
    evaluation_sweep,
    load_mlp,
    save_mlp,
    train_mlp,
)
from src.coding import (
    Dictionary,
    DictionaryTrainer,
    infer_batch,
    load_checkpoint,
    save_checkpoint,
    sparsity_stats,
    stack_codes,
    uniqueness_check,
)
from src.coding.types import GENERIC_MARGIN
from src.data import ImageSet, load_mnist, split_train_val, synthetic_digits
from src.perturbations import PerturbationKind
from src.experiment.config import ExperimentConfig, save_config
from src.experiment.reports import emit_report, write_manifest
from src.representations import BaseRepresentation, RepresentationFactory
from src.utils.artifacts import load_arrays, save_arrays
from src.utils.errors import AnalysisError, ConfigError, MissingArtifactError, StaleArtifactError
from src.utils.helpers import sample_rng

logger = logging.getLogger(__name__)

SPLITS = ("train", "validation")


def lam_tag(lam: float) -> str:
    """File name fragment of a sparsity weight, e.g. ``lam0.3``."""
    return f"lam{lam:g}"


class ExperimentRunner:
    """
    Runs experiment stages against one output directory.

    Usage:
        runner = ExperimentRunner(load_config("config/desk_scale.yaml"))
        runner.train_dictionary(0.3)
        runner.run_sensitivity("sparse", 0.3)
        runner.finish("sensitivity")
    """

    def __init__(self, config: ExperimentConfig):
        """
        Initialize the runner.

        Args:
            config: Validated experiment configuration
        """
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.artifacts: List[Path] = []
        self._data: Optional[Tuple[ImageSet, ImageSet]] = None
        self._dictionaries: Dict[float, Dictionary] = {}
        self._mlp: Optional[TrainedMLP] = None

        logger.info(f"Experiment runner initialized (config {config.config_hash()}, output {self.output_dir})")

    # Paths and provenance

    def dictionary_path(self, lam: float) -> Path:
        return self.output_dir / "dictionaries" / f"dictionary_{lam_tag(lam)}.npz"

    def state_path(self, lam: float) -> Path:
        return self.output_dir / "dictionaries" / f"dictionary_{lam_tag(lam)}.state.npz"

    def codes_dir(self, lam: float) -> Path:
        return self.output_dir / "codes" / lam_tag(lam)

    def mlp_path(self) -> Path:
        return self.output_dir / "models" / "mlp.npz"

    def report_path(self, name: str) -> Path:
        return self.output_dir / "reports" / name

    def provenance(self, **extra) -> Dict[str, object]:
        return {"config_hash": self.config.config_hash(), "seed": self.config.seed, **extra}

    def _emit(self, results, name: str, format: str = "csv", columns=None, **provenance) -> Path:
        path = emit_report(results, self.report_path(name), format, columns, self.provenance(**provenance))
        self.artifacts.append(path)
        return path

    # Data

    def load_data(self) -> Tuple[ImageSet, ImageSet]:
        """
        Training and validation images.

        Returns:
            (train, validation), the training split truncated to
            ``train_images`` when set

        Raises:
            ConfigError: If real data is requested without a data directory
        """
        if self._data is not None:
            return self._data

        config = self.config
        if config.synthetic:
            images = synthetic_digits(config.synthetic_count, side=config.synthetic_side, seed=config.seed)
            train, validation = split_train_val(images, min(config.n_train, len(images)))
        else:
            if config.data_dir is None:
                raise ConfigError(
                    "No data directory configured; set data_dir, SPARSE_SENSITIVITY_DATA_DIR or --synthetic"
                )
            train, validation = load_mnist(config.data_dir, config.n_train)

        if config.train_images is not None and config.train_images < len(train):
            train = train.subset(np.arange(config.train_images))

        logger.info(f"Loaded {len(train)} training and {len(validation)} validation images")
        self._data = (train, validation)
        return self._data

    def _split(self, split: str, limit: Optional[int] = None) -> ImageSet:
        if split not in SPLITS:
            raise ConfigError(f"Unknown split {split!r}; expected one of {SPLITS}")
        images = self.load_data()[SPLITS.index(split)]
        if limit is not None and limit < len(images):
            images = images.subset(np.arange(limit))
        return images

    # Dictionary learning

    def train_dictionary(self, lam: float) -> Dictionary:
        """
        Learn (or resume learning) the dictionary for one sparsity weight.

        Writes the dictionary checkpoint, the objective curve and a JSON
        summary. An interrupted run resumes from its last state checkpoint.
        """
        config = self.config
        train, _ = self.load_data()
        stage = config.stage_hash("dictionary", lam)
        total = config.iterations_for(lam)
        state_path = self.state_path(lam)

        try:
            trainer = DictionaryTrainer.restore(state_path, train.pixels, expected_hash=stage)
        except MissingArtifactError:
            trainer = DictionaryTrainer(
                train.pixels, lam=lam, n_atoms=config.n_atoms, seed=config.seed, precision=config.precision
            )
        except StaleArtifactError as e:
            logger.warning(f"Discarding stale training state: {e}")
            trainer = DictionaryTrainer(
                train.pixels, lam=lam, n_atoms=config.n_atoms, seed=config.seed, precision=config.precision
            )

        remaining = total - trainer.state.step
        if remaining > 0:
            trainer.run(
                remaining,
                checkpoint=lambda t: t.save_state(state_path, stage_hash=stage),
                checkpoint_every=config.checkpoint_every,
            )

        dictionary = trainer.dictionary()
        state = trainer.state
        self.artifacts.append(
            save_checkpoint(self.dictionary_path(lam), dictionary, config.seed, state.step, stage_hash=stage)
        )
        state_path.unlink(missing_ok=True)

        tag = lam_tag(lam)
        curve = [{"update": i, "objective": value} for i, value in enumerate(state.history)]
        self._emit(curve, f"objective_{tag}.csv", columns=["update", "objective"], lam=lam)
        self._emit(
            {
                "lam": lam,
                "m": dictionary.m,
                "n": dictionary.n,
                "iterations": state.step,
                "final_objective": state.objective,
                "accepted_code_steps": state.accepted_code,
                "accepted_dictionary_steps": state.accepted_dict,
                "precision": state.precision.value,
                "max_pairwise_overlap": uniqueness_check(dictionary),
                "training_active_fraction": sparsity_stats(trainer.codes)["mean_active_fraction"],
            },
            f"dictionary_{tag}.json",
            format="json",
            lam=lam,
        )
        self._dictionaries[lam] = dictionary
        return dictionary

    def load_dictionary(self, lam: float) -> Dictionary:
        """
        Trained dictionary of this configuration.

        Raises:
            MissingArtifactError: If ``train-dict`` has not been run
            StaleArtifactError: If the checkpoint belongs to another configuration
        """
        if lam not in self._dictionaries:
            stage = self.config.stage_hash("dictionary", lam)
            self._dictionaries[lam] = load_checkpoint(self.dictionary_path(lam), expected_hash=stage).dictionary
        return self._dictionaries[lam]

    # Inference

    def infer_codes(self, lam: float, split: str = "train", limit: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Exact codes of a split, computed in resumable chunks.

        Chunks already on disk with the current stage hash are reused.

        Returns:
            (T x n codes, length-T threshold margins)
        """
        config = self.config
        dictionary = self.load_dictionary(lam)
        images = self._split(split, limit)
        stage = config.stage_hash("codes", lam)
        chunk_size = config.infer_chunk

        code_blocks, margin_blocks = [], []
        for start in range(0, len(images), chunk_size):
            rows = min(chunk_size, len(images) - start)
            path = self.codes_dir(lam) / f"{split}_{start:07d}.npz"
            try:
                _, arrays = load_arrays(path, expected_hash=stage)
                if arrays["codes"].shape[0] < rows:
                    raise StaleArtifactError(f"{path} holds {arrays['codes'].shape[0]} rows, expected {rows}")
                arrays = {name: values[:rows] for name, values in arrays.items()}
            except (MissingArtifactError, StaleArtifactError):
                codes = infer_batch(
                    images.pixels[start:start + rows],
                    dictionary,
                    lam,
                    max_iters=config.infer_max_iters,
                    check_every=config.infer_check_every,
                    precision=config.precision,
                )
                arrays = {
                    "codes": stack_codes(codes),
                    "margins": np.array([code.margin for code in codes], dtype=np.float64),
                }
                save_arrays(path, {"kind": "codes", "lam": lam, "split": split, "start": start, "stage_hash": stage},
                            **arrays)
                logger.info(f"Inferred {split} codes {start}..{start + rows} of {len(images)}")
            code_blocks.append(arrays["codes"])
            margin_blocks.append(arrays["margins"])

        if not code_blocks:
            return np.zeros((0, dictionary.n)), np.zeros(0)
        return np.vstack(code_blocks), np.concatenate(margin_blocks)

    def run_infer(self, lam: float, split: str = "train", limit: Optional[int] = None) -> Dict[str, object]:
        """Infer exact codes and report their sparsity and genericity."""
        R, margins = self.infer_codes(lam, split, limit)
        stats = sparsity_stats(R)
        active = np.count_nonzero(R, axis=1)
        rows = [
            {
                "image": i,
                "active": int(active[i]),
                "active_fraction": float(stats["active_fraction"][i]),
                "margin": float(margins[i]),
                "generic": bool(margins[i] >= GENERIC_MARGIN),
            }
            for i in range(R.shape[0])
        ]
        tag = lam_tag(lam)
        self._emit(rows, f"codes_{tag}_{split}.csv",
                   columns=["image", "active", "active_fraction", "margin", "generic"], lam=lam, split=split)
        summary = {
            "lam": lam,
            "split": split,
            "images": R.shape[0],
            "mean_active": stats["mean_active"],
            "mean_active_fraction": stats["mean_active_fraction"],
            "non_generic": int(np.sum(margins < GENERIC_MARGIN)),
        }
        self._emit(summary, f"codes_{tag}_{split}.json", format="json", lam=lam, split=split)
        return summary

    # Supervised baseline and random features

    def ensure_mlp(self) -> TrainedMLP:
        """Load the trained MLP of this configuration, training it if absent or stale."""
        if self._mlp is not None:
            return self._mlp

        config = self.config
        stage = config.stage_hash("mlp")
        try:
            self._mlp = load_mlp(self.mlp_path(), expected_hash=stage)
            return self._mlp
        except (MissingArtifactError, StaleArtifactError):
            logger.info("No usable MLP checkpoint; training one")

        train, validation = self.load_data()
        mlp = train_mlp(
            train,
            seed=config.seed,
            validation_set=validation,
            hidden=config.mlp_hidden,
            schedule=config.mlp_schedule,
            batch_size=config.mlp_batch_size,
        )
        self.artifacts.append(save_mlp(self.mlp_path(), mlp, config.seed, stage_hash=stage))
        self._emit(mlp.log, "mlp_training.csv", columns=["step", "rate", "loss"])
        self._emit(
            {"train_accuracy": mlp.train_accuracy, "validation_accuracy": mlp.validation_accuracy},
            "mlp.json",
            format="json",
        )
        self._mlp = mlp
        return mlp

    def representation(self, kind: str, lam: Optional[float] = None) -> BaseRepresentation:
        """Build one of the four compared representations."""
        config = self.config
        train, _ = self.load_data()
        if kind == "pixels":
            return RepresentationFactory.create(kind, m=train.dim)
        if kind == "sparse":
            return RepresentationFactory.create(
                kind,
                dictionary=self.load_dictionary(config.lam if lam is None else lam),
                max_iters=config.infer_max_iters,
                check_every=config.infer_check_every,
                precision=config.precision,
            )
        if kind == "mlp":
            return RepresentationFactory.create(kind, mlp=self.ensure_mlp())
        if kind == "random":
            net = create_random_net(m=train.dim, width=config.random_width, seed=config.seed)
            return RepresentationFactory.create(kind, net=net)
        return RepresentationFactory.create(kind)

    # Sensitivity

    def run_sensitivity(self, kind: str, lam: Optional[float] = None) -> SensitivityHistogram:
        """Directional derivative histograms of one representation."""
        config = self.config
        train, _ = self.load_data()
        lam = config.lam if lam is None else lam
        rep = self.representation(kind, lam)
        histogram = sensitivity_histogram(
            rep.jacobian,
            train,
            samples=config.sensitivity_samples,
            seed=config.seed,
            representation=rep.name,
            grid_size=config.distortion_grid,
            std=config.distortion_std,
        )

        stem = f"sensitivity_{kind}_{lam_tag(lam)}" if kind == "sparse" else f"sensitivity_{kind}"
        extra = {"lam": lam} if kind == "sparse" else {}
        self._emit(histogram.rows(), f"{stem}.csv",
                   columns=["representation", "kind", "sample", "image", "derivative"], **extra)

        bins = histogram.bins()
        kinds = [k for k in PerturbationKind if k in bins]
        bin_rows = []
        if kinds:
            edges = bins[kinds[0]][1]
            for b in range(len(edges) - 1):
                row = {"bin": b, "lower": edges[b], "upper": edges[b + 1]}
                row.update({f"count_{k.value}": int(bins[k][0][b]) for k in kinds})
                bin_rows.append(row)
        self._emit(bin_rows, f"{stem}_bins.csv",
                   columns=["bin", "lower", "upper"] + [f"count_{k.value}" for k in kinds], **extra)
        self._emit(histogram.summary(), f"{stem}.json", format="json", **extra)
        return histogram

    # Spectra

    def run_spectrum(self, lam: float) -> Dict[str, object]:
        """
        Gain spectrum of the first generic image, amplitude spectra of the
        three perturbation kinds and the RIP range.

        Directions are spread over every generic image among the spectrum
        images; each is projected on the singular basis of its own image and
        the squared overlaps are averaged per index.
        """
        config = self.config
        dictionary = self.load_dictionary(lam)
        images = self._split("train", config.spectrum_images)
        R, margins = self.infer_codes(lam, "train", config.spectrum_images)
        candidates = [t for t in range(R.shape[0]) if margins[t] >= GENERIC_MARGIN and np.any(R[t])]
        if not candidates:
            raise AnalysisError("No generic image with a nonempty code among the spectrum images")
        spectra = {t: svd_gain_spectrum(dictionary.atoms[:, np.flatnonzero(R[t])]) for t in candidates}
        first = candidates[0]
        spectrum = spectra[first]
        cancellation = max_cancellation(spectrum)

        owners = [candidates[d % len(candidates)] for d in range(config.spectrum_directions)]
        amplitudes = {}
        for kind in PerturbationKind:
            power = np.zeros(images.dim)
            for t in candidates:
                directions = [
                    draw_direction(kind, images.pixels[t], images, t, sample_rng(config.seed, d, kind.key + 1),
                                   config.distortion_grid, config.distortion_std).delta
                    for d, owner in enumerate(owners) if owner == t
                ]
                if directions:
                    power += len(directions) * amplitude_spectrum(np.asarray(directions), spectra[t]) ** 2
            amplitudes[kind] = np.sqrt(power / len(owners))

        ks = np.array([spectra[t].k for t in candidates])
        rows = []
        for i in range(images.dim):
            contributing = [spectra[t] for t in candidates if i < spectra[t].k]
            row = {
                "index": i,
                "sigma": float(np.mean([s.sigma[i] for s in contributing])) if contributing else None,
                "gain": float(np.sum([s.gains[i] for s in contributing]) / len(candidates)),
            }
            row.update({f"amplitude_{kind.value}": amplitudes[kind][i] for kind in PerturbationKind})
            rows.append(row)
        tag = lam_tag(lam)
        self._emit(rows, f"spectrum_{tag}.csv",
                   columns=["index", "sigma", "gain"] + [f"amplitude_{k.value}" for k in PerturbationKind],
                   lam=lam, images=len(candidates))

        supports = [np.flatnonzero(R[t]) for t in candidates]
        support_size = max(1, int(np.median(ks)))
        rip = rip_range(dictionary, support_size, config.rip_trials, config.seed, observed_supports=supports)

        summary = {
            "lam": lam,
            "image": first,
            "images": len(candidates),
            "k": spectrum.k,
            "sigma_min": cancellation.sigma,
            "max_gain": float(spectrum.gains[0]),
            "min_gain": float(spectrum.gains[-1]),
            "rip": rip.as_dict(),
        }
        self._emit(summary, f"spectrum_{tag}.json", format="json", lam=lam)
        return summary

    # Filter pairs

    def run_pairs(self, lam: float) -> Dict[str, object]:
        """Most overlapping filter pairs and the overlaps of one image's active filters."""
        config = self.config
        dictionary = self.load_dictionary(lam)
        report = filter_pair_stats(dictionary, threshold=config.pair_threshold, top=config.pair_top)
        tag = lam_tag(lam)
        self._emit([p.as_dict() for p in report.pairs], f"pairs_{tag}.csv",
                   columns=["i", "j", "overlap", "mean_i", "mean_j", "mean_difference"], lam=lam)

        R, _ = self.infer_codes(lam, "train", config.spectrum_images)
        nonempty = [t for t in range(R.shape[0]) if np.any(R[t])]
        overlaps = np.zeros(0)
        if nonempty:
            overlaps = overlap_distribution(dictionary.atoms[:, np.flatnonzero(R[nonempty[0]])])
        self._emit([{"overlap": float(v)} for v in overlaps], f"overlaps_{tag}.csv", columns=["overlap"], lam=lam)

        summary = {
            "lam": lam,
            **report.summary(),
            "max_pairwise_overlap": uniqueness_check(dictionary),
            "active_overlap_image": nonempty[0] if nonempty else None,
            "active_overlap_max": float(overlaps.max()) if overlaps.size else None,
        }
        self._emit(summary, f"pairs_{tag}.json", format="json", lam=lam)
        return summary

    # Classification

    def run_classify(self, lam: float, representations: Optional[List[str]] = None) -> Dict[str, object]:
        """Label-budget sweep over the configured representations."""
        config = self.config
        train, _ = self.load_data()
        evaluation = self._split("validation", config.eval_images)
        kinds = representations or config.representations

        splits: Dict[str, RepresentationSplits] = {}
        for kind in kinds:
            if kind == "sparse":
                train_reps, _ = self.infer_codes(lam, "train")
                eval_reps, _ = self.infer_codes(lam, "validation", config.eval_images)
            else:
                rep = self.representation(kind, lam)
                train_reps, eval_reps = rep.encode(train.pixels), rep.encode(evaluation.pixels)
            splits[kind] = RepresentationSplits(train=train_reps, evaluation=eval_reps)

        report = evaluation_sweep(
            splits,
            train.labels,
            evaluation.labels,
            k_grid=config.k_grid,
            seeds=config.eval_seeds,
            lam_w_grid=config.lam_w_grid,
            metrics=config.metrics,
            logreg_steps=config.logreg_steps,
            skip_infeasible=True,
        )
        tag = lam_tag(lam)
        self._emit(report.rows(), f"classify_{tag}.csv",
                   columns=["representation", "classifier", "metric", "k", "seed", "lam_w", "selection",
                            "train_accuracy", "test_accuracy"], lam=lam)
        summary = report.summary()
        self._emit(summary, f"classify_{tag}.json", format="json", lam=lam)
        return summary

    def finish(self, command: str) -> Path:
        """Save the configuration and the manifest of this run."""
        config_path = save_config(self.config, self.output_dir / "config.yaml")
        manifest = write_manifest(
            self.output_dir,
            command,
            self.config.config_hash(),
            self.config.model_dump(mode="json"),
            self.artifacts + [config_path],
        )
        logger.info(f"{command} finished; manifest at {manifest}")
        return manifest
