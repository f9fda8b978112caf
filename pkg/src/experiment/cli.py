"""
Command line interface.

Every subcommand loads the configuration, takes the output directory lock,
runs one experiment stage and writes a manifest. Errors are reported on
stderr and mapped to exit codes: 1 configuration, 2 nonconvergence, 3 I/O.
"""

import logging
import sys
from typing import Callable, Optional, Tuple

import click

from src.experiment.config import ExperimentConfig, load_config
from src.experiment.core import ExperimentRunner
from src.experiment.reports import ExperimentLock
from src.utils.errors import InferenceNotConvergedError, SparseSensitivityError
from src.utils.helpers import load_env
from src.utils.logging import setup_logging

logger = logging.getLogger(__name__)

REPRESENTATION_CHOICES = ["pixels", "sparse", "mlp", "random"]


def _execute(ctx: click.Context, command: str, action: Callable[[ExperimentRunner], None], **updates) -> None:
    """Run one stage under the output lock and translate errors to exit codes."""
    try:
        config: ExperimentConfig = ctx.obj["config"].updated(**updates)
        runner = ExperimentRunner(config)
        with ExperimentLock(config.output_dir):
            action(runner)
            runner.finish(command)
    except InferenceNotConvergedError as e:
        click.echo(f"Error: {e}", err=True)
        for residual in e.residuals[:10]:
            click.echo("  " + " ".join(f"{key}={value}" for key, value in residual.items()), err=True)
        ctx.exit(e.exit_code)
    except SparseSensitivityError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(e.exit_code)
    except OSError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(3)


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Flat YAML configuration file")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override a configuration value")
@click.option("--data-dir", type=click.Path(file_okay=False), help="Directory holding the MNIST IDX files")
@click.option("--output-dir", type=click.Path(file_okay=False), help="Directory for checkpoints and reports")
@click.option("--seed", type=int, help="Experiment seed")
@click.option("--synthetic/--no-synthetic", default=None, help="Use generated digits instead of MNIST")
@click.option("--log-level", default="INFO", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--log-format", default="standard", show_default=True, type=click.Choice(["standard", "json"]))
@click.option("--log-file", type=click.Path(dir_okay=False), help="Also write logs to this file")
@click.pass_context
def main(
    ctx: click.Context,
    config_path: Optional[str],
    overrides: Tuple[str, ...],
    data_dir: Optional[str],
    output_dir: Optional[str],
    seed: Optional[int],
    synthetic: Optional[bool],
    log_level: str,
    log_format: str,
    log_file: Optional[str],
):
    """Sparse coding sensitivity experiments on handwritten digits."""
    load_env()
    setup_logging(level=log_level.upper(), log_file=log_file, format_type=log_format)
    try:
        config = load_config(
            config_path,
            overrides=overrides,
            data_dir=data_dir,
            output_dir=output_dir,
            seed=seed,
            synthetic=synthetic,
        )
    except SparseSensitivityError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(e.exit_code)
    ctx.obj = {"config": config}


@main.command("train-dict")
@click.option("--lambda", "lam", type=float, help="Sparsity weight (defaults to the configured lam)")
@click.option("--all-lambdas", is_flag=True, help="Train one dictionary per configured lambda")
@click.option("--iterations", type=int, help="Override the iteration budget")
@click.pass_context
def train_dict(ctx: click.Context, lam: Optional[float], all_lambdas: bool, iterations: Optional[int]):
    """Learn a dictionary and write its checkpoint and objective curve."""

    def action(runner: ExperimentRunner) -> None:
        lams = runner.config.lambdas if all_lambdas else [runner.config.lam if lam is None else lam]
        for value in lams:
            dictionary = runner.train_dictionary(value)
            click.echo(f"lambda={value:g}: trained {dictionary.m}x{dictionary.n} dictionary")

    _execute(ctx, "train-dict", action, dict_iterations=iterations)


@main.command()
@click.option("--lambda", "lam", type=float, help="Sparsity weight of the dictionary")
@click.option("--split", type=click.Choice(["train", "validation"]), default="train", show_default=True)
@click.option("--limit", type=click.IntRange(min=1), help="Only the first N images of the split")
@click.pass_context
def infer(ctx: click.Context, lam: Optional[float], split: str, limit: Optional[int]):
    """Compute exact sparse codes and report their sparsity."""

    def action(runner: ExperimentRunner) -> None:
        summary = runner.run_infer(runner.config.lam if lam is None else lam, split, limit)
        click.echo(
            f"{summary['images']} {split} codes, mean active fraction {summary['mean_active_fraction']:.4f}, "
            f"{summary['non_generic']} non-generic"
        )

    _execute(ctx, "infer", action)


@main.command()
@click.option("--representation", "representations", multiple=True,
              type=click.Choice(REPRESENTATION_CHOICES), help="Representation to measure (repeatable; default sparse)")
@click.option("--samples", type=click.IntRange(min=1), help="Number of sampled images")
@click.option("--lambda", "lam", type=float, help="Sparsity weight of the sparse representation")
@click.option("--grid-size", type=click.IntRange(min=1), help="Distortion control points per axis")
@click.option("--std", type=float, help="Distortion control displacement standard deviation in pixels")
@click.pass_context
def sensitivity(
    ctx: click.Context,
    representations: Tuple[str, ...],
    samples: Optional[int],
    lam: Optional[float],
    grid_size: Optional[int],
    std: Optional[float],
):
    """Histogram directional derivatives under noise, swap and distortion."""

    def action(runner: ExperimentRunner) -> None:
        for kind in representations or ("sparse",):
            histogram = runner.run_sensitivity(kind, lam)
            medians = ", ".join(
                f"{k.value}={histogram.median(k):.4f}" for k in histogram.values if histogram.count(k)
            )
            click.echo(f"{kind}: median derivatives {medians} ({histogram.skipped} non-generic skipped)")

    _execute(ctx, "sensitivity", action,
             sensitivity_samples=samples, distortion_grid=grid_size, distortion_std=std)


@main.command()
@click.option("--lambda", "lam", type=float, help="Sparsity weight of the dictionary")
@click.pass_context
def spectrum(ctx: click.Context, lam: Optional[float]):
    """Gain and amplitude spectra of an active dictionary, plus the RIP range."""

    def action(runner: ExperimentRunner) -> None:
        summary = runner.run_spectrum(runner.config.lam if lam is None else lam)
        click.echo(
            f"image {summary['image']}: k={summary['k']}, sigma_min={summary['sigma_min']:.6f}, "
            f"max gain {summary['max_gain']:.4f}"
        )

    _execute(ctx, "spectrum", action)


@main.command()
@click.option("--lambda", "lam", type=float, help="Sparsity weight of the dictionary")
@click.option("--threshold", type=float, help="Minimum overlap of a reported pair")
@click.option("--top", type=click.IntRange(min=1), help="Number of pairs to report")
@click.pass_context
def pairs(ctx: click.Context, lam: Optional[float], threshold: Optional[float], top: Optional[int]):
    """Overlapping filter pairs and their normalized means."""

    def action(runner: ExperimentRunner) -> None:
        summary = runner.run_pairs(runner.config.lam if lam is None else lam)
        click.echo(f"{summary['pairs']} pairs, max overlap {summary['max_pairwise_overlap']:.4f}")

    _execute(ctx, "pairs", action, pair_threshold=threshold, pair_top=top)


@main.command()
@click.option("--lambda", "lam", type=float, help="Sparsity weight of the sparse representation")
@click.option("--representation", "representations", multiple=True,
              type=click.Choice(REPRESENTATION_CHOICES), help="Representation to evaluate (repeatable)")
@click.pass_context
def classify(ctx: click.Context, lam: Optional[float], representations: Tuple[str, ...]):
    """Nearest neighbor and logistic regression accuracy across label budgets."""

    def action(runner: ExperimentRunner) -> None:
        summary = runner.run_classify(runner.config.lam if lam is None else lam, list(representations) or None)
        for name, configurations in summary.items():
            for configuration, by_k in configurations.items():
                accuracies = ", ".join(f"k={k}: {value:.4f}" for k, value in by_k.items())
                click.echo(f"{name} {configuration}: {accuracies}")

    _execute(ctx, "classify", action)


@main.command("train-mlp")
@click.pass_context
def train_mlp(ctx: click.Context):
    """Train and checkpoint the supervised MLP baseline."""

    def action(runner: ExperimentRunner) -> None:
        mlp = runner.ensure_mlp()
        click.echo(f"MLP train accuracy {mlp.train_accuracy:.4f}, validation accuracy {mlp.validation_accuracy}")

    _execute(ctx, "train-mlp", action)


if __name__ == "__main__":
    sys.exit(main())
