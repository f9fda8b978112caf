#!/usr/bin/env python3
"""
Example usage of the Sparse Sensitivity library.

This script learns a small dictionary on generated digits and walks through
the sensitivity tools without touching MNIST.
"""

import logging

import numpy as np

from src.analysis import active_jacobian, max_cancellation, sensitivity_histogram, svd_gain_spectrum
from src.coding import infer_exact, sparsity_stats, train_dictionary
from src.data import split_train_val, synthetic_digits
from src.perturbations import PerturbationKind
from src.representations import RepresentationFactory
from src.utils.helpers import load_env
from src.utils.logging import setup_logging


def example_train_and_infer():
    """Example: Learn a dictionary and compute one exact code."""
    print("\n" + "="*60)
    print("Example 1: Dictionary Learning and Exact Inference")
    print("="*60 + "\n")

    images = synthetic_digits(300, side=12, seed=0)
    train, _ = split_train_val(images, 250)

    dictionary, codes = train_dictionary(train, lam=0.3, n=144, iters=200, seed=0)
    print(f"Dictionary: {dictionary.m} x {dictionary.n}")
    print(f"Training codes active fraction: {sparsity_stats(codes)['mean_active_fraction']:.3f}")

    code = infer_exact(train.pixels[0], dictionary, lam=0.3, check_every=100)
    print(f"Image 0: {code.k} active units, threshold margin {code.margin:.2e}")
    return train, dictionary, code


def example_spectrum(dictionary, code):
    """Example: Gain spectrum of the active filters."""
    print("\n" + "="*60)
    print("Example 2: Gain Spectrum")
    print("="*60 + "\n")

    if code.k == 0:
        print("Empty code, nothing to analyze")
        return

    spectrum = svd_gain_spectrum(dictionary.atoms[:, code.active])
    cancellation = max_cancellation(spectrum)
    print(f"k={spectrum.k}, smallest singular value {cancellation.sigma:.4f}")
    print(f"Largest gain {spectrum.gains[0]:.2f}, smallest gain {spectrum.gains[-1]:.2f}")

    J = active_jacobian(dictionary, code)
    print(f"Active Jacobian shape: {J.J.shape}")


def example_sensitivity(train, dictionary):
    """Example: Sensitivity histograms of sparse codes and pixels."""
    print("\n" + "="*60)
    print("Example 3: Sensitivity Histograms")
    print("="*60 + "\n")

    for kind, components in (("pixels", {"m": train.dim}), ("sparse", {"dictionary": dictionary, "check_every": 100})):
        rep = RepresentationFactory.create(kind, **components)
        histogram = sensitivity_histogram(rep.jacobian, train, samples=20, seed=0, representation=rep.name)
        medians = {k.value: round(histogram.median(k), 4) for k in PerturbationKind if histogram.count(k)}
        print(f"{rep.name}: {medians}")


def main():
    """Run all examples."""
    load_env()
    setup_logging(level="WARNING")
    np.set_printoptions(precision=4)

    print("\n" + "="*60)
    print("Sparse Sensitivity - Examples")
    print("="*60)

    train, dictionary, code = example_train_and_infer()
    example_spectrum(dictionary, code)
    example_sensitivity(train, dictionary)

    print("\n" + "="*60)
    print("Examples complete")
    print("="*60 + "\n")


if __name__ == "__main__":
    logging.captureWarnings(True)
    main()
