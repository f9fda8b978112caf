"""
Tests for sensitivity histograms and the representation interface.
"""

import numpy as np
import pytest

from src.analysis import SensitivityHistogram, draw_direction, sensitivity_histogram
from src.classifiers import create_random_net, init_mlp
from src.perturbations import PerturbationKind
from src.representations import (
    BaseRepresentation,
    PixelRepresentation,
    RepresentationFactory,
    RepresentationType,
)
from src.utils.errors import NonGenericInputError
from src.utils.helpers import sample_rng


def identity(x):
    return np.eye(x.shape[0])


class TestHistogram:
    def test_pixels_have_unit_derivatives(self, splits):
        histogram = sensitivity_histogram(identity, splits[0], samples=12, seed=0)

        for kind in PerturbationKind:
            assert histogram.count(kind) == 12
            np.testing.assert_allclose(histogram.values[kind], 1.0)
        assert histogram.skipped == 0

    def test_deterministic(self, splits):
        a = sensitivity_histogram(identity, splits[0], samples=8, seed=4)
        b = sensitivity_histogram(identity, splits[0], samples=8, seed=4)

        assert a.rows() == b.rows()

    def test_samples_are_independent_of_count(self, splits):
        short = sensitivity_histogram(identity, splits[0], samples=5, seed=2)
        long = sensitivity_histogram(identity, splits[0], samples=10, seed=2)

        for kind in PerturbationKind:
            assert long.image_ids[kind][:5] == short.image_ids[kind]

    def test_non_generic_samples_are_skipped(self, splits):
        def provider(x):
            if x.sum() > np.median(splits[0].pixels.sum(axis=1)):
                raise NonGenericInputError("kink")
            return identity(x)

        histogram = sensitivity_histogram(provider, splits[0], samples=20, seed=0)

        assert histogram.skipped > 0
        assert histogram.count(PerturbationKind.NOISE) == 20 - histogram.skipped
        assert histogram.summary()["skipped_non_generic"] == histogram.skipped

    def test_selected_kinds(self, splits):
        histogram = sensitivity_histogram(identity, splits[0], kinds=["noise"], samples=3, seed=0)

        assert histogram.count(PerturbationKind.NOISE) == 3
        assert histogram.count(PerturbationKind.SWAP) == 0

    def test_invalid_arguments(self, splits):
        with pytest.raises(ValueError):
            sensitivity_histogram(identity, splits[0], samples=0)
        with pytest.raises(ValueError):
            sensitivity_histogram(identity, splits[0].subset([0]), kinds=["swap"], samples=1)

    def test_bins_share_edges(self):
        histogram = SensitivityHistogram(representation="r", requested=3)
        for sample, value in enumerate([0.5, 1.0, 2.0]):
            histogram.add(PerturbationKind.NOISE, sample, 0, value)
        histogram.add(PerturbationKind.SWAP, 0, 0, 4.0)

        bins = histogram.bins(4)
        counts, edges = bins[PerturbationKind.NOISE]

        np.testing.assert_allclose(edges, [0.0, 1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(bins[PerturbationKind.SWAP][1], edges)
        assert counts.sum() == 3
        assert histogram.median(PerturbationKind.NOISE) == 1.0

    def test_rows(self):
        histogram = SensitivityHistogram(representation="sparse", requested=1)
        histogram.add(PerturbationKind.DISTORTION, 0, 17, 2.5)

        assert histogram.rows() == [
            {"representation": "sparse", "kind": "distortion", "sample": 0, "image": 17, "derivative": 2.5}
        ]


def test_swap_partner_is_another_image(splits):
    train = splits[0]
    for sample in range(20):
        rng = sample_rng(0, sample)
        direction = draw_direction(PerturbationKind.SWAP, train.pixels[0], train, 0, rng)
        assert direction.norm > 0


class TestRepresentations:
    def test_factory_builds_every_kind(self, image_dictionary):
        reps = {
            "pixels": RepresentationFactory.create("pixels", m=144),
            "sparse": RepresentationFactory.create("sparse", dictionary=image_dictionary, check_every=100),
            "mlp": RepresentationFactory.create("mlp", mlp=init_mlp(144, hidden=20, seed=0)),
            "random": RepresentationFactory.create("random", net=create_random_net(m=144, width=30, seed=0)),
        }

        assert sorted(reps) == sorted(RepresentationType.all())
        assert [reps[k].dim for k in ("pixels", "sparse", "mlp", "random")] == [144, 100, 20, 30]

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unsupported"):
            RepresentationFactory.create("wavelets")

    def test_missing_components(self):
        with pytest.raises(ValueError, match="Cannot build"):
            RepresentationFactory.create("sparse")

    def test_register_custom(self):
        class Doubled(PixelRepresentation):
            name = "doubled"

            def encode(self, pixels):
                return 2 * np.asarray(pixels)

        RepresentationFactory.register("doubled", Doubled)
        rep = RepresentationFactory.create("doubled", m=4)

        np.testing.assert_array_equal(rep.encode(np.ones((1, 4))), 2 * np.ones((1, 4)))
        assert "doubled" in RepresentationFactory.supported()

    def test_register_rejects_other_classes(self):
        with pytest.raises(ValueError):
            RepresentationFactory.register("bad", dict)

    def test_sparse_encode_and_jacobian(self, image_dictionary, splits):
        rep = RepresentationFactory.create("sparse", dictionary=image_dictionary, check_every=100)
        codes = rep.encode(splits[0].pixels[:3])

        assert codes.shape == (3, 100)
        J = rep(splits[0].pixels[0])
        assert J.m == 144
        assert J.k == np.count_nonzero(codes[0])

    def test_sparse_codes_are_more_sensitive_to_noise_than_pixels(self, image_dictionary, splits):
        rep = RepresentationFactory.create("sparse", dictionary=image_dictionary, check_every=100)
        histogram = sensitivity_histogram(rep.jacobian, splits[0], kinds=["noise"], samples=5, seed=0)

        assert histogram.count(PerturbationKind.NOISE) + histogram.skipped == 5
        assert isinstance(rep, BaseRepresentation)
        assert all(v >= 0 for v in histogram.values.get(PerturbationKind.NOISE, []))
