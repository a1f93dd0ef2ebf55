import math

import numpy as np
import pytest

from analysis.pca import pc_count_for_threshold, pca_explained_variance
from analysis.rdm import Rdm, average_rdms, compute_rdm, count_modes, distance_distribution, rdm_compare
from analysis.representations import (
    block_activations,
    cross_layer_rdm_correlation,
    order_rdms,
    seed_averaged_rdms,
)
from analysis.tied_weights import tied_weight_activations, tied_weight_experiment
from core.errors import ParameterError, ShapeError
from core.rng import RngState
from network.builders import build_model
from textures.datasets import composite_image, stimulus_set


class TestPca:
    def test_rank_one(self):
        fractions = pca_explained_variance(np.outer(np.arange(6.0), [1.0, 2.0, 3.0])).fractions
        np.testing.assert_allclose(fractions, [1.0, 0.0, 0.0], atol=1e-12)

    def test_isotropic_gaussian(self):
        explained = pca_explained_variance(RngState(8).normal(size=(10**4, 2)))
        np.testing.assert_allclose(explained.fractions, [0.5, 0.5], atol=0.02)
        assert not explained.degenerate

    def test_fractions_sum_to_one_and_descend(self, np_rng):
        explained = pca_explained_variance(np_rng.normal(size=(30, 12)) * np.arange(1, 13))
        assert explained.fractions.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(np.diff(explained.fractions) <= 1e-15)
        assert explained.cumulative[-1] == pytest.approx(1.0, abs=1e-9)

    def test_zero_variance(self):
        explained = pca_explained_variance(np.ones((5, 3)))
        assert explained.degenerate
        np.testing.assert_array_equal(explained.fractions, 0.0)
        assert pc_count_for_threshold(explained.fractions) == 1

    def test_validation(self):
        with pytest.raises(ParameterError):
            pca_explained_variance(np.ones((1, 3)))
        with pytest.raises(ParameterError):
            pca_explained_variance(np.array([[1.0, np.nan], [0.0, 1.0]]))
        with pytest.raises(ShapeError):
            pca_explained_variance(np.ones(4))

    @pytest.mark.parametrize("fractions,threshold,expected", [
        ([1.0], 0.95, 1),
        ([0.5, 0.3, 0.2], 0.95, 3),
        ([0.96, 0.04], 0.95, 1),
        ([0.5, 0.3, 0.2], 0.8, 2),
    ])
    def test_pc_count(self, fractions, threshold, expected):
        assert pc_count_for_threshold(fractions, threshold) == expected


class TestTiedWeights:
    def test_same_init_is_rank_one(self):
        result = tied_weight_experiment("hocnn2", 6, composite_image(), seed=3, same_init=True)
        assert result.pc_count == 1
        assert result.degenerate

    def test_activation_matrix(self):
        image = composite_image()
        acts = tied_weight_activations("hocnn3", 4, image, seed=1)
        assert acts.shape == (4, 1922)
        np.testing.assert_array_equal(acts, tied_weight_activations("hocnn3", 4, image, seed=1))
        assert not np.allclose(acts[0], acts[1])

    def test_result_fields(self):
        result = tied_weight_experiment("cnn", 12, composite_image(), seed=0, activation="gelu")
        assert result.dim == 9610
        assert result.underdetermined
        assert 1 <= result.pc_count <= 11
        assert result.pc_fraction == result.pc_count / 9610
        assert result.cumulative[-1] == pytest.approx(1.0)

    def test_single_image_only(self):
        with pytest.raises(ShapeError):
            tied_weight_activations("cnn", 2, np.zeros((2, 32, 32)), seed=0)

    @pytest.mark.slow
    def test_independent_orders_need_more_components(self):
        image = composite_image()
        fractions = [tied_weight_experiment(kind, 500, image, seed=0).pc_fraction for kind in ("cnn", "hocnn2", "hocnn3")]
        assert fractions[0] < fractions[1] < fractions[2]


class TestRdm:
    def test_identical_rows(self):
        rdm = compute_rdm(np.tile([1.0, 3.0, 2.0, 5.0], (4, 1)))
        np.testing.assert_allclose(rdm.matrix, 0.0, atol=1e-12)

    def test_anticorrelated_pair(self, np_rng):
        a = np_rng.normal(size=20)
        a -= a.mean()
        pair = np.stack([a, -a])
        assert compute_rdm(pair, "corr").matrix[0, 1] == pytest.approx(2.0)
        assert compute_rdm(pair, "corr01").matrix[0, 1] == pytest.approx(1.0)

    def test_matches_pearson(self, np_rng):
        acts = np_rng.normal(size=(3, 40))
        expected = 1.0 - np.corrcoef(acts)
        np.fill_diagonal(expected, 0.0)
        np.testing.assert_allclose(compute_rdm(acts).matrix, expected, atol=1e-10)

    def test_symmetric_with_zero_diagonal(self, np_rng):
        matrix = compute_rdm(np_rng.normal(size=(9, 5)), "corr01").matrix
        np.testing.assert_array_equal(matrix, matrix.T)
        np.testing.assert_array_equal(np.diag(matrix), 0.0)
        assert matrix.min() >= 0.0 and matrix.max() <= 1.0

    def test_constant_rows(self, np_rng):
        acts = np.vstack([np.full(6, 2.0), np_rng.normal(size=(2, 6))])
        assert compute_rdm(acts, "corr").matrix[0, 1] == 1.0
        assert compute_rdm(acts, "corr01").matrix[0, 2] == 0.5

    def test_validation(self):
        with pytest.raises(ParameterError):
            compute_rdm(np.ones((1, 4)))
        with pytest.raises(ParameterError):
            compute_rdm(np.ones((3, 4)), "euclidean")


class TestRdmCompare:
    def test_self_comparison(self, np_rng):
        rdm = compute_rdm(np_rng.normal(size=(6, 10)), "corr01")
        np.testing.assert_array_equal(rdm_compare(rdm, rdm, "log_ratio"), 0.0)
        np.testing.assert_array_equal(rdm_compare(rdm, rdm, "hellinger"), 0.0)
        assert rdm_compare(rdm, rdm, "spearman") == 1.0

    def test_scaled_log_ratio(self, np_rng):
        b = compute_rdm(np_rng.normal(size=(5, 8))).matrix
        ratio = rdm_compare(4 * b, b, "log_ratio")
        off_diagonal = ~np.eye(5, dtype=bool)
        np.testing.assert_allclose(ratio[off_diagonal], math.log(4), atol=1e-6)

    def test_hellinger_extremes(self):
        ones = Rdm(np.array([[0.0, 1.0], [1.0, 0.0]]), "corr01")
        zeros = Rdm(np.zeros((2, 2)), "corr01")
        assert rdm_compare(ones, zeros, "hellinger")[0, 1] == pytest.approx(1 / math.sqrt(2))

    def test_hellinger_needs_corr01(self, np_rng):
        rdm = compute_rdm(np_rng.normal(size=(4, 6)), "corr")
        with pytest.raises(ParameterError):
            rdm_compare(rdm, rdm, "hellinger")

    def test_abs_diff_and_shapes(self):
        np.testing.assert_array_equal(rdm_compare(np.eye(2), np.zeros((2, 2)), "abs_diff"), np.eye(2))
        with pytest.raises(ShapeError):
            rdm_compare(np.zeros((2, 2)), np.zeros((3, 3)), "abs_diff")
        with pytest.raises(ParameterError):
            rdm_compare(np.zeros((2, 2)), np.zeros((2, 2)), "cosine")

    def test_independent_activations_are_uncorrelated(self):
        rng = RngState(12)
        a = compute_rdm(rng.normal(size=(100, 50)))
        b = compute_rdm(rng.normal(size=(100, 50)))
        assert abs(rdm_compare(a, b, "spearman")) < 0.15

    def test_average(self):
        a, b = Rdm(np.array([[0.0, 1.0], [1.0, 0.0]])), Rdm(np.array([[0.0, 0.5], [0.5, 0.0]]))
        np.testing.assert_allclose(average_rdms([a, b]).matrix, [[0.0, 0.75], [0.75, 0.0]])
        with pytest.raises(ParameterError):
            average_rdms([a, Rdm(b.matrix, "corr01")])
        with pytest.raises(ParameterError):
            average_rdms([])


class TestDistanceDistribution:
    def test_all_equal_entries(self):
        matrix = np.full((5, 5), 0.3)
        np.fill_diagonal(matrix, 0.0)
        dist = distance_distribution(matrix)
        assert np.count_nonzero(dist.counts) == 1
        assert dist.mean == pytest.approx(0.3)
        assert dist.variance == pytest.approx(0.0)

    def test_counts_cover_upper_triangle(self, np_rng):
        rdm = compute_rdm(np_rng.normal(size=(12, 7)))
        dist = distance_distribution(rdm, n_bins=20)
        assert dist.counts.sum() == 12 * 11 // 2
        assert len(dist.edges) == 21
        assert dist.mean == pytest.approx(rdm.upper().mean())

    def test_two_clusters_are_bimodal(self):
        blocks = np.repeat(np.arange(2), 10)
        matrix = np.where(blocks[:, None] == blocks[None, :], 0.2, 0.8)
        np.fill_diagonal(matrix, 0.0)
        assert distance_distribution(matrix).modes == 2

    @pytest.mark.parametrize("counts,expected", [
        ([0, 3, 3, 0], 1),
        ([1, 0, 1], 2),
        ([0, 0, 0], 0),
        ([5, 4, 3, 6, 1], 2),
    ])
    def test_count_modes(self, counts, expected):
        assert count_modes(counts) == expected


class TestRepresentations:
    @pytest.fixture(scope="class")
    def stimuli(self, small_splits):
        return stimulus_set(small_splits[0], per_class=2).images

    def test_block_activations(self, stimuli):
        acts = block_activations(build_model("hocnn2", RngState(0)), stimuli, ["block1", "block2"])
        assert acts["block1"].shape == (20, 1922)
        assert acts["block2"].shape == (20, 18)

    def test_model_against_itself(self, stimuli):
        model = build_model("hocnn3", RngState(4))
        pairs = [("block2", "block2"), ("block1", "block1"), ("logits", "logits")]
        result = cross_layer_rdm_correlation(model, model, stimuli, pairs)
        assert [(a, b) for a, b, _ in result] == pairs
        assert all(rho == 1.0 for _, _, rho in result)

    def test_seed_average(self, stimuli):
        models = [build_model("cnn", RngState(seed)) for seed in (1, 2)]
        averaged = seed_averaged_rdms(models, stimuli, ["block2"])["block2"]
        singles = [seed_averaged_rdms(model, stimuli, ["block2"])["block2"] for model in models]
        np.testing.assert_allclose(averaged.matrix, (singles[0].matrix + singles[1].matrix) / 2, atol=1e-12)

    def test_order_rdms(self, stimuli):
        rdms = order_rdms(build_model("hocnn3", RngState(0)), stimuli)
        assert sorted(rdms) == [1, 2, 3]
        assert all(rdm.size == 20 for rdm in rdms.values())
        with pytest.raises(ParameterError):
            order_rdms(build_model("cnn"), stimuli)
