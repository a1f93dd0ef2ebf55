import numpy as np
import pytest

from core.errors import ParameterError, ShapeError
from core.rng import RngState, rng_bernoulli, rng_normal, rng_uniform, seeded_rng
from core.tensor import add, as_tensor, matmul, mul, patch_extract, patch_scatter, reshape, scale, transpose


class TestSeededRng:
    def test_same_seed_same_stream(self):
        a, b = seeded_rng(7), seeded_rng(7)
        np.testing.assert_array_equal([rng_uniform(a) for _ in range(100)], [rng_uniform(b) for _ in range(100)])

    def test_different_seeds_differ_early(self):
        a, b = seeded_rng(7), seeded_rng(8)
        assert [rng_uniform(a) for _ in range(10)] != [rng_uniform(b) for _ in range(10)]

    def test_seed_zero_is_not_degenerate(self):
        draws = seeded_rng(0).uniform(1000)
        assert draws.var() > 0
        assert np.count_nonzero(draws) > 0

    def test_substreams_are_independent_of_parent_draws(self):
        parent = RngState(5)
        before = parent.substream(1, 2).uniform(5)
        parent.uniform(50)
        np.testing.assert_array_equal(before, parent.substream(1, 2).uniform(5))
        assert not np.array_equal(before, parent.substream(2, 1).uniform(5))

    def test_seed_out_of_range(self):
        with pytest.raises(ParameterError):
            RngState(-1)
        with pytest.raises(ParameterError):
            RngState(2**64)


class TestDistributions:
    def test_bernoulli_edges(self, rng):
        assert all(rng_bernoulli(rng, 0.0) == 0 for _ in range(200))
        assert all(rng_bernoulli(rng, 1.0) == 1 for _ in range(200))

    def test_bernoulli_rejects_bad_probability(self, rng):
        with pytest.raises(ParameterError):
            rng_bernoulli(rng, 1.5)
        with pytest.raises(ParameterError):
            rng.bernoulli(-0.1, 4)

    def test_uniform_mean(self):
        draws = RngState(11).uniform(10**6)
        assert abs(draws.mean() - 0.5) < 0.003
        assert draws.min() >= 0.0 and draws.max() < 1.0

    def test_normal_moments(self, rng):
        draws = np.array([rng_normal(rng, 2.0, 0.5) for _ in range(20000)])
        assert abs(draws.mean() - 2.0) < 0.02
        assert abs(draws.std() - 0.5) < 0.02


class TestTensorOps:
    def test_identity_matmul(self, np_rng):
        a = np_rng.normal(size=(3, 4))
        np.testing.assert_array_equal(matmul(np.eye(3), a), a)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            add(np.ones(3), np.ones(4))
        with pytest.raises(ShapeError):
            mul(np.ones((2, 2)), np.ones((2, 3)))
        with pytest.raises(ShapeError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))
        with pytest.raises(ShapeError):
            reshape(np.ones(6), (4, 2))
        with pytest.raises(ShapeError):
            as_tensor(np.ones((1, 1, 1, 1, 1)))

    def test_elementwise(self):
        np.testing.assert_array_equal(add([1, 2], [3, 4]), [4, 6])
        np.testing.assert_array_equal(mul([1, 2], [3, 4]), [3, 8])
        np.testing.assert_array_equal(scale([1, 2], 0.5), [0.5, 1.0])

    def test_reshape_round_trip(self, np_rng):
        a = np_rng.normal(size=(2, 3, 4))
        np.testing.assert_array_equal(reshape(reshape(a, (4, 6)), a.shape), a)
        np.testing.assert_array_equal(transpose(transpose(a[0])), a[0])


class TestPatchExtract:
    def test_whole_image_is_one_patch(self):
        np.testing.assert_array_equal(patch_extract(np.array([[1, 2], [3, 4]]), 2, 2, 1), [[1, 2, 3, 4]])

    def test_manual_windows(self):
        image = np.arange(9).reshape(3, 3)
        expected = [[0, 1, 3, 4], [1, 2, 4, 5], [3, 4, 6, 7], [4, 5, 7, 8]]
        np.testing.assert_array_equal(patch_extract(image, 2, 2, 1), expected)

    def test_channel_major_layout(self):
        image = np.stack([np.arange(4).reshape(2, 2), 10 + np.arange(4).reshape(2, 2)])
        np.testing.assert_array_equal(patch_extract(image, 2, 2), [[0, 1, 2, 3, 10, 11, 12, 13]])

    @pytest.mark.parametrize("h,w,kh,kw,stride", [(5, 7, 2, 3, 1), (8, 8, 3, 3, 2), (6, 9, 4, 2, 3)])
    def test_row_and_column_counts(self, np_rng, h, w, kh, kw, stride):
        patches = patch_extract(np_rng.normal(size=(2, h, w)), kh, kw, stride)
        assert patches.shape == (((h - kh) // stride + 1) * ((w - kw) // stride + 1), kh * kw * 2)

    def test_scatter_is_adjoint(self, np_rng):
        x = np_rng.normal(size=(2, 3, 6, 5))
        padding = (0, 1, 2, 0)
        patches = patch_extract(x, 3, 2, 2, padding)
        upstream = np_rng.normal(size=patches.shape)
        lhs = np.sum(patches * upstream)
        rhs = np.sum(x * patch_scatter(upstream, x.shape, 3, 2, 2, padding))
        assert lhs == pytest.approx(rhs, rel=1e-12)
