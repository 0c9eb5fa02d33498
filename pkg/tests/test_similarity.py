import numpy as np
import pytest

from camlab.metrics import spearman_correlation, ssim


class TestSpearman:

    def test_self_correlation(self, grid):
        a = grid((8, 8), 1)
        assert spearman_correlation(a, a) == 1.0

    def test_reversed_ranks(self):
        a = np.arange(16, dtype=float)
        assert spearman_correlation(a, a[::-1]) == pytest.approx(-1.0, abs=1e-12)

    def test_constant_map_is_zero(self, grid):
        assert spearman_correlation(grid((4, 4), 2), np.full((4, 4), 0.3)) == 0.0

    def test_identical_constant_maps(self):
        zeros = np.zeros((4, 4))
        assert spearman_correlation(zeros, zeros) == 1.0
        assert spearman_correlation(zeros, zeros, absolute=True) == 1.0
        assert spearman_correlation(zeros, np.full((4, 4), 0.5)) == 0.0

    def test_absolute_variant_ignores_sign(self):
        a = np.array([-3.0, 1.0, 2.0, -4.0])
        assert spearman_correlation(a, np.abs(a), absolute=True) == pytest.approx(1.0)
        assert spearman_correlation(a, np.abs(a)) < 1.0

    def test_ties_use_average_ranks(self):
        a = np.array([1.0, 1.0, 2.0, 3.0])
        b = np.array([0.0, 0.0, 5.0, 9.0])
        assert spearman_correlation(a, b) == pytest.approx(1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            spearman_correlation(np.zeros(4), np.zeros(5))


class TestSsim:

    def test_identical_maps(self, grid):
        a = np.abs(grid((8, 8), 3))
        assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_constant_maps(self):
        c1 = 0.01 ** 2
        assert ssim(np.zeros((4, 4)), np.ones((4, 4))) == pytest.approx(c1 / (1 + c1), rel=1e-12)

    def test_symmetric(self, grid):
        a, b = np.abs(grid((8, 8), 4)), np.abs(grid((8, 8), 5))
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-15)
