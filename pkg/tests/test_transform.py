import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from dte_recon.transform import (BitMatrix, DteConfig, EmpiricalCdf,
                                 GaussianCdf, binary_expand, dte, dte_sequence,
                                 normal_cdf, normal_quantile)

STD_NORMAL = GaussianCdf(0.0, 1.0)

# Worked five-sample example: x drawn from N(0,1), y = x + z with z from
# N(0, 0.5), so y has marginal N(0, 1.5).
EXAMPLE_X = np.array([0.491, 0.327, -0.652, -1.096, -0.023])
EXAMPLE_Z = np.array([-0.722, 0.942, 0.191, 0.198, -0.370])
EXAMPLE_X_MATRIX = [[1, 1, 0, 0, 0], [0, 0, 1, 0, 1], [1, 1, 0, 1, 1]]
EXAMPLE_Y_MATRIX = [[0, 1, 0, 0, 0], [1, 1, 1, 0, 1], [1, 0, 0, 1, 0]]


class TestNormalCdf:
    def test_symmetry_point(self):
        assert normal_cdf(0.0, STD_NORMAL) == pytest.approx(0.5, abs=1e-15)

    def test_example_values(self):
        # high-precision references computed with 30-digit arithmetic
        assert normal_cdf(0.491, STD_NORMAL) == pytest.approx(
            0.688286776224286066, abs=1e-12)
        assert normal_cdf(-1.096, STD_NORMAL) == pytest.approx(
            0.136539387237078972, abs=1e-12)
        # three-decimal forms used in the worked example
        assert normal_cdf(0.491, STD_NORMAL) == pytest.approx(0.688, abs=1e-3)
        assert normal_cdf(-1.096, STD_NORMAL) == pytest.approx(0.136, abs=1e-3)

    def test_nonstandard_params(self):
        d = GaussianCdf(2.0, 3.0)
        assert d.cdf(2.0) == pytest.approx(0.5, abs=1e-15)
        assert d.cdf(5.0) == pytest.approx(normal_cdf(1.0, STD_NORMAL), abs=1e-14)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            normal_cdf(float("nan"), STD_NORMAL)
        with pytest.raises(ValueError):
            normal_cdf(float("inf"), STD_NORMAL)

    def test_rejects_bad_std(self):
        with pytest.raises(ValueError):
            GaussianCdf(0.0, 0.0)
        with pytest.raises(ValueError):
            GaussianCdf(0.0, -1.0)


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5, STD_NORMAL) == pytest.approx(0.0, abs=1e-15)

    def test_example_inverse(self):
        # the unrounded forward value inverts back to the example input;
        # the 3-d.p. 0.688 lands at 0.49019 (frozen via 30-digit bisection)
        assert normal_quantile(0.688286776224286066, STD_NORMAL) == pytest.approx(
            0.491, abs=1e-9)
        assert normal_quantile(0.688, STD_NORMAL) == pytest.approx(
            0.490189231715209375, abs=1e-9)

    def test_097five(self):
        # frozen via bisection on the cdf to 1e-10
        assert normal_quantile(0.975, STD_NORMAL) == pytest.approx(
            1.9599639845400545, abs=1e-9)

    def test_domain_errors(self):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ValueError):
                normal_quantile(bad, STD_NORMAL)

    def test_round_trip_grid(self):
        u = np.linspace(0.001, 0.999, 1000)
        back = STD_NORMAL.cdf(STD_NORMAL.quantile(u))
        assert np.max(np.abs(back - u)) <= 1e-10


class TestBinaryExpand:
    def test_example_values(self):
        assert binary_expand(0.688, 3).tolist() == [1, 0, 1]
        assert binary_expand(0.0, 3).tolist() == [0, 0, 0]
        assert binary_expand(0.136, 3).tolist() == [0, 0, 1]

    def test_endpoint_one_is_all_ones(self):
        assert binary_expand(1.0, 4).tolist() == [1, 1, 1, 1]

    def test_half_tie_goes_up(self):
        assert binary_expand(0.5, 2).tolist() == [1, 0]

    def test_domain_error(self):
        with pytest.raises(ValueError):
            binary_expand(-0.1, 3)
        with pytest.raises(ValueError):
            binary_expand(1.1, 3)

    def test_depth_bounds(self):
        with pytest.raises(ValueError):
            binary_expand(0.5, 0)
        with pytest.raises(ValueError):
            binary_expand(0.5, 33)

    @given(st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
           st.integers(min_value=1, max_value=32))
    @settings(max_examples=300, deadline=None)
    def test_reconstruction_bracket(self, d, depth):
        bits = binary_expand(d, depth)
        d_hat = sum(int(b) * 2.0 ** -(i + 1) for i, b in enumerate(bits))
        assert 0.0 <= d - d_hat < 2.0 ** -depth


class TestDte:
    def test_example_column(self):
        assert dte(0.491, STD_NORMAL, DteConfig(3)).tolist() == [1, 0, 1]
        assert dte(-0.652, STD_NORMAL, DteConfig(3)).tolist() == [0, 1, 0]

    def test_mean_maps_to_upper_half(self):
        assert dte(3.5, GaussianCdf(3.5, 2.0), DteConfig(1)).tolist() == [1]

    def test_matches_composition(self):
        cfg = DteConfig(5)
        for x in (-2.3, -0.4, 0.0, 0.9, 3.1):
            assert dte(x, STD_NORMAL, cfg).tolist() == \
                binary_expand(STD_NORMAL.cdf(x), 5).tolist()


class TestDteSequence:
    def test_worked_example_x(self):
        m = dte_sequence(EXAMPLE_X, STD_NORMAL, DteConfig(3))
        assert m.bits.tolist() == EXAMPLE_X_MATRIX

    def test_worked_example_y(self):
        y_dist = GaussianCdf(0.0, np.sqrt(1.5))
        m = dte_sequence(EXAMPLE_X + EXAMPLE_Z, y_dist, DteConfig(3))
        assert m.bits.tolist() == EXAMPLE_Y_MATRIX

    def test_constant_zeros(self):
        m = dte_sequence(np.zeros(5), STD_NORMAL, DteConfig(2))
        assert m.bits.tolist() == [[1] * 5, [0] * 5]

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            dte_sequence(np.array([]), STD_NORMAL, DteConfig(2))

    def test_columns_match_scalar_path(self):
        rng = np.random.default_rng(11)
        xs = rng.standard_normal(40)
        m = dte_sequence(xs, STD_NORMAL, DteConfig(6))
        for j in (0, 7, 39):
            assert m.bits[:, j].tolist() == dte(xs[j], STD_NORMAL, DteConfig(6)).tolist()


class TestStatisticalProperties:
    def test_transform_uniformity_ks(self):
        rng = np.random.default_rng(20240801)
        u = STD_NORMAL.cdf(rng.standard_normal(10_000))
        assert stats.kstest(u, "uniform").pvalue >= 0.01

    def test_plane_balance(self):
        rng = np.random.default_rng(42)
        n = 10_000
        bits = dte_sequence(rng.standard_normal(n), STD_NORMAL, DteConfig(4)).bits
        tol = 4.0 * np.sqrt(0.25 / n)
        for row in bits:
            assert abs(row.mean() - 0.5) <= tol

    def test_plane_independence(self):
        rng = np.random.default_rng(43)
        n = 10_000
        bits = dte_sequence(rng.standard_normal(n), STD_NORMAL, DteConfig(4)).bits
        tol = 4.0 / np.sqrt(n)
        for i in range(4):
            for j in range(i + 1, 4):
                corr = np.corrcoef(bits[i], bits[j])[0, 1]
                assert abs(corr) <= tol


class TestBitMatrix:
    def test_text_round_trip(self):
        m = dte_sequence(EXAMPLE_X, STD_NORMAL, DteConfig(3))
        assert BitMatrix.from_text(m.to_text()) == m

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            BitMatrix(np.array([[0, 2]], dtype=np.uint8))

    def test_rows_are_levels(self):
        m = dte_sequence(EXAMPLE_X, STD_NORMAL, DteConfig(3))
        assert m.row(1).tolist() == EXAMPLE_X_MATRIX[0]
        with pytest.raises(ValueError):
            m.row(4)

    def test_frozen(self):
        m = dte_sequence(EXAMPLE_X, STD_NORMAL, DteConfig(3))
        with pytest.raises(ValueError):
            m.bits[0, 0] = 1


class TestEmpiricalCdf:
    def test_ranks_are_nearly_uniform(self):
        rng = np.random.default_rng(5)
        samples = rng.standard_normal(5000)
        e = EmpiricalCdf(samples)
        u = e.cdf(samples)
        assert stats.kstest(u, "uniform").pvalue >= 0.01

    def test_tracks_gaussian_quantiles(self):
        rng = np.random.default_rng(6)
        e = EmpiricalCdf(rng.standard_normal(20_000))
        for u in (0.1, 0.35, 0.5, 0.9):
            assert e.quantile(u) == pytest.approx(STD_NORMAL.quantile(u), abs=0.05)

    def test_usable_in_dte(self):
        rng = np.random.default_rng(7)
        samples = rng.standard_normal(2000)
        m = dte_sequence(samples, EmpiricalCdf(samples), DteConfig(2))
        assert abs(m.bits[0].mean() - 0.5) <= 0.05
