import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projconst.errors import DuplicateNodes, Singular, ZeroFunctional
from projconst.numerics import (
    LogScalar,
    PrecisionLossWarning,
    exact_inf_norm_inverse,
    format_fraction,
    kernel_basis,
    log10_ratio,
    null_space_basis,
    power_norm_rows,
    stable_power_sum,
    to_fraction,
    vandermonde_inverse_norm_bound,
    vandermonde_matrix,
)
from projconst.numerics import rational


def fraction_inverse_row_norm(M):
    """Oracle: max row sum of |M^-1| computed in exact rationals."""
    inv = rational.inverse([[Fraction(float(x)) for x in row] for row in M])
    return max(sum(abs(x) for x in row) for row in inv)


class TestStablePowerSum:
    def test_zero(self):
        assert stable_power_sum([0, 0, 0], 6) == 0.0

    def test_euclidean_pair(self):
        assert stable_power_sum([1, 1], 2) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_huge_values_do_not_overflow(self):
        assert stable_power_sum([1e200, 1e200], 6) == pytest.approx(2 ** (1 / 6) * 1e200, rel=1e-14)

    @pytest.mark.parametrize("c", [1e-100, 1.0, 1e100])
    def test_homogeneous(self, c):
        v = np.random.default_rng(1).standard_normal(7)
        assert stable_power_sum(c * v, 8) == pytest.approx(c * stable_power_sum(v, 8), rel=1e-12)

    def test_odd_exponent_rejected(self):
        with pytest.raises(ValueError):
            stable_power_sum([1.0], 3)

    def test_rows_match_scalar(self):
        X = np.random.default_rng(2).standard_normal((20, 5))
        rows = power_norm_rows(X, 6)
        assert np.allclose(rows, [stable_power_sum(x, 6) for x in X], rtol=1e-15)

    def test_matches_mpmath(self):
        # [DERIVED] 100-digit evaluation of the same sum
        v = np.random.default_rng(3).standard_normal(9) * 1e5
        mpmath.mp.dps = 100
        ref = mpmath.fsum(mpmath.mpf(float(x)) ** 10 for x in v) ** (mpmath.mpf(1) / 10)
        assert stable_power_sum(v, 10) == pytest.approx(float(ref), rel=1e-14)


class TestNullSpace:
    def test_coordinate_kernel(self):
        B = null_space_basis([1.0, 0.0, 0.0])
        assert B.shape == (3, 2)
        # columns span {e2, e3}: the first coordinate vanishes and B is orthonormal
        assert np.allclose(B[0], 0.0)
        assert np.allclose(B.T @ B, np.eye(2), atol=1e-15)

    def test_symmetric_pair(self):
        B = null_space_basis([1.0, 1.0])
        assert B.shape == (2, 1)
        assert abs(abs(B[0, 0]) - 1 / math.sqrt(2)) < 1e-15
        assert B[0, 0] == pytest.approx(-B[1, 0], abs=1e-15)

    def test_random_f(self):
        f = np.random.default_rng(4).standard_normal(5)
        B = null_space_basis(f)
        assert B.shape == (5, 4)
        assert np.max(np.abs(f @ B)) < 1e-12
        assert np.allclose(B.T @ B, np.eye(4), atol=1e-13)

    def test_zero(self):
        with pytest.raises(ZeroFunctional):
            null_space_basis([0.0, 0.0])

    def test_kernel_of_rows(self):
        C = np.random.default_rng(5).standard_normal((2, 5))
        B = kernel_basis(C)
        assert B.shape == (5, 3)
        assert np.max(np.abs(C @ B)) < 1e-12


class TestInverseNorm:
    def test_identity(self):
        assert exact_inf_norm_inverse(np.eye(4)) == pytest.approx(1.0, abs=1e-15)

    def test_upper_triangular(self):
        assert exact_inf_norm_inverse(np.array([[1.0, 1.0], [0.0, 1.0]])) == pytest.approx(2.0, abs=1e-15)

    def test_against_fraction_inverse(self):
        rng = np.random.default_rng(6)
        for size in range(1, 9):
            M = rng.standard_normal((size, size))
            assert exact_inf_norm_inverse(M) == pytest.approx(float(fraction_inverse_row_norm(M)), rel=1e-9)

    def test_singular(self):
        with pytest.raises(Singular):
            exact_inf_norm_inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))


class TestVandermonde:
    def test_single_node(self):
        assert vandermonde_inverse_norm_bound([0.3]) == 1.0

    def test_zero_one(self):
        assert vandermonde_inverse_norm_bound([0.0, 1.0]) == 2.0
        assert exact_inf_norm_inverse(vandermonde_matrix([0.0, 1.0])) == pytest.approx(2.0, abs=1e-15)

    def test_zero_one_two(self):
        V = vandermonde_matrix([0.0, 1.0, 2.0])
        assert float(fraction_inverse_row_norm(V)) <= vandermonde_inverse_norm_bound([0.0, 1.0, 2.0])

    def test_random_nodes_bounded_by_exact_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = rng.uniform(-1, 1, 5)
            exact = float(fraction_inverse_row_norm(vandermonde_matrix(x)))
            assert exact <= vandermonde_inverse_norm_bound(x) * (1 + 1e-12)

    def test_same_sign_nodes_attain_bound(self):
        # with all nodes of one sign the Lagrange coefficients alternate and the bound is exact
        x = [0.1, 0.4, 0.7, 0.95]
        exact = float(fraction_inverse_row_norm(vandermonde_matrix(x)))
        assert exact == pytest.approx(vandermonde_inverse_norm_bound(x), rel=1e-12)

    def test_duplicate(self):
        with pytest.raises(DuplicateNodes):
            vandermonde_inverse_norm_bound([0.2, 0.2, 0.5])

    def test_columns_are_powers(self):
        V = vandermonde_matrix([2.0, 3.0])
        assert np.array_equal(V, [[1.0, 1.0], [2.0, 3.0]])


class TestRational:
    @given(st.fractions().filter(lambda x: x != 0))
    def test_reciprocal_product(self, x):
        assert x * (1 / x) == 1

    def test_parse(self):
        assert to_fraction("1/3") == Fraction(1, 3)
        assert to_fraction(" 2 ") == 2
        assert to_fraction(0.5) == Fraction(1, 2)
        assert to_fraction("0.1") == Fraction(1, 10)
        with pytest.raises(TypeError):
            to_fraction(True)

    def test_format(self):
        assert format_fraction(Fraction(16)) == "16"
        assert format_fraction(Fraction(-3, 8)) == "-3/8"

    def test_rank_and_solve(self):
        rows = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
        assert rational.rank(rows) == 1
        with pytest.raises(Singular):
            rational.solve(rows, [Fraction(1), Fraction(1)])
        sol = rational.solve([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]], [Fraction(1), Fraction(2)])
        assert sol == [Fraction(1, 5), Fraction(3, 5)]


class TestLogScalar:
    def test_round_trip(self):
        for x in (3.5, -2.0, 1e-300, 7):
            assert float(LogScalar.of(x)) == pytest.approx(x, rel=1e-14)
        assert LogScalar.of(0).sign == 0

    def test_far_below_double_range(self):
        tiny = LogScalar.from_log10(-5000)
        assert tiny > 0
        assert (tiny * tiny).log10 == pytest.approx(-10000)
        assert tiny < LogScalar.from_log10(-4999)

    def test_sum_and_difference(self):
        a, b = LogScalar.of(3.0), LogScalar.of(5.0)
        assert float(a + b) == pytest.approx(8.0)
        assert float(a - b) == pytest.approx(-2.0)
        assert (a - a).sign == 0

    def test_cancellation_warns(self):
        a = LogScalar.of(1.0)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            a - LogScalar.of(1.0 - 1e-13)
        assert any(issubclass(w.category, PrecisionLossWarning) for w in caught)

    def test_log10_ratio(self):
        assert log10_ratio(LogScalar.of(100.0), LogScalar.of(1.0)) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            log10_ratio(LogScalar.of(-1.0), LogScalar.of(1.0))

    def test_comparisons_agree_with_mpmath(self):
        # [DERIVED] 1000 random products/powers, compared in 200-bit arithmetic
        mpmath.mp.prec = 200
        rng = np.random.default_rng(8)
        for _ in range(1000):
            xs = rng.uniform(1e-3, 1e3, 4)
            es = rng.integers(-300, 300, 4)
            a = LogScalar.of(xs[0]) ** int(es[0]) * LogScalar.of(xs[1]) ** int(es[1])
            b = LogScalar.of(xs[2]) ** int(es[2]) * LogScalar.of(xs[3]) ** int(es[3])
            ma = mpmath.mpf(xs[0]) ** int(es[0]) * mpmath.mpf(xs[1]) ** int(es[1])
            mb = mpmath.mpf(xs[2]) ** int(es[2]) * mpmath.mpf(xs[3]) ** int(es[3])
            if abs(mpmath.log10(ma / mb)) < 1e-9:
                continue
            assert (a < b) == (ma < mb)
            assert a.log10 == pytest.approx(float(mpmath.log10(ma)), rel=1e-12, abs=1e-9)

    @settings(max_examples=200)
    @given(st.floats(1e-200, 1e200), st.floats(1e-200, 1e200))
    def test_addition_property(self, x, y):
        assert float(LogScalar.of(x) + LogScalar.of(y)) == pytest.approx(x + y, rel=1e-12)
