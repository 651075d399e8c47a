import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from projconst import FunctionalFamily, Hyperplane, SearchConfig, compute_ledger, corollary_inputs, dual_norm
from projconst.optimize import minimize_convex_lowdim
from projconst.errors import BadWitness, TooFewFunctionals
from projconst.params import (
    AlphaMode,
    BetaMode,
    Case,
    alpha_estimate,
    alpha_tuples,
    beta_estimate,
    classify_hyperplane,
    exclusivity_check,
)
from projconst.verify import corollary_witnesses

from conftest import random_family


@pytest.fixture(scope="module")
def ledger4():
    return compute_ledger(*corollary_inputs(4))


def vertex_lp_oracle(F, target, rest):
    """[DERIVED] max f_target(x) over {|f_i(x)| <= 1, i in rest} by enumerating polytope vertices."""
    n = F.shape[1]
    best = -math.inf
    for rows in itertools.combinations(rest, n):
        A = F[list(rows)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        for signs in itertools.product((-1.0, 1.0), repeat=n):
            x = np.linalg.solve(A, signs)
            if np.all(np.abs(F[rest] @ x) <= 1 + 1e-9):
                best = max(best, F[target] @ x)
    return best


class TestAlpha:
    def test_tuples_count(self):
        assert len(list(alpha_tuples(6))) == 6 * math.comb(5, 3)

    def test_too_few(self):
        with pytest.raises(TooFewFunctionals):
            alpha_estimate(FunctionalFamily.identity(3))

    def test_degenerate(self):
        space = FunctionalFamily.from_rows([[1, 1, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], 1)
        assert alpha_estimate(space).value == pytest.approx(0.0, abs=1e-12)

    def test_span_matches_lowdim_oracle(self, cor4):
        # [DERIVED] direct minimization over the three span coefficients
        span = alpha_estimate(cor4)
        F = cor4.functionals
        sample = [span.worst_tuple, (1, (2, 3, 4)), (5, (1, 2, 6)), (3, (1, 5, 6))]
        for i, triple in sample:
            others = F[[x - 1 for x in triple]]
            res = minimize_convex_lowdim(lambda c: dual_norm(cor4, F[i - 1] - c @ others), 3, SearchConfig(tol=1e-10))
            d = span.distances[(i, triple)]
            assert d == pytest.approx(res.value, abs=1e-8)
            # the Hahn-Banach value is attained at a kernel vector, so it never exceeds the minimum
            assert d <= res.value + 1e-12

    def test_witness_certificate(self, cor4):
        # [PAPER] witness set gives alpha >= 1/(2n)
        est = alpha_estimate(cor4, corollary_witnesses(4))
        assert est.mode == AlphaMode.WITNESS
        assert est.value >= 1 / 8
        assert est.value <= alpha_estimate(cor4).value + 1e-7

    def test_clamped(self):
        space = FunctionalFamily.identity(4)
        est = alpha_estimate(space)
        assert est.raw_value == pytest.approx(1.0)
        assert est.value == 0.5

    def test_bad_witness(self, cor4):
        w = dict(corollary_witnesses(4))
        key = next(iter(w))
        w[key] = [Fraction(1)] * 4
        with pytest.raises(BadWitness):
            alpha_estimate(cor4, w)

    def test_float_witness_tolerance(self, cor4):
        w = {k: [float(x) for x in v] for k, v in corollary_witnesses(4).items()}
        exact = alpha_estimate(cor4, corollary_witnesses(4)).value
        assert alpha_estimate(cor4, w).value == pytest.approx(exact, rel=1e-12)
        key = next(iter(w))
        w[key] = [x + 1e-6 for x in w[key]]
        with pytest.raises(BadWitness):
            alpha_estimate(cor4, w)


class TestBeta:
    def test_identity_not_spanning(self):
        est = beta_estimate(FunctionalFamily.identity(3))
        assert est.value == math.inf
        assert est.cause == "NotSpanning"

    def test_corollary_certificate(self, cor4):
        est = beta_estimate(cor4, BetaMode.CERTIFICATE)
        assert est.value <= 16
        assert est.exact_value == 13
        assert est.worst_pair == (1, 5)

    def test_numeric_below_certificate(self, cor4, cor5):
        for space in (cor4, cor5):
            num = beta_estimate(space, BetaMode.NUMERIC)
            cert = beta_estimate(space, BetaMode.CERTIFICATE)
            assert num.value <= cert.value + 1e-7

    def test_numeric_matches_vertex_oracle(self):
        rng = np.random.default_rng(40)
        space = random_family(rng, 3, 7, 2)
        F = space.functionals
        est = beta_estimate(space, BetaMode.NUMERIC)
        for (j, k), value in est.per_pair.items():
            rest = [i for i in range(7) if i not in (j - 1, k - 1)]
            oracle = max(vertex_lp_oracle(F, j - 1, rest), vertex_lp_oracle(F, k - 1, rest))
            assert value == pytest.approx(oracle, rel=1e-8)
        cert = beta_estimate(space, BetaMode.CERTIFICATE)
        assert est.value <= cert.value + 1e-7

    def test_defining_inequality_on_samples(self, cor4):
        # beta bounds max(|f_j|, |f_k|) by beta * max over the rest
        beta = beta_estimate(cor4, BetaMode.NUMERIC).value
        X = np.random.default_rng(41).standard_normal((2000, 4))
        V = np.abs(X @ cor4.functionals.T)
        for j, k in itertools.combinations(range(6), 2):
            rest = [i for i in range(6) if i not in (j, k)]
            assert np.all(np.maximum(V[:, j], V[:, k]) <= beta * V[:, rest].max(axis=1) * (1 + 1e-9))


class TestClassify:
    def test_near_single(self, cor4, ledger4):
        label = classify_hyperplane(cor4, Hyperplane.normalized(cor4, cor4.functionals[5]), ledger4)
        assert label.tag == Case.NEAR_SINGLE
        assert label.k == 6
        assert label.achieved_distance <= 1e-12

    def test_near_pair(self, cor4, ledger4):
        label = classify_hyperplane(cor4, Hyperplane.normalized(cor4, cor4.functionals[4] + cor4.functionals[5]), ledger4)
        assert label.tag == Case.NEAR_PAIR
        assert {label.k, label.l} == {5, 6}
        assert label.achieved_distance <= float(ledger4.L)
        # no single functional is K-close
        assert min(d for d, _ in label.single_distances.values()) > float(ledger4.K)

    def test_generic(self, cor4, ledger4):
        f = np.random.default_rng(42).standard_normal(4)
        label = classify_hyperplane(cor4, Hyperplane.normalized(cor4, f), ledger4)
        assert label.tag == Case.GENERIC
        assert label.achieved_distance > float(ledger4.L)

    def test_scale_invariant(self, cor4, ledger4):
        rng = np.random.default_rng(43)
        for f in [cor4.functionals[5], cor4.functionals[4] + cor4.functionals[5], rng.standard_normal(4)]:
            tags = {classify_hyperplane(cor4, Hyperplane.normalized(cor4, c * f), ledger4).tag for c in (1.0, -3.0, 1e-5)}
            assert len(tags) == 1


class TestExclusivity:
    def test_near_pair_functional(self, cor4, ledger4):
        f = cor4.functionals[5] + 0.7 * cor4.functionals[4]
        rep = exclusivity_check(cor4, Hyperplane.normalized(cor4, f), 1 / 8, ledger4.K, ledger4.L)
        assert rep.precondition_holds
        assert rep.witness is not None
        assert rep.near_pair_checks or rep.alpha_half_checks
        assert rep.violations == []

    def test_alpha_range(self, cor4, ledger4):
        with pytest.raises(ValueError):
            exclusivity_check(cor4, Hyperplane.normalized(cor4, cor4.functionals[0]), 0.0, ledger4.K, ledger4.L)
