import numpy as np
import pytest
from scipy.optimize import minimize, minimize_scalar

from projconst import FunctionalFamily, Hyperplane, SearchConfig
from projconst.errors import DegenerateY
from projconst.minproj import (
    Projection,
    gap_threshold,
    minimal_projection_search,
    projection_norm_estimate,
    proof_chain_replay,
    smoothness_gap_check,
)
from projconst.numerics import null_space_basis
from projconst.space import norm_eval, supporting_functional

from conftest import random_family


def projection_for(space, f, c):
    h = Hyperplane.normalized(space, f)
    B = null_space_basis(h.f)
    w = h.f / (h.f @ h.f) + B @ np.atleast_1d(c)
    return Projection(h, w)


def grid_operator_norm(space, proj, points=100_000, seed=0):
    """[DERIVED] max ||Px|| / ||x|| over random sphere points, polished by Nelder-Mead."""
    X = np.random.default_rng(seed).standard_normal((points, space.n))
    ratio = lambda Z: norm_eval(space, proj(Z)) / norm_eval(space, Z)  # noqa: E731
    vals = ratio(X)
    best = -np.inf
    for x0 in X[np.argsort(vals)[-5:]]:
        res = minimize(lambda z: -ratio(z[None, :])[0], x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000})
        best = max(best, -res.fun)
    return best


class TestProjection:
    def test_requires_f_w_one(self, cor4):
        h = Hyperplane.normalized(cor4, [1, 0, 0, 0])
        with pytest.raises(ValueError):
            Projection(h, np.zeros(4))

    def test_identity_on_kernel(self, cor4):
        proj = projection_for(cor4, [1, 2, -1, 0.5], [0.1, -0.2, 0.3])
        B = null_space_basis(proj.f.f)
        Y = (B @ np.random.default_rng(50).standard_normal((3, 5))).T
        assert np.allclose(proj(Y), Y, atol=1e-14)
        assert np.allclose(proj.f(proj(np.random.default_rng(51).standard_normal((5, 4)))), 0.0, atol=1e-14)


class TestNormEstimate:
    def test_orthogonal_projection(self):
        space = FunctionalFamily.identity(3)
        est = projection_norm_estimate(space, Projection(Hyperplane.normalized(space, [1, 0, 0]), [1, 0, 0]))
        assert est.value == pytest.approx(1.0, abs=1e-12)

    def test_bounds(self, cor4):
        rng = np.random.default_rng(52)
        for _ in range(5):
            proj = projection_for(cor4, rng.standard_normal(4), rng.standard_normal(3))
            est = projection_norm_estimate(cor4, proj)
            assert est.value >= 1 - 1e-10
            assert est.value <= est.crude_upper + 1e-9
            assert float(est) == est.value

    def test_matches_grid_oracle(self, cor4):
        rng = np.random.default_rng(53)
        proj = projection_for(cor4, rng.standard_normal(4), rng.standard_normal(3) * 0.5)
        assert projection_norm_estimate(cor4, proj).value == pytest.approx(grid_operator_norm(cor4, proj), abs=1e-5)

    def test_convexity_in_w(self, cor4):
        rng = np.random.default_rng(54)
        f = rng.standard_normal(4)
        for _ in range(3):
            c1, c2 = rng.standard_normal((2, 3))
            th = rng.uniform()
            est = lambda c: projection_norm_estimate(cor4, projection_for(cor4, f, c)).value  # noqa: E731
            assert est(th * c1 + (1 - th) * c2) <= th * est(c1) + (1 - th) * est(c2) + 1e-6


class TestSearch:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_euclidean(self, n):
        space = FunctionalFamily.identity(n)
        f = np.random.default_rng(n).standard_normal(n)
        res = minimal_projection_search(space, Hyperplane.normalized(space, f))
        assert res.norm_estimate == pytest.approx(1.0, abs=1e-6)
        # the minimal projection is orthogonal: w is parallel to f
        assert np.allclose(res.projection.w, res.projection.f.f / (res.projection.f.f @ res.projection.f.f), atol=1e-6)

    def test_two_dimensional_brute_force(self):
        # [DERIVED] in R^2 the kernel is a line, so w has one free parameter; dense grids do the rest
        space = random_family(np.random.default_rng(55), 2, 4, 2)
        h = Hyperplane.normalized(space, [1.0, 0.4])
        th = np.linspace(0, np.pi, 200_001)
        X = np.stack([np.cos(th), np.sin(th)], axis=1)
        nX = norm_eval(space, X)
        B = null_space_basis(h.f)

        def op_norm(c):
            w = h.f / (h.f @ h.f) + B[:, 0] * c
            return float(np.max(norm_eval(space, X - np.outer(X @ h.f, w)) / nX))

        oracle = minimize_scalar(op_norm, bracket=(-1, 1), tol=1e-10).fun
        res = minimal_projection_search(space, h)
        assert res.norm_estimate == pytest.approx(oracle, abs=1e-6)

    def test_corollary_coordinate_hyperplane(self, cor4):
        res = minimal_projection_search(cor4, Hyperplane.normalized(cor4, [1, 0, 0, 0]))
        assert res.norm_estimate > 1 + 1e-8
        assert res.lower_model <= res.norm_estimate + 1e-9
        assert res.norm_estimate - res.lower_model <= 1e-8
        assert res.norm_estimate <= res.crude_upper + 1e-9
        assert res.epsilon == pytest.approx(res.norm_estimate - 1)
        assert res.trace

    def test_coarse_grid_finds_nothing_smaller(self, cor4):
        # [DERIVED] independent coarse grid over w
        h = Hyperplane.normalized(cor4, [1, 0, 0, 0])
        res = minimal_projection_search(cor4, h)
        B = null_space_basis(h.f)
        w0 = h.f / (h.f @ h.f)
        c_star = B.T @ (res.projection.w - w0)
        cfg = SearchConfig(restarts=16)
        offsets = np.linspace(-0.3, 0.3, 5)
        for d in np.array(np.meshgrid(offsets, offsets, offsets)).reshape(3, -1).T:
            est = projection_norm_estimate(cor4, Projection(h, w0 + B @ (c_star + d)), cfg).value
            assert est >= res.norm_estimate - 1e-7

    def test_cross_seed(self, cor4):
        h = Hyperplane.normalized(cor4, [1, -1, 2, 0.5])
        a = minimal_projection_search(cor4, h, SearchConfig(seed=0))
        b = minimal_projection_search(cor4, h, SearchConfig(seed=7))
        assert a.norm_estimate == pytest.approx(b.norm_estimate, abs=1e-7)

    def test_deterministic(self, cor4):
        h = Hyperplane.normalized(cor4, [0, 1, 0, 0])
        a = minimal_projection_search(cor4, h)
        b = minimal_projection_search(cor4, h)
        assert a.norm_estimate == b.norm_estimate
        assert np.array_equal(a.projection.w, b.projection.w)


class TestGap:
    def test_threshold(self):
        assert gap_threshold(0.0, 3) == 0.0
        assert gap_threshold(0.5, 2) == pytest.approx(4 * np.sqrt(1 / 3))

    def test_euclidean_orthogonality(self):
        space = FunctionalFamily.identity(4)
        res = minimal_projection_search(space, Hyperplane.normalized(space, [1, 2, 3, 4]))
        rep = smoothness_gap_check(space, res, 50)
        assert rep.holds
        assert max(rep.max_sampled, rep.max_searched) < 1e-5

    def test_corollary(self, cor4):
        f = np.random.default_rng(56).standard_normal(4)
        res = minimal_projection_search(cor4, Hyperplane.normalized(cor4, f))
        rep = smoothness_gap_check(cor4, res, 100)
        assert rep.holds
        assert rep.samples == 100
        # direct re-evaluation of |f_y(w)| on fresh kernel vectors
        B = null_space_basis(res.projection.f.f)
        for u in np.random.default_rng(57).standard_normal((50, 3)):
            y = B @ u
            val = abs(supporting_functional(cor4, y)(res.projection.w))
            assert val <= max(rep.max_sampled, rep.max_searched) + 1e-6


class TestChainReplay:
    def setup_projection(self, space, seed):
        rng = np.random.default_rng(seed)
        h = Hyperplane.normalized(space, rng.standard_normal(space.n))
        res = minimal_projection_search(space, h)
        B = null_space_basis(h.f)
        y, z = (B @ rng.standard_normal((B.shape[1], 2))).T
        return h, res, y / norm_eval(space, y), z / norm_eval(space, z)

    def test_random_instance(self, cor4):
        h, res, y, z = self.setup_projection(cor4, 58)
        rep = proof_chain_replay(cor4, h, res, y, z)
        assert rep.holds, rep.violations
        # [DERIVED] expanded polynomial against direct evaluation of sum f_i(y + t z)^(2p-1) f_i(w)
        F, w = cor4.functionals, res.projection.w
        for t in np.linspace(-1, 1, 7):
            direct = np.sum((F @ (y + t * z)) ** 5 * (F @ w))
            assert np.polynomial.polynomial.polyval(t, rep.coefficients) == pytest.approx(direct, rel=1e-9, abs=1e-12)
        for k in range(len(rep.derivatives)):
            assert abs(rep.derivatives[k]) <= rep.markov_tight[k] * (1 + 1e-9) + 1e-12
            assert rep.markov_paper[k] == pytest.approx(2**6 * rep.markov_tight[k])

    def test_inverse_identity(self):
        space = random_family(np.random.default_rng(59), 3, 4, 2)
        h, res, y, z = self.setup_projection(space, 60)
        rep = proof_chain_replay(space, h, res.projection, y, z)
        assert rep.av_inf >= rep.v_inf / rep.exact_inverse_norm * (1 - 1e-9)
        assert rep.exact_inverse_norm <= rep.gautschi_bound * (1 + 1e-9)

    def test_linear_case(self):
        space = random_family(np.random.default_rng(61), 3, 3, 1)
        h, res, y, z = self.setup_projection(space, 62)
        rep = proof_chain_replay(space, h, res, y, z)
        assert len(rep.coefficients) == 2
        assert rep.holds

    def test_degenerate(self, cor4):
        h = Hyperplane.normalized(cor4, [1, 0, 0, 0])
        res = minimal_projection_search(cor4, h)
        with pytest.raises(DegenerateY):
            proof_chain_replay(cor4, h, res, [0, 1, 0, 0], [0, 0, 1, 0])
