"""Projections onto hyperplanes: norm estimates, minimal-projection search, gap checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateY, ViolationFound
from .numerics import exact_inf_norm_inverse, null_space_basis, vandermonde_inverse_norm_bound
from .optimize import SearchConfig, Status, maximize_on_sphere, rng_for, random_sphere_points
from .space import (
    FunctionalFamily,
    Hyperplane,
    _gradient_rows,
    _vector,
    dual_norm,
    norm_eval,
    norm_gradient,
    norm_hessian,
)

PROJECTION_TOL = 1e-10


@dataclass(frozen=True)
class Projection:
    """``P(x) = x - f(x) w`` onto ``ker f``."""

    f: Hyperplane
    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if abs(float(self.f(w)) - 1.0) > PROJECTION_TOL:
            raise ValueError(f"f(w) must equal 1, got {float(self.f(w))!r}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x - np.multiply.outer(self.f(x), self.w)


@dataclass(frozen=True)
class ProjectionNorm:
    value: float
    crude_upper: float
    point: np.ndarray
    status: Status

    def __float__(self) -> float:
        return self.value


@dataclass
class MinProjResult:
    projection: Projection
    norm_estimate: float
    crude_upper: float
    lower_model: float
    status: Status
    trace: list[dict] = field(default_factory=list)

    @property
    def epsilon(self) -> float:
        return max(self.norm_estimate - 1.0, 0.0)


def _ratio_fns(space: FunctionalFamily, f: np.ndarray, w: np.ndarray):
    F, p = space.functionals, space.p

    def objective(X):
        return norm_eval(space, X - np.outer(X @ f, w)) / norm_eval(space, X)

    def gradient(X):
        PX = X - np.outer(X @ f, w)
        nx, npx = norm_eval(space, X), norm_eval(space, PX)
        gp = _gradient_rows(F, p, PX)
        gp = gp - np.outer(gp @ w, f)
        gx = _gradient_rows(F, p, X)
        return gp / nx[:, None] - (npx / nx**2)[:, None] * gx

    return objective, gradient


def _inner_search(space, f, w, config, extra_starts=None):
    objective, gradient = _ratio_fns(space, f, w)
    starts = [null_space_basis(f).T]
    if extra_starts is not None and len(extra_starts):
        starts.append(np.asarray(extra_starts, dtype=float))
    return maximize_on_sphere(objective, gradient, space.n, config, starts=np.vstack(starts))


def projection_norm_estimate(
    space: FunctionalFamily, proj: Projection, config: SearchConfig | None = None
) -> ProjectionNorm:
    """Lower estimate of ``||P||`` by sphere search, with the bound ``1 + ||f||^* ||w||``."""
    config = config or SearchConfig()
    f, w = np.asarray(proj.f.f, dtype=float), proj.w
    res = _inner_search(space, f, w, config)
    crude = 1.0 + dual_norm(space, f) * norm_eval(space, w)
    return ProjectionNorm(res.value, crude, res.point, res.status)


def _canonical(points: np.ndarray) -> np.ndarray:
    # the ratio is even, so fix the sign of every cut point
    lead = np.argmax(np.abs(points), axis=1)
    signs = np.sign(points[np.arange(len(points)), lead])
    return points * signs[:, None]


def _new_cuts(result, cuts: np.ndarray, keep: int = 8) -> np.ndarray:
    vals, pts = result.candidate_values, _canonical(result.candidates)
    chosen = []
    for v, x in zip(vals, pts):
        if len(chosen) >= keep or v < vals[0] - 0.5 * abs(vals[0] - 1.0) - 1e-12:
            break
        pool = chosen + list(cuts)
        if all(np.linalg.norm(x - y) > 1e-7 for y in pool):
            chosen.append(x)
    return np.array(chosen).reshape(-1, cuts.shape[1] if cuts.size else pts.shape[1])


def _solve_model(space, f, w0, B, cuts, c0):
    """``min_c max_k ||x_k - f(x_k)(w0 + B c)|| / ||x_k||`` in epigraph form."""
    fx = cuts @ f
    base = cuts - np.outer(fx, w0)
    scale = norm_eval(space, cuts)
    F, p = space.functionals, space.p

    def values(c):
        return norm_eval(space, base - np.outer(fx, B @ c)) / scale

    def jac(c):
        V = base - np.outer(fx, B @ c)
        g = _gradient_rows(F, p, V)
        return -(fx / scale)[:, None] * (g @ B)

    d = B.shape[1]
    z0 = np.append(c0, values(c0).max() - 1.0)
    res = minimize(
        lambda z: z[-1],
        z0,
        jac=lambda z: np.eye(d + 1)[-1],
        method="SLSQP",
        constraints=[{
            "type": "ineq",
            "fun": lambda z: z[-1] + 1.0 - values(z[:-1]),
            "jac": lambda z: np.hstack([-jac(z[:-1]), np.ones((len(cuts), 1))]),
        }],
        options={"ftol": 1e-16, "maxiter": 500},
    )
    c = res.x[:-1]
    return c, float(values(c).max())


def minimal_projection_search(
    space: FunctionalFamily,
    hyperplane: Hyperplane,
    config: SearchConfig | None = None,
    *,
    max_rounds: int = 200,
    gap_tol: float | None = None,
) -> MinProjResult:
    """Minimize ``w -> ||P_w||`` over ``{f(w) = 1}`` by an exchange (cutting-set) method.

    The outer function is a maximum of convex functions of ``w``; the method
    keeps a finite set of inner maximizers, minimizes the maximum over that
    set exactly, and adds the maximizers of the true objective at the new
    ``w``.  The model optimum is a lower bound for the searched minimum, the
    best sphere-search value an upper bound; the loop stops when they meet.
    """
    config = config or SearchConfig()
    gap_tol = config.tol if gap_tol is None else gap_tol
    f = np.asarray(hyperplane.f, dtype=float)
    B = null_space_basis(f)
    w0 = f / (f @ f)
    c = np.zeros(B.shape[1])
    inner = _inner_search(space, f, w0, config)
    cuts = _canonical(inner.candidates[:1])
    best_c, best_val, best_status = c, inner.value, inner.status
    lower = 1.0
    trace = []
    status = Status.ITER_LIMIT
    for rnd in range(max_rounds):
        cuts = np.vstack([cuts, _new_cuts(inner, cuts)])
        c, model = _solve_model(space, f, w0, B, cuts, best_c)
        lower = max(lower, model)
        inner = _inner_search(space, f, w0 + B @ c, config, extra_starts=cuts)
        if inner.value < best_val:
            best_c, best_val, best_status = c, inner.value, inner.status
        trace.append({"round": rnd, "upper": best_val, "lower": lower, "cuts": int(len(cuts)), "value": inner.value})
        if best_val - lower <= gap_tol * max(1.0, best_val):
            status = Status.CONVERGED
            break
    if best_status is Status.ITER_LIMIT:
        status = Status.ITER_LIMIT
    w = w0 + B @ best_c
    w = w / float(f @ w)
    proj = Projection(hyperplane, w)
    crude = 1.0 + dual_norm(space, f) * norm_eval(space, w)
    return MinProjResult(proj, best_val, crude, lower, status, trace)


# -- smoothness gap ---------------------------------------------------------


@dataclass
class GapReport:
    epsilon: float
    t0: float
    bound_lemma: float
    bound_eq: float
    w_norm: float
    max_sampled: float
    max_searched: float
    worst_y: np.ndarray
    samples: int

    @property
    def holds(self) -> bool:
        worst = max(self.max_sampled, self.max_searched)
        return (
            worst <= self.bound_lemma + 1e-7
            and worst <= self.bound_eq + 1e-7
            and 1.0 - 1e-10 <= self.w_norm <= 2.0 + self.epsilon + 1e-7
            and self.w_norm < 4.0
        )


def gap_threshold(epsilon: float, p: int) -> float:
    return 4.0 * math.sqrt(epsilon * p / (2.0 + 2.0 * epsilon))


def smoothness_gap_check(
    space: FunctionalFamily,
    result: MinProjResult,
    sample_count: int = 100,
    config: SearchConfig | None = None,
) -> GapReport:
    """Check ``|f_y(w)| <= t0 (2 + eps)`` and ``<= 8 sqrt(eps p)`` on ``ker f``.

    Raises :class:`ViolationFound` with the offending ``y``.
    """
    config = config or SearchConfig(restarts=32, max_iters=300)
    f = np.asarray(result.projection.f.f, dtype=float)
    w = result.projection.w
    eps = result.epsilon
    p = space.p
    t0 = gap_threshold(eps, p)
    B = null_space_basis(f)

    U = random_sphere_points(rng_for(config.seed, 3), sample_count, B.shape[1])
    Y = U @ B.T
    Y = Y / norm_eval(space, Y)[:, None]
    sampled = np.abs(norm_gradient(space, Y) @ w)
    i = int(np.argmax(sampled))
    worst_y, max_sampled = Y[i], float(sampled[i])

    def objective(V):
        return (norm_gradient(space, V @ B.T) @ w) ** 2

    def gradient(V):
        X = V @ B.T
        s = norm_gradient(space, X) @ w
        Hw = norm_hessian(space, X) @ w
        return 2.0 * s[:, None] * (Hw @ B)

    res = maximize_on_sphere(objective, gradient, B.shape[1], config, starts=(worst_y @ B)[None, :])
    max_searched = math.sqrt(max(res.value, 0.0))
    if max_searched > max_sampled:
        y = B @ res.point
        worst_y = y / norm_eval(space, y)

    report = GapReport(
        epsilon=eps,
        t0=t0,
        bound_lemma=t0 * (2.0 + eps),
        bound_eq=8.0 * math.sqrt(eps * p),
        w_norm=norm_eval(space, w),
        max_sampled=max_sampled,
        max_searched=max_searched,
        worst_y=worst_y,
        samples=sample_count,
    )
    if not report.holds:
        raise ViolationFound("smoothness gap bound violated", worst_y)
    return report


# -- Markov / Vandermonde chain replay --------------------------------------


@dataclass
class ChainReport:
    nodes: np.ndarray
    v: np.ndarray
    coefficients: list
    max_abs: float
    derivatives: list
    markov_tight: list
    markov_paper: list
    identity_residual: float
    exact_inverse_norm: float
    gautschi_bound: float
    av_inf: float
    v_inf: float
    violations: list

    @property
    def holds(self) -> bool:
        return not self.violations


def _poly_max_abs(coeffs: np.ndarray) -> float:
    grid = np.linspace(-1.0, 1.0, 20001)
    best = float(np.max(np.abs(np.polynomial.polynomial.polyval(grid, coeffs))))
    if len(coeffs) > 2:
        for r in np.polynomial.polynomial.polyroots(np.polynomial.polynomial.polyder(coeffs)):
            if abs(r.imag) < 1e-12 and -1.0 <= r.real <= 1.0:
                best = max(best, abs(float(np.polynomial.polynomial.polyval(r.real, coeffs))))
    return best


def proof_chain_replay(space: FunctionalFamily, f: Hyperplane, result, y, z) -> ChainReport:
    """Replay the Vandermonde/Markov chain for ``P(t) = sum_i f_i(y + t z)^(2p-1) f_i(w)``.

    ``result`` may be a :class:`MinProjResult` or a :class:`Projection`.
    """
    proj = result.projection if isinstance(result, MinProjResult) else result
    y, z = _vector(space, y), _vector(space, z)
    F, e = space.functionals, space.exponent
    fy, fz, fw = F @ y, F @ z, F @ proj.w
    if np.any(np.abs(fy) < 1e-12):
        raise DegenerateY(f"f_i(y) vanishes for i = {int(np.argmin(np.abs(fy))) + 1}")
    d = e - 1
    nodes = fz / fy
    v = fy**d * fw
    # P(t) = sum_i v_i (1 + t x_i)^d
    binom = np.array([math.comb(d, k) for k in range(d + 1)], dtype=float)
    A = nodes[None, :] ** np.arange(d + 1)[:, None]
    coeffs = binom * (A @ v)
    max_abs = _poly_max_abs(coeffs)
    derivs, tight, paper, violations = [], [], [], []
    falling = [math.perm(d, k) for k in range(d + 1)]
    for k in range(d + 1):
        dk = float(coeffs[k] * math.factorial(k))
        derivs.append(dk)
        t = float(np.prod([(d - j) ** 2 for j in range(k)])) * max_abs
        tight.append(t)
        paper.append(2.0**e * t)
        if abs(dk) > t * (1 + 1e-9) + 1e-12:
            violations.append(f"markov k={k}")
    av = A @ v
    identity = max(abs(av[k] * falling[k] - derivs[k]) / max(1.0, abs(derivs[k])) for k in range(d + 1))
    if identity > 1e-9:
        violations.append("derivative identity")
    square = A[: len(nodes)] if len(nodes) <= d + 1 else None
    exact_norm = gautschi = av_inf = math.nan
    v_inf = float(np.max(np.abs(v)))
    if square is not None and len(set(np.round(nodes, 14))) == len(nodes):
        exact_norm = exact_inf_norm_inverse(square)
        gautschi = vandermonde_inverse_norm_bound(nodes)
        av_inf = float(np.max(np.abs(square @ v)))
        if exact_norm > gautschi * (1 + 1e-9):
            violations.append("gautschi")
        if av_inf < v_inf / exact_norm * (1 - 1e-9):
            violations.append("inverse norm")
    return ChainReport(
        nodes=nodes,
        v=v,
        coefficients=[float(c) for c in coeffs],
        max_abs=max_abs,
        derivatives=derivs,
        markov_tight=tight,
        markov_paper=paper,
        identity_residual=identity,
        exact_inverse_norm=exact_norm,
        gautschi_bound=gautschi,
        av_inf=av_inf,
        v_inf=v_inf,
        violations=violations,
    )
