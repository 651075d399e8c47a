"""The normed space ``X = (R^n, ||.||)`` with ``||x|| = (sum_i |f_i(x)|^(2p))^(1/2p)``.

``X`` sits isometrically inside ``l_{2p}^m`` through ``x -> (f_1(x), ..., f_m(x))``,
so its dual is a quotient of ``l_q^m`` with ``q = 2p/(2p-1)``.  Dual norms are
computed from the smooth convex program

    min_z  (1/2p) * sum_i (G z)_i^(2p)  -  <g, z>,

whose minimizer points in the norming direction of ``g``; damped Newton
solves it to machine precision in a handful of steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DependentBasis, DimensionMismatch, RankDeficient, ZeroFunctional, ZeroVector
from .numerics import kernel_basis, power_norm_rows, to_fraction
from .optimize import SearchConfig, maximize_on_sphere

ZERO_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FunctionalFamily:
    """``m`` functionals on ``R^n`` (rows of ``functionals``) and the exponent ``p``."""

    functionals: np.ndarray
    p: int
    exact: tuple[tuple[Fraction, ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        F = np.array(self.functionals, dtype=float)
        if F.ndim != 2 or F.shape[0] < 1 or F.shape[1] < 1:
            raise ValueError("functionals must be a non-empty m x n array")
        if not np.all(np.isfinite(F)):
            raise ValueError("functionals must be finite")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        zero_rows = np.flatnonzero(~np.any(F != 0.0, axis=1))
        if zero_rows.size:
            raise ZeroFunctional(f"functional {int(zero_rows[0]) + 1} is zero")
        rank = int(np.linalg.matrix_rank(F))
        if rank < F.shape[1]:
            raise RankDeficient(rank, F.shape[1])
        F.setflags(write=False)
        object.__setattr__(self, "functionals", F)
        object.__setattr__(self, "p", int(self.p))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], p: int) -> "FunctionalFamily":
        """Build from rows of ints, floats, Fractions or ``"a/b"`` strings; keeps exact copies."""
        exact = tuple(tuple(to_fraction(v) for v in row) for row in rows)
        return cls(np.array([[float(v) for v in row] for row in exact]), p, exact)

    @classmethod
    def identity(cls, n: int, p: int = 1) -> "FunctionalFamily":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], p)

    @property
    def m(self) -> int:
        return self.functionals.shape[0]

    @property
    def n(self) -> int:
        return self.functionals.shape[1]

    @property
    def exponent(self) -> int:
        return 2 * self.p

    @property
    def q(self) -> float:
        return self.exponent / (self.exponent - 1)

    def restricted(self, basis: np.ndarray) -> "FunctionalFamily":
        """The subspace spanned by the columns of ``basis``, in those coordinates.

        Functionals that vanish on the subspace contribute nothing and are dropped.
        """
        G = self.functionals @ np.asarray(basis, dtype=float)
        return FunctionalFamily(G[np.any(G != 0.0, axis=1)], self.p)

    def __repr__(self) -> str:
        return f"FunctionalFamily(n={self.n}, m={self.m}, p={self.p})"


@dataclass(frozen=True)
class Hyperplane:
    """Kernel of ``f``; ``f`` is expected to have dual norm one (see :meth:`normalized`)."""

    f: np.ndarray

    @classmethod
    def normalized(cls, space: FunctionalFamily, f: Sequence[float]) -> "Hyperplane":
        f = _vector(space, f)
        size = dual_norm(space, f)
        if size == 0.0:
            raise ZeroFunctional("hyperplane functional is zero")
        g = f / size
        g.setflags(write=False)
        return cls(g)

    def __call__(self, x) -> float | np.ndarray:
        return np.asarray(x, dtype=float) @ self.f


@dataclass(frozen=True)
class SupportFunctional:
    base_point: np.ndarray
    coefficients: np.ndarray
    vector: np.ndarray

    def __call__(self, x) -> float | np.ndarray:
        return np.asarray(x, dtype=float) @ self.vector


@dataclass(frozen=True)
class SpanDistance:
    """``value = min_c ||g - sum_j c_j h_j||^*``, attained at ``coefficients``.

    ``point`` is a unit vector of the common kernel of the ``h_j`` on which
    ``g`` attains ``value``; ``value = g(point)`` is therefore a certified
    lower bound of the distance (Hahn-Banach).
    """

    value: float
    coefficients: np.ndarray
    point: np.ndarray | None


def _vector(space: FunctionalFamily, x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape[-1] != space.n:
        raise DimensionMismatch(f"expected length {space.n}, got {v.shape[-1]}")
    return v


def norm_eval(space: FunctionalFamily, x) -> float | np.ndarray:
    """``||x||``; accepts one vector or a ``(k, n)`` batch."""
    v = _vector(space, x)
    out = power_norm_rows(np.atleast_2d(v) @ space.functionals.T, space.exponent)
    return float(out[0]) if v.ndim == 1 else out


def _gradient_rows(F: np.ndarray, p: int, X: np.ndarray) -> np.ndarray:
    U = X @ F.T
    N = power_norm_rows(U, 2 * p)
    V = U / np.where(N > 0.0, N, 1.0)[:, None]
    return V ** (2 * p - 1) @ F


def norm_gradient(space: FunctionalFamily, x) -> np.ndarray:
    """Gradient of the norm: ``sum_i (f_i(x)/||x||)^(2p-1) f_i``."""
    v = _vector(space, x)
    X = np.atleast_2d(v)
    if np.any(norm_eval(space, X) == 0.0):
        raise ZeroVector("norm gradient undefined at 0")
    g = _gradient_rows(space.functionals, space.p, X)
    return g[0] if v.ndim == 1 else g


def norm_hessian(space: FunctionalFamily, x) -> np.ndarray:
    """Hessian of the norm at a batch of points, shape ``(k, n, n)``."""
    X = np.atleast_2d(_vector(space, x))
    F = space.functionals
    U = X @ F.T
    N = power_norm_rows(U, space.exponent)
    V = U / N[:, None]
    g = V ** (space.exponent - 1) @ F
    D = np.einsum("ki,ia,ib->kab", V ** (space.exponent - 2), F, F)
    return (space.exponent - 1) / N[:, None, None] * (D - np.einsum("ka,kb->kab", g, g))


def supporting_functional(space: FunctionalFamily, y) -> SupportFunctional:
    """The unique norm-one functional with ``f_y(y) = ||y||``."""
    y = _vector(space, y)
    size = norm_eval(space, y)
    if size == 0.0:
        raise ZeroVector("supporting functional undefined at 0")
    coeffs = (space.functionals @ y / size) ** (space.exponent - 1)
    return SupportFunctional(base_point=y.copy(), coefficients=coeffs, vector=coeffs @ space.functionals)


# -- dual norms -------------------------------------------------------------


def _dual_newton(G: np.ndarray, gs: np.ndarray, p: int, max_iter: int = 80) -> np.ndarray:
    """Norming directions for a batch of functionals ``gs`` (rows) on ``z -> ||G z||_2p``.

    Returns ``Z`` with ``<gs_k, Z_k> = max`` over the unit ball direction.
    Every row of ``gs`` must be nonzero.
    """
    e = 2 * p
    k, d = gs.shape
    gram = G.T @ G
    Z = np.linalg.solve(gram, gs.T).T
    if p == 1:
        return Z
    s = np.einsum("kd,kd->k", gs, Z) / power_norm_rows(Z @ G.T, e) ** e
    Z *= (s ** (1.0 / (e - 1)))[:, None]

    def phi(Zb, gb):
        return np.sum((Zb @ G.T) ** e, axis=1) / e - np.einsum("kd,kd->k", gb, Zb)

    active = np.ones(k, dtype=bool)
    ridge = 1e-15 * np.trace(gram) * np.eye(d)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Za, ga = Z[idx], gs[idx]
        U = Za @ G.T
        grad = U ** (e - 1) @ G - ga
        H = (e - 1) * np.einsum("ki,ia,ib->kab", U ** (e - 2), G, G) + ridge
        step = -np.linalg.solve(H, grad[:, :, None])[:, :, 0]
        dec = -np.einsum("kd,kd->k", grad, step)
        f0 = phi(Za, ga)
        # inside the quadratic region the Armijo test only sees rounding noise:
        # take the full step and stop
        close = dec <= 1e-12 * (1.0 + np.abs(f0))
        Za[close] += step[close]
        t = np.ones(idx.size)
        accepted = close.copy()
        for _ls in range(60):
            if accepted.all():
                break
            cand = Za + t[:, None] * step
            ok = phi(cand, ga) <= f0 - 0.25 * t * dec
            newly = ok & ~accepted
            Za[newly] = cand[newly]
            accepted |= ok
            t = np.where(accepted, t, t / 2.0)
        Z[idx] = Za
        finished = close | ~accepted
        active[idx[finished]] = False
    return Z


def _dual_values(G: np.ndarray, gs: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Dual norms of the rows of ``gs`` and unit-norm maximizers (zero rows give 0, None-row)."""
    k, d = gs.shape
    scale = np.linalg.norm(gs, axis=1)
    values = np.zeros(k)
    points = np.zeros((k, d))
    nz = scale > 0.0
    if nz.any():
        unit = gs[nz] / scale[nz, None]
        Z = _dual_newton(G, unit, p)
        N = power_norm_rows(Z @ G.T, 2 * p)
        points[nz] = Z / N[:, None]
        values[nz] = np.einsum("kd,kd->k", gs[nz], points[nz])
    return values, points


def dual_norm(
    space: FunctionalFamily,
    g,
    *,
    method: str = "newton",
    config: SearchConfig | None = None,
) -> float | np.ndarray:
    """``||g||^* = max_{||x|| = 1} g(x)``.

    ``method="newton"`` solves the concave maximization directly (it has no
    spurious local maxima); ``method="sphere"`` runs the generic multi-start
    sphere search.  Both report the value at a witness point, hence a lower
    bound of the exact dual norm.  Batches are accepted for ``"newton"``.
    """
    g = _vector(space, g)
    if method == "newton":
        values, _ = _dual_values(space.functionals, np.atleast_2d(g), space.p)
        return float(values[0]) if g.ndim == 1 else values
    if method != "sphere":
        raise ValueError(f"unknown method {method!r}")
    if g.ndim != 1:
        raise ValueError("sphere method takes a single functional")
    if not np.any(g):
        return 0.0
    F, p = space.functionals, space.p

    def objective(U):
        return U @ g / power_norm_rows(U @ F.T, 2 * p)

    def gradient(U):
        N = power_norm_rows(U @ F.T, 2 * p)
        return g[None, :] / N[:, None] - (U @ g / N)[:, None] * _gradient_rows(F, p, U) / N[:, None]

    result = maximize_on_sphere(objective, gradient, space.n, config or SearchConfig())
    return result.value


def dual_norm_bracket(space: FunctionalFamily, g) -> tuple[float, float]:
    """Lower and upper bound of ``||g||^*``.

    The lower bound is ``g`` at a unit witness.  The upper bound is
    ``||lam||_q`` for coefficients with ``F^T lam = g`` (Holder), obtained
    from the supporting functional of the witness plus a least-norm
    correction of the residual.
    """
    g = _vector(space, g)
    F = space.functionals
    lower, points = _dual_values(F, g[None, :], space.p)
    lower = float(lower[0])
    if lower == 0.0:
        return 0.0, 0.0
    x = points[0]
    lam = lower * (F @ x) ** (space.exponent - 1)
    resid = g - F.T @ lam
    lam = lam + F @ np.linalg.solve(F.T @ F, resid)
    q = space.q
    upper = float(np.sum(np.abs(lam) ** q) ** (1.0 / q))
    return lower, max(upper, lower)


def span_distance(space: FunctionalFamily, g, others: Sequence = ()) -> SpanDistance:
    """``min_c ||g - sum_j c_j h_j||^*`` for functionals ``h_j`` in ``others``.

    By Hahn-Banach this equals the norm of ``g`` restricted to the common
    kernel of the ``h_j``, which is what gets computed.  Restrictions below
    ``1e-12`` of ``|g|`` are treated as exact zeros.
    """
    g = _vector(space, g)
    C = np.zeros((0, space.n)) if len(others) == 0 else np.atleast_2d(np.asarray(others, dtype=float))
    if C.shape[0] == 0:
        value, pts = _dual_values(space.functionals, g[None, :], space.p)
        return SpanDistance(float(value[0]), np.zeros(0), pts[0] if value[0] > 0 else None)
    _vector(space, C)
    B = kernel_basis(C)
    gz = B.T @ g
    if B.shape[1] == 0 or np.linalg.norm(gz) <= ZERO_RTOL * np.linalg.norm(g):
        coeffs, *_ = np.linalg.lstsq(C.T, g, rcond=None)
        return SpanDistance(0.0, coeffs, None)
    value, pts = _dual_values(space.functionals @ B, gz[None, :], space.p)
    value = float(value[0])
    x = B @ pts[0]
    extension = value * _gradient_rows(space.functionals, space.p, x[None, :])[0]
    coeffs, *_ = np.linalg.lstsq(C.T, g - extension, rcond=None)
    return SpanDistance(value, coeffs, x)


def restricted_dual_norm(space: FunctionalFamily, g, h) -> float:
    """Norm of ``g`` restricted to ``ker h``: ``max g(x)`` over unit ``x`` with ``h(x) = 0``."""
    h = _vector(space, h)
    if not np.any(h):
        raise ZeroFunctional("h is zero")
    return span_distance(space, g, [h]).value


def quotient_distance(space: FunctionalFamily, x, basis: Sequence = ()) -> float:
    """``dist(x, span(basis))`` in the space's norm (the quotient norm of ``[x]``)."""
    x = _vector(space, x)
    if len(basis) == 0:
        return norm_eval(space, x)
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    _vector(space, B)
    B = B.T
    if np.linalg.matrix_rank(B) < B.shape[1]:
        raise DependentBasis("basis vectors are linearly dependent")
    c, *_ = np.linalg.lstsq(B, x, rcond=None)
    if np.linalg.norm(x - B @ c) <= ZERO_RTOL * max(np.linalg.norm(x), 1e-300):
        return 0.0
    F, e = space.functionals, space.exponent
    FB = F @ B
    scale = norm_eval(space, x)

    def psi(cc):
        return float(np.sum((F @ (x - B @ cc) / scale) ** e))

    val = psi(c)
    for _ in range(100):
        u = F @ (x - B @ c) / scale
        grad = -e * FB.T @ u ** (e - 1) / scale
        H = e * (e - 1) * (FB.T * u ** (e - 2)) @ FB / scale**2
        try:
            step = -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, grad, rcond=None)[0]
        dec = -grad @ step
        if not dec > 1e-30 * max(val, 1e-300):
            break
        t = 1.0
        while t > 1e-12:
            cand = c + t * step
            vc = psi(cand)
            if vc <= val - 0.25 * t * dec:
                c, val = cand, vc
                break
            t /= 2.0
        else:
            break
    return norm_eval(space, x - B @ c)
