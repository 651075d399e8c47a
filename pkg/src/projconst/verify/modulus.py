"""Witness search for the modulus of convexity ``delta(t)``.

A pair ``x = c + h``, ``y = c - h`` with ``||h|| = t/2`` has ``||x - y|| = t``.
For a fixed direction of ``c`` the largest admissible scale ``s`` (both
points in the unit ball) is found by regula falsi, since
``s -> max(||s c + h||, ||s c - h||)`` is convex and even.  The witness value
is ``1 - s ||c||``, an upper bound for ``delta(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import BadExponent
from ..optimize import SearchConfig, rng_for
from ..space import FunctionalFamily, _dual_values

VIOLATION_MARGIN = 1e-6


@dataclass(frozen=True)
class LqSpec:
    q: float
    d: int

    def __post_init__(self):
        if not 1.0 < self.q <= 2.0:
            raise BadExponent(f"q must lie in (1, 2], got {self.q}")

    @property
    def dimension(self) -> int:
        return self.d

    def norms(self, X: np.ndarray) -> np.ndarray:
        A = np.abs(X)
        M = A.max(axis=1)
        safe = np.where(M > 0, M, 1.0)
        return M * np.sum((A / safe[:, None]) ** self.q, axis=1) ** (1.0 / self.q)

    def bound(self, t: float) -> float:
        return (self.q - 1.0) * t * t / 8.0


@dataclass(frozen=True)
class DualFamilySpec:
    """The dual of a functional-family space; its ``q`` is ``2p / (2p - 1)``."""

    space: FunctionalFamily

    @property
    def dimension(self) -> int:
        return self.space.n

    @property
    def q(self) -> float:
        return self.space.q

    def norms(self, X: np.ndarray) -> np.ndarray:
        return _dual_values(self.space.functionals, X, self.space.p)[0]

    def bound(self, t: float) -> float:
        return (self.q - 1.0) * t * t / 8.0


def quotient_spec(p: int, subspace_basis) -> DualFamilySpec:
    """``l_q^d / Y`` with ``q = 2p/(2p-1)``, as the dual of ``(Y^perp, l_2p)``.

    ``subspace_basis`` holds the spanning vectors of ``Y`` as rows.  The
    quotient norm of ``[x]`` equals ``||C^T x||^*`` for an orthonormal basis
    ``C`` of ``Y^perp``, so the quotient lives in ``dim Y^perp`` coordinates.
    """
    Y = np.atleast_2d(np.asarray(subspace_basis, dtype=float))
    _, s, vt = np.linalg.svd(Y)
    r = int(np.sum(s > 1e-12 * max(s.max(), 1.0)))
    C = vt[r:].T
    if C.shape[1] == 0:
        raise ValueError("the subspace is the whole space")
    return DualFamilySpec(FunctionalFamily(C, p))


@dataclass(frozen=True)
class ModulusProbe:
    t: float
    delta_upper: float
    bound: float
    x: np.ndarray
    y: np.ndarray

    @property
    def violated(self) -> bool:
        return self.delta_upper < self.bound - VIOLATION_MARGIN


def _scale(spec, C: np.ndarray, H: np.ndarray, iters: int = 40) -> np.ndarray:
    # Illinois regula falsi on the bracket [1 - t/2, 1 + t/2]; returns the
    # feasible end, so every witness keeps both points in the unit ball
    half = spec.norms(H)

    def g(s):
        return np.maximum(spec.norms(s[:, None] * C + H), spec.norms(s[:, None] * C - H)) - 1.0

    lo, hi = np.maximum(1.0 - half, 0.0), 1.0 + half
    glo, ghi = g(lo), g(hi)
    side = np.zeros(len(C))
    for _ in range(iters):
        if np.all((hi - lo <= 1e-15 * hi) | (glo >= -1e-15)):
            break
        denom = ghi - glo
        s = np.where(denom > 0, (lo * ghi - hi * glo) / np.where(denom > 0, denom, 1.0), 0.5 * (lo + hi))
        s = np.clip(s, lo, hi)
        gs = g(s)
        left = gs <= 0.0
        ghi = np.where(left & (side < 0), 0.5 * ghi, ghi)
        glo = np.where(~left & (side > 0), 0.5 * glo, glo)
        lo, glo = np.where(left, s, lo), np.where(left, gs, glo)
        hi, ghi = np.where(left, hi, s), np.where(left, ghi, gs)
        side = np.where(left, -1.0, 1.0)
    return lo


def _values(spec, t: float, Z: np.ndarray, iters: int = 40):
    d = spec.dimension
    C, H = Z[:, :d], Z[:, d:]
    C = C / spec.norms(C)[:, None]
    H = (0.5 * t) * H / spec.norms(H)[:, None]
    s = _scale(spec, C, H, iters)
    return 1.0 - s, s[:, None] * C, H


def _probe(spec, t: float, config: SearchConfig, index: int, iters: int) -> ModulusProbe:
    d = spec.dimension
    bound = spec.bound(t)
    if t == 0.0:
        x = np.zeros(d)
        x[0] = 1.0
        return ModulusProbe(t, 0.0, bound, x, x.copy())
    rng = rng_for(config.seed, 5, index)
    Z = rng.standard_normal((config.restarts, 2 * d))
    vals, _, _ = _values(spec, t, Z, iters)
    step = np.full(len(Z), 0.3)
    for _ in range(config.max_iters):
        trial = Z + step[:, None] * rng.standard_normal(Z.shape)
        tv, _, _ = _values(spec, t, trial, iters)
        better = tv < vals
        Z[better], vals[better] = trial[better], tv[better]
        step = np.where(better, step * 1.5, step * 0.7)
        step = np.where(step < 1e-9, 0.3, step)
    best = int(np.argmin(vals))
    z = Z[best]
    v, c, h = _values(spec, t, z[None, :], iters)
    return ModulusProbe(t, float(v[0]), bound, c[0] + h[0], c[0] - h[0])


def modulus_falsify(spec, t_grid: Sequence[float], config: SearchConfig | None = None) -> list[ModulusProbe]:
    """Search, per ``t``, for a pair that pushes ``1 - ||(x+y)/2||`` below the bound."""
    for t in t_grid:
        if not 0.0 <= t <= 2.0:
            raise ValueError(f"t must lie in [0, 2], got {t}")
    if isinstance(spec, LqSpec):
        config = config or SearchConfig(restarts=64, max_iters=400)
    else:
        config = config or SearchConfig(restarts=12, max_iters=50)
    return [_probe(spec, float(t), config, i, 40) for i, t in enumerate(t_grid)]


def euclidean_modulus(t: float) -> float:
    return 1.0 - math.sqrt(1.0 - t * t / 4.0)
