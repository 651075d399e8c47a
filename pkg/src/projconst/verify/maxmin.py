"""Witness search for ``max_{||x|| = 1} min_i |f_i(x)| / ||f_i||^*``."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from ..errors import HypothesisViolation, ZeroFunctional
from ..numerics import null_space_basis
from ..optimize import SearchConfig, SearchResult, maximize_on_sphere
from ..space import FunctionalFamily, Hyperplane, _gradient_rows, dual_norm_bracket, norm_eval

TEMPERATURES = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def maxmin_floor(n: int, m: int) -> float:
    """The guaranteed level ``1 / (sqrt(n) (n - 1) m)``, defined for ``n >= 2``."""
    if n < 2:
        raise HypothesisViolation([f"n = {n} < 2: the max-min floor needs n >= 2"])
    return 1.0 / (math.sqrt(n) * (n - 1) * m)


def _certified_value(space: FunctionalFamily, G_upper: np.ndarray, x: np.ndarray) -> float:
    # dividing by upper dual-norm bounds keeps the value a lower bound
    return float(np.min(np.abs(G_upper @ x)) / norm_eval(space, x))


def maxmin_search(
    space: FunctionalFamily,
    subspace: Hyperplane | None = None,
    config: SearchConfig | None = None,
) -> SearchResult:
    """Soft-min ascent with a decreasing temperature, certified at the end.

    The reported ``value`` is ``min_i |f_i(x)| / u_i`` at the returned unit
    vector ``x``, where ``u_i`` is a rigorous upper bound of ``||f_i||^*``.
    """
    config = config or SearchConfig()
    F = space.functionals
    if np.any(~np.any(F != 0.0, axis=1)):
        raise ZeroFunctional("every functional must be nonzero")
    uppers = np.array([dual_norm_bracket(space, row)[1] for row in F])
    G = F / uppers[:, None]
    B = np.eye(space.n) if subspace is None else null_space_basis(subspace.f)
    Gb = G @ B
    Fb = F @ B
    d = B.shape[1]

    def parts(U):
        N = power_norm(U)
        S = U @ Gb.T
        a = (S / N[:, None]) ** 2
        return N, S, a

    def power_norm(U):
        return norm_eval(space, U @ B.T)

    evaluations = 0
    starts = None
    last = None
    for tau in TEMPERATURES:

        def objective(U, tau=tau):
            _, _, a = parts(U)
            return -tau * logsumexp(-a / tau, axis=1)

        def gradient(U, tau=tau):
            N, S, a = parts(U)
            wts = np.exp(-a / tau - logsumexp(-a / tau, axis=1, keepdims=True))
            gN = _gradient_rows(Fb, space.p, U)
            da = 2.0 * (S / N[:, None] ** 2)[:, :, None] * Gb[None, :, :] - 2.0 * (S**2 / N[:, None] ** 3)[:, :, None] * gN[:, None, :]
            return np.einsum("ki,kid->kd", wts, da)

        last = maximize_on_sphere(objective, gradient, d, config, starts=starts)
        evaluations += last.evaluations
        starts = last.candidates[: max(1, config.restarts // 4)]

    X = last.candidates @ B.T
    values = np.min(np.abs(X @ G.T), axis=1) / norm_eval(space, X)
    best = int(np.argmax(values))
    x = X[best] / norm_eval(space, X[best])
    return SearchResult(
        point=x,
        value=_certified_value(space, G, x),
        status=last.status,
        evaluations=evaluations,
        candidates=X,
        candidate_values=values,
    )
