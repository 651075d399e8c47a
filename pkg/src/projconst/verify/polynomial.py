"""Iterated Markov inequality and the Gautschi bound on random instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from ..numerics import exact_inf_norm_inverse, vandermonde_inverse_norm_bound, vandermonde_matrix
from ..optimize import rng_for


def max_abs_on_interval(coeffs: np.ndarray) -> float:
    """``max_{[-1, 1]} |P|`` from the endpoints and the real critical points."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if coeffs.size == 0:
        return 0.0
    pts = [-1.0, 1.0]
    if coeffs.size > 2:
        crit = P.polyroots(P.polyder(coeffs))
        pts += [r.real for r in crit if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and -1.0 <= r.real <= 1.0]
    return float(np.max(np.abs(P.polyval(np.array(pts), coeffs))))


def markov_factor(d: int, k: int) -> float:
    """``prod_{j<k} (d - j)^2``: the ``k``-fold Markov factor for degree ``d``."""
    return float(np.prod([(d - j) ** 2 for j in range(k)])) if k else 1.0


@dataclass
class MarkovReport:
    degree: int
    k: int
    trials: int
    max_ratio: float
    violations: int
    worst_coefficients: list

    @property
    def holds(self) -> bool:
        return self.violations == 0


def markov_chain_check(degree: int, k: int, trials: int = 1000, seed: int = 0) -> MarkovReport:
    """``|P^(k)(0)| <= prod (d - j)^2`` for random ``P`` with ``max |P| = 1``.

    The sample mixes random Chebyshev expansions with ``T_d`` itself.
    """
    if not 1 <= k <= degree:
        raise ValueError("need 1 <= k <= degree")
    rng = rng_for(seed, 6, degree, k)
    bound = markov_factor(degree, k)
    worst, worst_c, bad = 0.0, [], 0
    for trial in range(trials):
        if trial == 0:
            cheb = np.zeros(degree + 1)
            cheb[-1] = 1.0
        else:
            d = int(rng.integers(0, degree + 1))
            cheb = rng.standard_normal(d + 1) * rng.uniform(0.1, 1.0)
        coeffs = C.cheb2poly(cheb)
        peak = max_abs_on_interval(coeffs)
        if peak == 0.0:
            continue
        coeffs = coeffs / peak
        deriv = P.polyval(0.0, P.polyder(coeffs, k)) if len(coeffs) > k else 0.0
        ratio = abs(deriv) / bound
        if abs(deriv) > bound + 1e-6:
            bad += 1
        if ratio > worst:
            worst, worst_c = ratio, [float(c) for c in coeffs]
    return MarkovReport(degree, k, trials, worst, bad, worst_c)


@dataclass
class VandermondeReport:
    sets: int
    max_ratio: float
    violations: int
    worst_nodes: list

    @property
    def holds(self) -> bool:
        return self.violations == 0


def vandermonde_check(sets: int = 200, sizes=range(2, 9), seed: int = 0) -> VandermondeReport:
    """``||V^{-1}||_inf <= prod (1 + |x_j|) / |x_j - x_i|`` on random node sets in [-1, 1]."""
    rng = rng_for(seed, 7)
    sizes = list(sizes)
    worst, worst_nodes, bad = 0.0, [], 0
    for s in range(sets):
        size = sizes[s % len(sizes)]
        nodes = rng.uniform(-1.0, 1.0, size)
        exact = exact_inf_norm_inverse(vandermonde_matrix(nodes))
        bound = vandermonde_inverse_norm_bound(nodes)
        ratio = exact / bound
        if exact > bound * (1.0 + 1e-10):
            bad += 1
        if ratio > worst:
            worst, worst_nodes = ratio, [float(x) for x in nodes]
    return VandermondeReport(sets, worst, bad, worst_nodes)
