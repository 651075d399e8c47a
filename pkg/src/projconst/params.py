"""The geometric parameters alpha and beta and the three-way case split.

Indices in every public result are 1-based, matching how functionals are
numbered in the bound (``f_1, ..., f_m``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import BadWitness, TooFewFunctionals
from .numerics import LogScalar, log10_ratio, rational
from .optimize import SearchConfig, minimize_convex_lowdim, parallel_map, rng_for
from .space import FunctionalFamily, Hyperplane, dual_norm, norm_eval, span_distance

ALPHA_CAP = 0.5
WITNESS_FLOAT_TOL = 1e-12

Tuple4 = tuple[int, tuple[int, int, int]]


class AlphaMode(str, enum.Enum):
    NUMERIC = "NumericSearch"
    WITNESS = "WitnessCertificate"


class BetaMode(str, enum.Enum):
    CERTIFICATE = "CoefficientCertificate"
    NUMERIC = "NumericSearch"


@dataclass(frozen=True)
class AlphaEstimate:
    value: float
    mode: AlphaMode
    worst_tuple: Tuple4
    raw_value: float
    distances: dict = field(default_factory=dict, repr=False)

    @property
    def valid(self) -> bool:
        return self.value > 0.0


@dataclass(frozen=True)
class BetaEstimate:
    value: float
    mode: BetaMode
    worst_pair: tuple[int, int]
    cause: str | None = None
    exact_value: Fraction | None = None
    per_pair: dict = field(default_factory=dict, repr=False)


def alpha_tuples(m: int):
    """All ``(i, (j, k, l))`` with ``j < k < l`` and ``i`` outside, 1-based."""
    for i in range(1, m + 1):
        rest = [x for x in range(1, m + 1) if x != i]
        for triple in combinations(rest, 3):
            yield i, triple


def _lowdim_distance(space: FunctionalFamily, g: np.ndarray, others: np.ndarray, config: SearchConfig) -> float:
    res = minimize_convex_lowdim(lambda c: dual_norm(space, g - c @ others), len(others), config)
    return res.value


def alpha_estimate(
    space: FunctionalFamily,
    witnesses: Mapping[Tuple4, Sequence] | None = None,
    *,
    engine: str = "span",
    config: SearchConfig | None = None,
) -> AlphaEstimate:
    """Smallest ``dist(f_i, lin{f_j, f_k, f_l})`` over all index choices, capped at 1/2.

    Without witnesses each distance is computed numerically: ``engine="span"``
    uses the Hahn-Banach form (norm of ``f_i`` on the common kernel),
    ``engine="lowdim"`` minimizes over the three span coefficients.  With
    witnesses, ``|f_i(v)| / ||v||`` is a rigorous lower bound for each tuple.
    """
    m = space.m
    if m < 4:
        raise TooFewFunctionals(f"alpha needs m >= 4 functionals, got {m}")
    tuples = list(alpha_tuples(m))
    F = space.functionals
    if witnesses is None:
        if engine == "span":
            fn = lambda t: span_distance(space, F[t[0] - 1], F[[x - 1 for x in t[1]]]).value  # noqa: E731
        elif engine == "lowdim":
            cfg = config or SearchConfig(tol=1e-12)
            fn = lambda t: _lowdim_distance(space, F[t[0] - 1], F[[x - 1 for x in t[1]]], cfg)  # noqa: E731
        else:
            raise ValueError(f"unknown engine {engine!r}")
        distances = dict(zip(tuples, parallel_map(fn, tuples)))
        mode = AlphaMode.NUMERIC
    else:
        distances = {t: _witness_bound(space, t, witnesses) for t in tuples}
        mode = AlphaMode.WITNESS
    worst = min(tuples, key=lambda t: (distances[t], t))
    raw = distances[worst]
    return AlphaEstimate(min(raw, ALPHA_CAP), mode, worst, raw, distances)


def _witness_bound(space: FunctionalFamily, t: Tuple4, witnesses: Mapping) -> float:
    i, triple = t
    if t not in witnesses:
        raise BadWitness(f"no witness for tuple {t}")
    v = witnesses[t]
    exact = space.exact is not None and all(isinstance(x, (Fraction, int)) for x in v)
    if exact:
        v = [Fraction(x) for x in v]
        values = [rational.dot(row, v) for row in space.exact]
        for j in triple:
            if values[j - 1] != 0:
                raise BadWitness(f"witness for {t} has f_{j}(v) = {values[j - 1]}")
        return rigorous_ratio_lower(abs(values[i - 1]), values, space.exponent)
    v = np.asarray(v, dtype=float)
    vals = space.functionals @ v
    scale = np.linalg.norm(space.functionals, axis=1) * np.linalg.norm(v)
    for j in triple:
        if abs(vals[j - 1]) > WITNESS_FLOAT_TOL * scale[j - 1]:
            raise BadWitness(f"witness for {t} has f_{j}(v) = {vals[j - 1]:.3e}")
    return abs(vals[i - 1]) / norm_eval(space, v)


def rigorous_ratio_lower(numerator: Fraction, values: Sequence[Fraction], exponent: int) -> float:
    """A float ``<= numerator / (sum |values|^exponent)^(1/exponent)``, exactly."""
    power = sum((abs(x) ** exponent for x in values), Fraction(0))
    if power == 0:
        raise BadWitness("witness is the zero vector")
    root = float(power) ** (1.0 / exponent)
    while Fraction(root) ** exponent < power:
        root = math.nextafter(root, math.inf)
    ratio = Fraction(numerator) / Fraction(root)
    out = float(ratio)
    while Fraction(out) > ratio:
        out = math.nextafter(out, -math.inf)
    return out


# -- beta -------------------------------------------------------------------


def _representation(space: FunctionalFamily, target: int, rest: list[int]):
    """Coefficients expressing ``f_target`` through ``f_rest`` (0-based) and their l1 sum."""
    if space.exact is not None and len(rest) == space.n:
        A = [[space.exact[r][c] for r in rest] for c in range(space.n)]
        coeffs = rational.solve(A, list(space.exact[target]))
        return coeffs, sum((abs(c) for c in coeffs), Fraction(0))
    F = space.functionals
    coeffs, *_ = np.linalg.lstsq(F[rest].T, F[target], rcond=None)
    return coeffs, float(np.abs(coeffs).sum())


def beta_estimate(space: FunctionalFamily, mode: BetaMode | str = BetaMode.CERTIFICATE) -> BetaEstimate:
    """Constant ``beta`` with ``max(|f_j|, |f_k|) <= beta * max_{i not in {j,k}} |f_i|``.

    ``CoefficientCertificate`` writes ``f_j`` and ``f_k`` through the other
    functionals and takes the largest absolute coefficient sum (exact when
    exactly ``n`` remain and rational rows are known); this is a valid upper
    bound by the triangle inequality.  ``NumericSearch`` solves, per pair,
    the linear program ``max f_j(x)`` subject to ``|f_i(x)| <= 1``, which is
    the optimal constant.  ``+inf`` with cause ``NotSpanning`` when removing
    a pair drops the rank.
    """
    mode = BetaMode(mode)
    m, n = space.m, space.n
    F = space.functionals
    best, worst, best_exact = -1.0, (0, 0), None
    per_pair = {}
    for j, k in combinations(range(m), 2):
        rest = [i for i in range(m) if i not in (j, k)]
        pair = (j + 1, k + 1)
        if len(rest) < n or np.linalg.matrix_rank(F[rest]) < n:
            per_pair[pair] = math.inf
            return BetaEstimate(math.inf, mode, pair, cause="NotSpanning", per_pair=per_pair)
        if mode is BetaMode.CERTIFICATE:
            sums = [_representation(space, t, rest)[1] for t in (j, k)]
            local = max(sums)
            local_f = float(local)
        else:
            local_f = max(_lp_ratio(F, t, rest) for t in (j, k))
            local = local_f
        per_pair[pair] = local_f
        if local_f > best:
            best, worst = local_f, pair
            best_exact = local if isinstance(local, Fraction) else None
    return BetaEstimate(best, mode, worst, exact_value=best_exact, per_pair=per_pair)


def _lp_ratio(F: np.ndarray, target: int, rest: list[int]) -> float:
    A = F[rest]
    res = linprog(
        -F[target],
        A_ub=np.vstack([A, -A]),
        b_ub=np.ones(2 * len(rest)),
        bounds=[(None, None)] * F.shape[1],
        method="highs",
    )
    if res.status == 3:
        return math.inf
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return float(-res.fun)


# -- case classification ----------------------------------------------------


class Case(str, enum.Enum):
    NEAR_SINGLE = "NearSingle"
    NEAR_PAIR = "NearPair"
    GENERIC = "Generic"


@dataclass(frozen=True)
class CaseLabel:
    tag: Case
    achieved_distance: float
    k: int | None = None
    l: int | None = None
    a0: float | None = None
    r0: float | None = None
    single_distances: dict = field(default_factory=dict, repr=False)
    pair_distances: dict = field(default_factory=dict, repr=False)


def single_distances(space: FunctionalFamily, f: np.ndarray) -> dict[int, tuple[float, float]]:
    """``k -> (min_r ||f_k + r f||^*, minimizing r)``."""
    out = {}
    for k in range(space.m):
        d = span_distance(space, space.functionals[k], [f])
        out[k + 1] = (d.value, -float(d.coefficients[0]))
    return out


def pair_distances(space: FunctionalFamily, f: np.ndarray) -> dict[tuple[int, int], tuple[float, float, float]]:
    """``(k, l) -> (min_{a,r} ||f_k + a f_l + r f||^*, a, r)`` over ordered pairs."""
    F = space.functionals
    out = {}
    for k in range(space.m):
        for l in range(space.m):
            if k == l:
                continue
            d = span_distance(space, F[k], [F[l], f])
            out[(k + 1, l + 1)] = (d.value, -float(d.coefficients[0]), -float(d.coefficients[1]))
    return out


def classify_hyperplane(space: FunctionalFamily, hyperplane: Hyperplane, ledger) -> CaseLabel:
    """Assign NearSingle, NearPair or Generic using the ledger thresholds ``K`` and ``L``.

    The first matching case wins; a distance equal to its threshold counts as close.
    """
    f = np.asarray(hyperplane.f, dtype=float)
    singles = single_distances(space, f)
    pairs = pair_distances(space, f)
    K, L = ledger.K, ledger.L
    k_best = min(singles, key=lambda k: (singles[k][0], k))
    if LogScalar.of(singles[k_best][0]) <= K:
        d, r0 = singles[k_best]
        return CaseLabel(Case.NEAR_SINGLE, d, k=k_best, r0=r0, single_distances=singles, pair_distances=pairs)
    kl_best = min(pairs, key=lambda kl: (pairs[kl][0], kl))
    if LogScalar.of(pairs[kl_best][0]) <= L:
        d, a0, r0 = pairs[kl_best]
        return CaseLabel(
            Case.NEAR_PAIR, d, k=kl_best[0], l=kl_best[1], a0=a0, r0=r0,
            single_distances=singles, pair_distances=pairs,
        )
    return CaseLabel(
        Case.GENERIC, min(singles[k_best][0], pairs[kl_best][0]), single_distances=singles, pair_distances=pairs
    )


@dataclass
class PairCheck:
    i: int
    j: int
    threshold: float
    min_residual: float
    violated: bool


@dataclass
class ExclusivityReport:
    precondition_holds: bool
    precondition_margin_log10: float
    witness: tuple[int, int, float, float, float] | None
    near_pair_checks: list[PairCheck] = field(default_factory=list)
    alpha_half_checks: list[PairCheck] = field(default_factory=list)

    @property
    def violations(self) -> list[PairCheck]:
        return [c for c in self.near_pair_checks + self.alpha_half_checks if c.violated]


def _pair_floor(space, f, i, j, threshold, config) -> PairCheck:
    # The minimum over (a, r) is a convex problem solved exactly by the span
    # distance; a batched cloud of perturbed coefficients cross-checks it.
    F = space.functionals
    start = span_distance(space, F[i - 1], [F[j - 1], f])
    center = -np.asarray(start.coefficients, dtype=float)
    rng = rng_for(config.seed, 2, i, j)
    cloud = center + rng.standard_normal((config.restarts * 32, 2)) * np.logspace(-6, 0, config.restarts * 32)[:, None]
    cloud = np.vstack([center, cloud])
    gs = F[i - 1] + cloud[:, :1] * F[j - 1] + cloud[:, 1:] * f
    sampled = float(np.min(dual_norm(space, gs)))
    floor = min(float(start.value), sampled)
    residual = floor - threshold
    return PairCheck(i, j, threshold, residual, residual < -1e-9)


def exclusivity_check(
    space: FunctionalFamily,
    hyperplane: Hyperplane,
    alpha: float,
    K,
    L,
    config: SearchConfig | None = None,
) -> ExclusivityReport:
    """Search for violations of the two "f cannot be near two things" inequalities.

    If some ``||f_k + a0 f_l + r0 f||^* <= L`` while ``||f_l + r f||^* >= K``
    for all r, every ``||f_i + a f_j + r f||^*`` with ``i, j != k`` must stay
    ``>= K alpha / 2`` (needs ``K alpha > 4 L``).  If the near-pair distance
    is even ``<= alpha/2``, pairs with ``i`` outside ``{j, k, l}`` and
    ``j != k`` must stay ``>= alpha/2``.
    """
    if not 0 < alpha <= 0.5:
        raise ValueError("alpha must lie in (0, 1/2]")
    config = config or SearchConfig(restarts=2, max_iters=200)
    K, L = LogScalar.of(K), LogScalar.of(L)
    a = LogScalar.of(alpha)
    pre = K * a > 4 * L
    margin = log10_ratio(K * a, 4 * L) if L > 0 else math.inf
    f = np.asarray(hyperplane.f, dtype=float)
    singles = single_distances(space, f)
    pairs = pair_distances(space, f)
    witness = None
    for (k, l), (d, a0, r0) in sorted(pairs.items(), key=lambda kv: (kv[1][0], kv[0])):
        if LogScalar.of(d) <= L and LogScalar.of(singles[l][0]) >= K:
            witness = (k, l, a0, r0, d)
            break
    report = ExclusivityReport(pre, margin, witness)
    if witness is None:
        return report
    k, l, _, _, d = witness
    m = space.m
    floor2 = float(K * a / 2)
    report.near_pair_checks = [
        _pair_floor(space, f, i, j, floor2, config)
        for i in range(1, m + 1)
        for j in range(1, m + 1)
        if i != j and k not in (i, j)
    ]
    if d <= alpha / 2:
        report.alpha_half_checks = [
            _pair_floor(space, f, i, j, alpha / 2, config)
            for i in range(1, m + 1)
            for j in range(1, m + 1)
            if i not in (j, k, l) and j != k
        ]
    return report
