"""Exact verification of the explicit family with m = n + 2.

Functionals: the n coordinates, their sum, and ``(x_1 + 2 x_2 + ... + n x_n)/n``,
with ``p = ceil((n + 2) / 2)``.  Everything here runs in ``Fraction``
arithmetic; a certificate is a list of records that each reduce to one
rational inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ..errors import CertificateFailure, HypothesisViolation
from ..numerics import rational
from ..space import FunctionalFamily


def corollary_rows(n: int) -> list[list[Fraction]]:
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rows.append([Fraction(1)] * n)
    rows.append([Fraction(j + 1, n) for j in range(n)])
    return rows


def corollary_exponent(n: int) -> int:
    return (n + 3) // 2


def build_corollary_space(n: int) -> FunctionalFamily:
    if n < 4:
        raise HypothesisViolation([f"n = {n} < 4: the construction needs n >= 4"])
    return FunctionalFamily.from_rows(corollary_rows(n), corollary_exponent(n))


def _unit(n: int, i: int) -> list[Fraction]:
    return [Fraction(int(j == i)) for j in range(1, n + 1)]


def _combo(n: int, terms: dict[int, Fraction]) -> list[Fraction]:
    v = [Fraction(0)] * n
    for idx, c in terms.items():
        v[idx - 1] += c
    return v


def _smallest_outside(n: int, excluded, count: int) -> list[int]:
    return [s for s in range(1, n + 1) if s not in excluded][:count]


def alpha_witness(n: int, i: int, jkl: tuple[int, int, int]) -> tuple[str, list[Fraction], Fraction]:
    """The witness ``v`` for one tuple, with the bullet name and its claimed distance.

    Free indices ``s``, ``s1 < s2`` are the smallest admissible ones.
    """
    a, b = n + 1, n + 2
    rest = set(jkl)
    big = rest & {a, b}
    small = rest - big
    half, quarter, low = Fraction(1, 2), Fraction(1, 4), Fraction(1, 2 * n)
    if i <= n:
        if not big:
            return "coordinates", _unit(n, i), half
        if big == {a}:
            (s,) = _smallest_outside(n, small | {i}, 1)
            return "coordinates+sum", _combo(n, {i: Fraction(1), s: Fraction(-1)}), quarter
        if big == {b}:
            (s,) = _smallest_outside(n, small | {i}, 1)
            return "coordinates+weighted", _combo(n, {i: Fraction(s), s: Fraction(-i)}), low
        s1, s2 = _smallest_outside(n, small | {i}, 2)
        d = Fraction(s2 - s1)
        v = _combo(n, {i: Fraction(1), s1: (i - s2) / d, s2: (s1 - i) / d})
        return "coordinates+sum+weighted", v, low
    if i == a:
        if not big:
            (s,) = _smallest_outside(n, small, 1)
            return "sum|coordinates", _unit(n, s), half
        s1, s2 = _smallest_outside(n, small, 2)
        return "sum|coordinates+weighted", _combo(n, {s1: Fraction(s2), s2: Fraction(-s1)}), low
    if not big:
        (s,) = _smallest_outside(n, small, 1)
        return "weighted|coordinates", _unit(n, s), low
    s1, s2 = _smallest_outside(n, small, 2)
    return "weighted|coordinates+sum", _combo(n, {s1: Fraction(1), s2: Fraction(-1)}), low


def corollary_witnesses(n: int) -> dict:
    """``{(i, (j, k, l)): v}`` for every tuple, usable by ``alpha_estimate``."""
    m = n + 2
    out = {}
    for jkl in combinations(range(1, m + 1), 3):
        for i in range(1, m + 1):
            if i not in jkl:
                out[(i, jkl)] = alpha_witness(n, i, jkl)[1]
    return out


def beta_identities(n: int, j: int, k: int) -> dict[int, dict[int, Fraction]]:
    """Coefficients writing ``f_j`` and ``f_k`` through the other ``n`` functionals (``j < k``)."""
    a, b = n + 1, n + 2
    if not 1 <= j < k <= b:
        raise ValueError(f"need 1 <= j < k <= {b}, got ({j}, {k})")
    coords = range(1, n + 1)
    if (j, k) == (a, b):
        return {
            a: {i: Fraction(1) for i in coords},
            b: {i: Fraction(i, n) for i in coords},
        }
    if k == b and j <= n:
        return {
            j: {a: Fraction(1), **{i: Fraction(-1) for i in coords if i != j}},
            b: {a: Fraction(j, n), **{i: Fraction(i - j, n) for i in coords if i != j}},
        }
    if k == a and j <= n:
        return {
            j: {b: Fraction(n, j), **{i: Fraction(-i, j) for i in coords if i != j}},
            a: {b: Fraction(n, j), **{i: -Fraction(i - j, j) for i in coords if i != j}},
        }
    # j < k <= n: solve x_j from the sum and the weighted sum
    def through(t: int, u: int) -> dict[int, Fraction]:
        d = Fraction(t - u)
        coeffs = {b: n / d, a: -u / d}
        coeffs.update({i: (u - i) / d for i in coords if i not in (t, u)})
        return coeffs

    return {j: through(j, k), k: through(k, j)}


@dataclass
class CorollaryCertificate:
    n: int
    m: int
    p: int
    alpha_bound: Fraction
    beta_bound: Fraction
    alpha_min_certified: Fraction
    beta_max_coefficient_sum: Fraction
    witness_log: list[dict] = field(default_factory=list)


def _pow_sum(values, e: int) -> Fraction:
    return sum((v**e for v in values), Fraction(0))


def corollary_exact_verify(n: int) -> CorollaryCertificate:
    """Certify ``alpha >= 1/(2n)`` and ``beta <= n^2`` in exact arithmetic.

    Every tuple's witness must satisfy ``(2n)^(2p) |f_i(v)|^(2p) >= ||v||^(2p)``
    and also the distance claimed by its bullet.  Every pair's identities
    must hold exactly, with absolute coefficient sums at most ``n^2``.
    """
    if n < 4:
        raise HypothesisViolation([f"n = {n} < 4: the construction needs n >= 4"])
    rows = corollary_rows(n)
    m, p = n + 2, corollary_exponent(n)
    e = 2 * p
    target = Fraction(1, 2 * n)
    log: list[dict] = []
    alpha_min = None
    for jkl in combinations(range(1, m + 1), 3):
        for i in range(1, m + 1):
            if i in jkl:
                continue
            bullet, v, claimed = alpha_witness(n, i, jkl)
            values = [rational.dot(r, v) for r in rows]
            for t in jkl:
                if values[t - 1] != 0:
                    raise CertificateFailure(bullet, (i, *jkl), values[t - 1])
            power = _pow_sum(values, e)
            top = values[i - 1] ** e
            residual = top / target**e - power
            if residual < 0:
                raise CertificateFailure(bullet, (i, *jkl), residual)
            claim_residual = top / claimed**e - power
            if claim_residual < 0:
                raise CertificateFailure(bullet + " (claimed distance)", (i, *jkl), claim_residual)
            # (|f_i(v)| / ||v||)^(2p), exactly
            ratio = top / power
            alpha_min = ratio if alpha_min is None else min(alpha_min, ratio)
            log.append({
                "kind": "alpha",
                "bullet": bullet,
                "indices": [i, *jkl],
                "witness": [rational.format_fraction(x) for x in v],
                "f_i": rational.format_fraction(values[i - 1]),
                "norm_power": rational.format_fraction(power),
                "claimed": rational.format_fraction(claimed),
                "residual": rational.format_fraction(residual),
            })
    beta_bound = Fraction(n * n)
    beta_max = Fraction(0)
    for j, k in combinations(range(1, m + 1), 2):
        for t, coeffs in beta_identities(n, j, k).items():
            if set(coeffs) & {j, k}:
                raise CertificateFailure("beta", (j, k), Fraction(0))
            combined = [sum((c * rows[i - 1][col] for i, c in coeffs.items()), Fraction(0)) for col in range(n)]
            diff = [x - y for x, y in zip(combined, rows[t - 1])]
            if any(diff):
                raise CertificateFailure("beta identity", (j, k, t), max(diff, key=abs))
            total = sum((abs(c) for c in coeffs.values()), Fraction(0))
            if total > beta_bound:
                raise CertificateFailure("beta coefficient sum", (j, k, t), beta_bound - total)
            beta_max = max(beta_max, total)
            log.append({
                "kind": "beta",
                "indices": [j, k],
                "target": t,
                "coefficients": {str(i): rational.format_fraction(c) for i, c in sorted(coeffs.items())},
                "abs_sum": rational.format_fraction(total),
            })
    return CorollaryCertificate(
        n=n,
        m=m,
        p=p,
        alpha_bound=target,
        beta_bound=beta_bound,
        alpha_min_certified=alpha_min,
        beta_max_coefficient_sum=beta_max,
        witness_log=log,
    )


def alpha_certified_distance(cert: CorollaryCertificate) -> float:
    """Float lower bound of the smallest certified ratio ``|f_i(v)| / ||v||``."""
    e = 2 * cert.p
    return math.nextafter(float(cert.alpha_min_certified) ** (1.0 / e), 0.0)
