"""Log-space evaluation of the constants in the hyperplane projection bound.

The chain is ``eps1 -> R1 -> K -> eps2 -> R2 -> L -> eps3 -> R3`` followed
by the headline ``eps0``; the explicit dimension-only bound
``(2 (n+3)^2)^(-100 (n+3)^2)`` is :func:`corollary_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisViolation
from .numerics import LogScalar, log10_ratio


@dataclass(frozen=True)
class EpsilonLedger:
    n: int
    m: int
    p: int
    alpha: LogScalar
    beta: LogScalar
    q: float
    eps1: LogScalar
    R1: LogScalar
    K: LogScalar
    eps2: LogScalar
    R2: LogScalar
    L: LogScalar
    eps3: LogScalar
    R3: LogScalar
    eps0: LogScalar

    ENTRIES = ("eps1", "R1", "K", "eps2", "R2", "L", "eps3", "R3", "eps0")

    def entries(self) -> dict[str, LogScalar]:
        return {name: getattr(self, name) for name in self.ENTRIES}


@dataclass(frozen=True)
class Verdict:
    name: str
    holds: bool
    margin_log10: float
    detail: str = ""


def check_hypotheses(n: int, m: int, p: int, alpha, beta) -> None:
    a, b = LogScalar.of(alpha), LogScalar.of(beta)
    failures = []
    if n < 4:
        failures.append(f"n >= 4 required (n = {n})")
    if m < n + 2:
        failures.append(f"m >= n + 2 required (m = {m}, n = {n})")
    if 2 * p < m:
        failures.append(f"p >= m/2 required (p = {p}, m = {m})")
    if not (a > 0 and a <= Fraction(1, 2)):
        failures.append(f"0 < alpha <= 1/2 required (alpha = {a!r})")
    if not b > 0:
        failures.append(f"beta > 0 required (beta = {b!r})")
    if failures:
        raise HypothesisViolation(failures)


def _common_tail(n: int, m: int, p: int) -> LogScalar:
    # n^-(6p+6m) m^-(4p+6m) p^-(2m+1), shared by eps1, eps2, eps3
    return LogScalar.of(n) ** -(6 * p + 6 * m) * LogScalar.of(m) ** -(4 * p + 6 * m) * LogScalar.of(p) ** -(2 * m + 1)


def compute_ledger(n: int, m: int, p: int, alpha, beta) -> EpsilonLedger:
    """Evaluate every constant for the inputs ``(n, m, p, alpha, beta)``."""
    check_hypotheses(n, m, p, alpha, beta)
    a, b = LogScalar.of(alpha), LogScalar.of(beta)
    two = LogScalar.of(2)
    b2p = b ** (2 * p)
    tail = _common_tail(n, m, p)
    shared = a ** (4 * p + 4 * m) * two ** -(8 * p + 4 * m + 6) * tail

    eps1 = (LogScalar.of(m - 1) + b2p) ** (-1.0 / p) * shared
    R1 = 8 * (eps1 * p).sqrt()
    K = (R1 / 4) ** (1.0 / (2 * p - 1))
    eps2 = K ** (2 * m) * (LogScalar.of(m - 2) + 2 * b2p) ** (-1.0 / p) * shared
    R2 = 8 * (eps2 * p).sqrt()
    L = R2 / (two ** (2 * p) * (2 * p - 1))
    eps3 = (
        LogScalar.of(m) ** (-1.0 / p)
        * L ** (2 * m)
        * K ** (4 * p + 2 * m)
        * two ** -(4 * p + 6)
        * tail
    )
    R3 = 8 * (eps3 * p).sqrt()
    inner = a ** -6 * two**14 * LogScalar.of(n) ** 12 * LogScalar.of(m) ** 11 * LogScalar.of(p) ** 4
    eps0 = (LogScalar.of(m) + 2 * b2p) ** -7 * inner ** (-12 * p * m)
    return EpsilonLedger(
        n=n, m=m, p=p, alpha=a, beta=b, q=2 * p / (2 * p - 1),
        eps1=eps1, R1=R1, K=K, eps2=eps2, R2=R2, L=L, eps3=eps3, R3=R3, eps0=eps0,
    )


def corollary_bound(n: int) -> LogScalar:
    """``(2 (n+3)^2)^(-100 (n+3)^2)`` as a LogScalar."""
    if n < 4:
        raise HypothesisViolation([f"n >= 4 required (n = {n})"])
    s = (n + 3) ** 2
    return LogScalar.from_log(-100 * s * math.log(2 * s))


def corollary_inputs(n: int) -> tuple[int, int, int, Fraction, int]:
    """``(n, m, p, alpha, beta)`` certified for the explicit family in dimension ``n``."""
    m = n + 2
    return n, m, -(-m // 2), Fraction(1, 2 * n), n * n


def threshold_t0(eps, p: int) -> LogScalar:
    """``t0 = 4 sqrt(eps p / (2 + 2 eps))``, the modulus argument used for a projection of norm ``1 + eps``."""
    e = LogScalar.of(eps)
    return 4 * (e * p / (2 + 2 * e)).sqrt()


def ledger_checks(ledger: EpsilonLedger) -> list[Verdict]:
    """Verdicts (with log10 margins) for the relations the case analysis relies on."""
    K, L, a = ledger.K, ledger.L, ledger.alpha
    half = LogScalar.of(Fraction(1, 2))
    t0 = threshold_t0(ledger.eps1, ledger.p)
    two = LogScalar.of(2)
    order_margin = min(log10_ratio(K, L), log10_ratio(half, K)) if L > 0 else -math.inf
    return [
        Verdict("eps3 >= eps0", ledger.eps3 >= ledger.eps0, log10_ratio(ledger.eps3, ledger.eps0)),
        Verdict("0 < L < K < 1/2", bool(L > 0 and L < K and K < half), order_margin),
        Verdict("K*alpha > 4*L", K * a > 4 * L, log10_ratio(K * a, 4 * L)),
        Verdict("t0 <= 2", t0 <= two, log10_ratio(two, t0), detail=f"t0 {t0.approx()} at eps = eps1"),
    ]
