"""Signed numbers stored as natural-log magnitudes.

The constants in the projection bound live far below the double range
(``1e-5955`` and smaller), so they are carried as ``sign * exp(log)``.
Products and powers are exact up to float rounding of the logarithm;
sums use log-sum-exp.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Real

LN10 = math.log(10.0)
CANCELLATION_LIMIT = 1e-10


class PrecisionLossWarning(RuntimeWarning):
    """Raised as a warning when a subtraction cancels more than ten digits."""


@total_ordering
@dataclass(frozen=True)
class LogScalar:
    sign: int
    log: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "log", -math.inf)
        elif not math.isfinite(self.log):
            raise ValueError("nonzero LogScalar needs a finite log magnitude")

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0)

    @classmethod
    def from_log(cls, log: float, sign: int = 1) -> "LogScalar":
        return cls(sign, float(log))

    @classmethod
    def from_log10(cls, log10: float, sign: int = 1) -> "LogScalar":
        return cls(sign, float(log10) * LN10)

    @classmethod
    def of(cls, value) -> "LogScalar":
        """Convert ints (any size), Fractions, floats or LogScalars."""
        if isinstance(value, LogScalar):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not numbers here")
        if isinstance(value, int):
            if value == 0:
                return cls(0)
            return cls(1 if value > 0 else -1, math.log(abs(value)))
        if isinstance(value, Fraction):
            if value == 0:
                return cls(0)
            return cls(1 if value > 0 else -1, math.log(abs(value.numerator)) - math.log(value.denominator))
        if isinstance(value, Real):
            x = float(value)
            if math.isnan(x) or math.isinf(x):
                raise ValueError(f"cannot represent {x!r}")
            if x == 0.0:
                return cls(0)
            return cls(1 if x > 0 else -1, math.log(abs(x)))
        raise TypeError(f"cannot convert {type(value).__name__} to LogScalar")

    # views --------------------------------------------------------------
    @property
    def log10(self) -> float:
        return self.log / LN10

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log)
        except OverflowError:
            return self.sign * math.inf

    def __bool__(self) -> bool:
        return self.sign != 0

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScalar(0)"
        return f"LogScalar({'-' if self.sign < 0 else ''}10^{self.log10:.6f})"

    def approx(self) -> str:
        if self.sign == 0:
            return "0"
        return f"{'-' if self.sign < 0 else ''}≈ 10^{self.log10:.6f}"

    # arithmetic ---------------------------------------------------------
    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log)

    def __abs__(self) -> "LogScalar":
        return LogScalar(abs(self.sign), self.log)

    def __mul__(self, other) -> "LogScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if self.sign == 0 or o.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * o.sign, self.log + o.log)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * o.sign, self.log - o.log)

    def __rtruediv__(self, other) -> "LogScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, exponent) -> "LogScalar":
        if isinstance(exponent, Fraction):
            e = float(exponent)
            integral = exponent.denominator == 1
        else:
            e = float(exponent)
            integral = float(e).is_integer()
        if self.sign == 0:
            if e > 0:
                return LogScalar(0)
            raise ZeroDivisionError("zero to a non-positive power")
        if self.sign < 0 and not integral:
            raise ValueError("negative base with non-integer exponent")
        sign = -1 if (self.sign < 0 and int(e) % 2) else 1
        return LogScalar(sign, self.log * e)

    def sqrt(self) -> "LogScalar":
        return self ** 0.5

    def __add__(self, other) -> "LogScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if self.sign == 0:
            return o
        if o.sign == 0:
            return self
        hi, lo = (self, o) if self.log >= o.log else (o, self)
        ratio = math.exp(lo.log - hi.log)
        if hi.sign == lo.sign:
            return LogScalar(hi.sign, hi.log + math.log1p(ratio))
        if ratio == 1.0:
            return LogScalar(0)
        remaining = 1.0 - ratio
        if remaining < CANCELLATION_LIMIT:
            warnings.warn(
                f"LogScalar subtraction keeps only {remaining:.1e} of the operand magnitude",
                PrecisionLossWarning,
                stacklevel=2,
            )
        return LogScalar(hi.sign, hi.log + math.log1p(-ratio))

    __radd__ = __add__

    def __sub__(self, other) -> "LogScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other) -> "LogScalar":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    # ordering -----------------------------------------------------------
    def _key(self):
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log)

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self._key() == o._key()

    def __lt__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self._key() < o._key()

    def __hash__(self):
        return hash(self._key())


def _coerce(value):
    try:
        return LogScalar.of(value)
    except TypeError:
        return NotImplemented


def log10_ratio(a: LogScalar, b: LogScalar) -> float:
    """``log10(a / b)`` for positive a, b; the margin of the verdict ``a >= b``."""
    if a.sign <= 0 or b.sign <= 0:
        raise ValueError("margins are defined for positive quantities")
    return (a.log - b.log) / LN10
