"""Exact rational helpers on top of :class:`fractions.Fraction`."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

from ..errors import Singular


def to_fraction(value) -> Fraction:
    """Parse ``"a/b"`` strings, ints, decimal strings and floats exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                t = m[i][c] / m[r][c]
                m[i] = [x - t * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve a square rational system exactly; raises :class:`Singular`."""
    size = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    if any(len(row) != size + 1 for row in aug):
        raise ValueError("square system required")
    for c in range(size):
        piv = next((i for i in range(c, size) if aug[i][c] != 0), None)
        if piv is None:
            raise Singular("rational system is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(size):
            if i != c and aug[i][c] != 0:
                t = aug[i][c]
                aug[i] = [x - t * y for x, y in zip(aug[i], aug[c])]
    return [row[size] for row in aug]


def inverse(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    size = len(matrix)
    cols = [solve(matrix, [Fraction(int(i == j)) for i in range(size)]) for j in range(size)]
    return [[cols[j][i] for j in range(size)] for i in range(size)]


def format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
