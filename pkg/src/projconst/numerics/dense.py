"""Small dense helpers: overflow-safe power sums, kernels, inverse norms."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import Singular, ZeroFunctional

SINGULAR_RTOL = 1e-13


def _check_exponent(exponent: int) -> None:
    if int(exponent) != exponent or exponent < 2 or exponent % 2:
        raise ValueError(f"exponent must be an even integer >= 2, got {exponent!r}")


def stable_power_sum(values: Sequence[float], exponent: int) -> float:
    """Return ``(sum |v_i|**exponent) ** (1/exponent)`` without overflow.

    The largest magnitude is factored out first, so ``[1e200, 1e200]`` with
    exponent 6 gives ``2**(1/6) * 1e200`` instead of ``inf``.
    """
    _check_exponent(exponent)
    a = np.abs(np.asarray(values, dtype=float).ravel())
    if a.size == 0:
        raise ValueError("at least one value required")
    big = a.max()
    if big == 0.0:
        return 0.0
    return float(big * np.sum((a / big) ** exponent) ** (1.0 / exponent))


def power_norm_rows(values: np.ndarray, exponent: int) -> np.ndarray:
    """Row-wise version of :func:`stable_power_sum` for a ``(k, m)`` array."""
    a = np.abs(np.atleast_2d(np.asarray(values, dtype=float)))
    big = a.max(axis=1)
    safe = np.where(big > 0.0, big, 1.0)
    scaled = a / safe[:, None]
    return np.where(big > 0.0, big * np.sum(scaled**exponent, axis=1) ** (1.0 / exponent), 0.0)


def null_space_basis(f: Sequence[float]) -> np.ndarray:
    """Orthonormal basis of ``{x : <f, x> = 0}`` as the columns of an n x (n-1) array.

    Built from a Householder reflection that maps ``f/|f|`` to a signed
    coordinate vector, so coordinate functionals give coordinate bases.
    """
    f = np.asarray(f, dtype=float).ravel()
    norm = np.linalg.norm(f)
    if norm == 0.0 or not np.isfinite(norm):
        raise ZeroFunctional("functional is zero")
    u = f / norm
    k = int(np.argmax(np.abs(u)))
    target = np.zeros_like(u)
    target[k] = np.sign(u[k])
    v = u - target
    vv = v @ v
    H = np.eye(u.size)
    if vv > 0.0:
        H -= 2.0 * np.outer(v, v) / vv
    return np.delete(H, k, axis=1)


def kernel_basis(rows: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (columns) of the common kernel of the given rows."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = rows.shape[1]
    if rows.shape[0] == 1 and np.any(rows):
        return null_space_basis(rows[0])
    _, s, vt = np.linalg.svd(rows)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * scale)) if scale > 0 else 0
    return vt[rank:].T.copy() if rank < n else np.zeros((n, 0))


def exact_inf_norm_inverse(matrix: np.ndarray) -> float:
    """Max-absolute-row-sum norm of ``matrix**-1`` via Gauss-Jordan with full pivoting."""
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    size = a.shape[0]
    if size > 12:
        raise ValueError("size limited to 12")
    scale = np.abs(a).max()
    if scale == 0.0:
        raise Singular("zero matrix")
    aug = np.hstack([a, np.eye(size)])
    col_perm = np.arange(size)
    for k in range(size):
        block = np.abs(aug[k:, k:size])
        r, c = np.unravel_index(np.argmax(block), block.shape)
        r += k
        c += k
        if aug[r, c] < SINGULAR_RTOL * scale and -aug[r, c] < SINGULAR_RTOL * scale:
            raise Singular(f"pivot {aug[r, c]:.3e} below threshold at step {k}")
        aug[[k, r]] = aug[[r, k]]
        aug[:, [k, c]] = aug[:, [c, k]]
        col_perm[[k, c]] = col_perm[[c, k]]
        aug[k] /= aug[k, k]
        for i in range(size):
            if i != k and aug[i, k] != 0.0:
                aug[i] -= aug[i, k] * aug[k]
    # column swaps on A permute the rows of the inverse
    inv = np.empty((size, size))
    inv[col_perm] = aug[:, size:]
    return float(np.abs(inv).sum(axis=1).max())
