"""Vandermonde matrices and Gautschi's bound on their inverse."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DuplicateNodes

DUPLICATE_TOL = 1e-14


def vandermonde_matrix(nodes: Sequence[float]) -> np.ndarray:
    """Square matrix whose i-th column is ``(1, x_i, x_i**2, ..., x_i**(m-1))``."""
    x = np.asarray(nodes, dtype=float).ravel()
    return np.vander(x, increasing=True).T


def vandermonde_inverse_norm_bound(nodes: Sequence[float]) -> float:
    """``max_i prod_{j != i} (1 + |x_j|) / |x_j - x_i|``.

    Upper bound for the max-row-sum norm of the inverse of
    :func:`vandermonde_matrix` (the rows of that inverse are the Lagrange
    basis coefficients).
    """
    x = np.asarray(nodes, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("at least one node required")
    diff = np.abs(x[None, :] - x[:, None])
    np.fill_diagonal(diff, np.inf)
    if diff.min() <= DUPLICATE_TOL:
        i, j = np.unravel_index(np.argmin(diff), diff.shape)
        raise DuplicateNodes(f"nodes {i} and {j} coincide ({x[i]!r})")
    ratio = (1.0 + np.abs(x))[None, :] / diff
    np.fill_diagonal(ratio, 1.0)
    return float(np.prod(ratio, axis=1).max())
