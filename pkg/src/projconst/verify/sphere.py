"""Monte Carlo measure of slabs ``{x in S^(n-1) : |f(x)| <= t}``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from ..optimize import parallel_map, rng_for

CHUNK = 100_000


@dataclass(frozen=True)
class CapMeasureSample:
    t: float
    n: int
    estimate: float
    std_error: float
    samples: int

    @property
    def bound(self) -> float:
        return self.t * (self.n - 1)


def _count(args) -> int:
    n, t, size, seed, chunk = args
    X = rng_for(seed, 4, chunk).standard_normal((size, n))
    # rotation invariance: test against the first coordinate functional
    return int(np.count_nonzero(np.abs(X[:, 0]) <= t * np.linalg.norm(X, axis=1)))


def cap_measure_mc(n: int, t: float, samples: int = 1_000_000, seed: int = 0) -> CapMeasureSample:
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    if samples < 10_000:
        raise ValueError("use at least 10^4 samples")
    sizes = [CHUNK] * (samples // CHUNK) + ([samples % CHUNK] if samples % CHUNK else [])
    hits = sum(parallel_map(_count, [(n, t, s, seed, c) for c, s in enumerate(sizes)]))
    est = hits / samples
    err = max(math.sqrt(est * (1.0 - est) / samples), 1.0 / samples)
    return CapMeasureSample(t=t, n=n, estimate=est, std_error=err, samples=samples)


def slab_measure_exact(n: int, t: float) -> float:
    """Exact slab measure via the regularized incomplete beta function."""
    return float(betainc(0.5, (n - 1) / 2.0, t * t))
