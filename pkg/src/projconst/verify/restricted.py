"""The restriction of ``g`` to ``ker h`` versus the distance ``min_r ||g - r h||^*``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..optimize import SearchConfig, minimize_convex_lowdim, rng_for
from ..space import FunctionalFamily, dual_norm, restricted_dual_norm


@dataclass
class RestrictionReport:
    pairs: int
    max_gap: float
    min_slack: float

    @property
    def holds(self) -> bool:
        return self.min_slack >= -1e-7


def restriction_check(space: FunctionalFamily, pairs: int = 20, config: SearchConfig | None = None) -> RestrictionReport:
    """``||g|_{ker h}|| >= min_r ||g - r h||^* - 1e-7`` on random ``(g, h)``.

    The right side comes from a one-dimensional convex search, independent
    of the kernel computation on the left.
    """
    config = config or SearchConfig(restarts=1, max_iters=200, tol=1e-12)
    rng = rng_for(config.seed, 8)
    gap, slack = 0.0, np.inf
    for _ in range(pairs):
        g, h = rng.standard_normal((2, space.n))
        left = restricted_dual_norm(space, g, h)
        res = minimize_convex_lowdim(lambda r: dual_norm(space, g - r[0] * h), 1, config)
        slack = min(slack, left - res.value)
        gap = max(gap, abs(left - res.value))
    return RestrictionReport(pairs, gap, float(slack))
