"""Seeded multi-start search primitives.

All objectives handed to :func:`maximize_on_sphere` are *batched*: they take
a ``(k, d)`` array of points and return ``k`` values (gradients return
``(k, d)``).  Restarts run side by side in one array, which keeps the search
deterministic and fast for the small dimensions used here.

Results of maximization are lower bounds of the true maximum and
falsification results mean "no counterexample found", nothing stronger.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import NonFiniteObjective

BatchFn = Callable[[np.ndarray], np.ndarray]


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    ITER_LIMIT = "IterLimit"


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    restarts: int = 64
    max_iters: int = 500
    tol: float = 1e-10

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def with_seed(self, seed: int) -> "SearchConfig":
        return replace(self, seed=seed)

    def doubled(self) -> "SearchConfig":
        return replace(self, restarts=2 * self.restarts, max_iters=2 * self.max_iters)


@dataclass
class SearchResult:
    point: np.ndarray
    value: float
    status: Status
    evaluations: int
    # end points and values of every restart, best first
    candidates: np.ndarray | None = field(default=None, repr=False)
    candidate_values: np.ndarray | None = field(default=None, repr=False)


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator; ``stream`` selects an independent substream."""
    seq = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(seq))


def random_sphere_points(rng: np.random.Generator, count: int, dimension: int) -> np.ndarray:
    x = rng.standard_normal((count, dimension))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def thread_limit() -> int:
    """Worker cap from ``PROJCONST_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("PROJCONST_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: Iterable) -> list:
    """Ordered map; uses up to ``PROJCONST_THREADS`` threads."""
    items = list(items)
    workers = min(thread_limit(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def check_gradient(objective: BatchFn, gradient: BatchFn, points: np.ndarray, step: float = 1e-6) -> float:
    """Largest relative gap between ``gradient`` and central differences."""
    points = np.atleast_2d(points)
    g = gradient(points)
    fd = np.empty_like(g)
    for a in range(points.shape[1]):
        e = np.zeros(points.shape[1])
        e[a] = step
        fd[:, a] = (objective(points + e) - objective(points - e)) / (2 * step)
    scale = np.maximum(np.linalg.norm(fd, axis=1), 1e-12)
    return float(np.max(np.linalg.norm(g - fd, axis=1) / scale))


def _evaluate(objective: BatchFn, points: np.ndarray) -> np.ndarray:
    values = np.asarray(objective(points), dtype=float).reshape(points.shape[0])
    if not np.all(np.isfinite(values)):
        raise NonFiniteObjective("objective returned a non-finite value")
    return values


def maximize_on_sphere(
    objective: BatchFn,
    gradient: BatchFn,
    dimension: int,
    config: SearchConfig = SearchConfig(),
    *,
    starts: np.ndarray | None = None,
    debug: bool = False,
) -> SearchResult:
    """Multi-start projected gradient ascent on the Euclidean unit sphere.

    Each restart takes a step along the tangential gradient, renormalizes and
    keeps the move only if the value went up; the step grows after a success
    and shrinks after a failure.  Extra ``starts`` are prepended to the
    random ones.  Ties between restarts go to the lexicographically smallest
    point.
    """
    rng = rng_for(config.seed)
    x = random_sphere_points(rng, config.restarts, dimension)
    if starts is not None:
        s = np.atleast_2d(np.asarray(starts, dtype=float))
        s = s / np.linalg.norm(s, axis=1, keepdims=True)
        x = np.vstack([s, x])
    if debug:
        gap = check_gradient(objective, gradient, x[: min(10, len(x))])
        if gap > 1e-4:
            raise AssertionError(f"gradient disagrees with finite differences ({gap:.2e})")

    k = x.shape[0]
    values = _evaluate(objective, x)
    evaluations = k
    step = np.full(k, np.nan)
    done = np.zeros(k, dtype=bool)
    grad_tol = 1e-3 * np.sqrt(config.tol)

    for _ in range(config.max_iters):
        active = ~done
        if not active.any():
            break
        xa = x[active]
        g = np.asarray(gradient(xa), dtype=float)
        tangent = g - np.sum(g * xa, axis=1, keepdims=True) * xa
        tnorm = np.linalg.norm(tangent, axis=1)
        sa = step[active]
        sa = np.where(np.isnan(sa), 0.1 / np.maximum(tnorm, 1e-300), sa)
        small = tnorm <= grad_tol * (1.0 + np.abs(values[active]))
        move = np.minimum(sa * tnorm, 0.5)
        stalled = move <= 1e-3 * config.tol
        trial = xa + (move / np.maximum(tnorm, 1e-300))[:, None] * tangent
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        trial_values = _evaluate(objective, trial)
        evaluations += trial.shape[0]
        better = trial_values > values[active]
        idx = np.flatnonzero(active)
        x[idx[better]] = trial[better]
        values[idx[better]] = trial_values[better]
        sa = np.where(better, sa * 2.0, sa * 0.25)
        step[active] = sa
        done[idx[(small | stalled) & ~better]] = True

    best = values.max()
    tied = np.flatnonzero(values == best)
    if tied.size > 1:
        order = np.lexsort(x[tied].T[::-1])
        best_idx = int(tied[order[0]])
    else:
        best_idx = int(tied[0])
    point = x[best_idx].copy()
    value = float(_evaluate(objective, point[None, :])[0])
    order = np.argsort(-values, kind="stable")
    return SearchResult(
        point=point,
        value=value,
        status=Status.CONVERGED if done[best_idx] else Status.ITER_LIMIT,
        evaluations=evaluations + 1,
        candidates=x[order],
        candidate_values=values[order],
    )


def minimize_convex_lowdim(
    objective: Callable[[np.ndarray], float],
    dimension: int,
    config: SearchConfig = SearchConfig(),
    *,
    radius: float = 4.0,
    grid: int | None = None,
) -> SearchResult:
    """Minimize a convex, coercive function of at most four variables.

    A coarse grid on ``[-radius, radius]**d`` picks the start, then Powell's
    conjugate-direction method runs to ``config.tol``.  Plain coordinate
    descent stalls in the narrow valleys that dual-norm distances produce.
    """
    if not 1 <= dimension <= 4:
        raise ValueError("dimension must be between 1 and 4")
    if grid is None:
        grid = {1: 41, 2: 15, 3: 7, 4: 5}[dimension]
    fun = lambda z: float(objective(np.asarray(z, dtype=float)))  # noqa: E731
    axes = np.linspace(-radius, radius, grid)
    mesh = np.stack(np.meshgrid(*([axes] * dimension), indexing="ij"), axis=-1).reshape(-1, dimension)
    vals = np.array([fun(z) for z in mesh])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteObjective("objective returned a non-finite value")
    x0 = mesh[int(np.argmin(vals))]
    res = minimize(
        fun,
        x0,
        method="Powell",
        options={"xtol": config.tol, "ftol": config.tol * 1e-3, "maxiter": config.max_iters},
    )
    if not np.isfinite(res.fun):
        raise NonFiniteObjective("objective returned a non-finite value")
    x = np.atleast_1d(np.asarray(res.x, dtype=float))
    status = Status.CONVERGED if res.success else Status.ITER_LIMIT
    return SearchResult(point=x, value=fun(x), status=status, evaluations=len(mesh) + int(res.nfev) + 1)


@dataclass(frozen=True)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def cube(cls, dimension: int, low: float, high: float) -> "Box":
        return cls(np.full(dimension, float(low)), np.full(dimension, float(high)))

    @classmethod
    def around(cls, center: Sequence[float], half_width: float) -> "Box":
        c = np.asarray(center, dtype=float)
        return cls(c - half_width, c + half_width)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.lower + (self.upper - self.lower) * rng.random((count, self.dimension))


@dataclass
class Falsification:
    counterexample: np.ndarray | None
    min_residual: float
    point: np.ndarray
    evaluations: int

    @property
    def violated(self) -> bool:
        return self.counterexample is not None


def falsify_inequality(
    residual: Callable[[np.ndarray], float],
    sample_space: Box,
    config: SearchConfig = SearchConfig(),
    *,
    starts: Sequence[Sequence[float]] = (),
    margin: float | None = None,
) -> Falsification:
    """Hunt for a point where ``residual < -margin`` (default margin ``config.tol``).

    Multi-start bounded Nelder-Mead on the residual.  Returning no
    counterexample only means none was found.
    """
    margin = config.tol if margin is None else margin
    rng = rng_for(config.seed, 1)
    points = [np.clip(np.asarray(s, dtype=float), sample_space.lower, sample_space.upper) for s in starts]
    points.extend(sample_space.sample(rng, config.restarts))
    bounds = list(zip(sample_space.lower, sample_space.upper))
    best_x, best_f, evaluations = None, np.inf, 0
    for x0 in points:
        res = minimize(
            lambda z: float(residual(z)),
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": config.max_iters * sample_space.dimension},
        )
        evaluations += int(res.nfev)
        if not np.isfinite(res.fun):
            raise NonFiniteObjective("residual returned a non-finite value")
        if res.fun < best_f:
            best_x, best_f = np.asarray(res.x, dtype=float), float(res.fun)
        if best_f < -margin:
            break
    return Falsification(
        counterexample=best_x if best_f < -margin else None,
        min_residual=best_f,
        point=best_x,
        evaluations=evaluations,
    )
