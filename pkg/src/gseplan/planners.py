"""
GSE, GSE* and a PRM* baseline.

All planners share the same loop structure: draw a free sample, grow the
roadmap, record the best init-goal cost.  One planner object owns one run; it
is not meant to be shared between threads.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

from .geometry import (
    Environment,
    GeometryError,
    PointInObstacleError,
    as_point,
    ball_volume,
    sample_free,
    segments_collision_free,
)
from .roadmap import Roadmap
from .shape import (
    GeneralizedShape,
    build_shape,
    connect_mask,
    contains,
    contains_many,
    free_length_along,
)

CSV_HEADER = "# gse-bench v1"
STEER_BACKOFF = 1e-9


class ConfigError(ValueError):
    pass


class PlannerError(RuntimeError):
    pass


class Resample(Exception):
    """Raised when a sample cannot produce a vertex; the iteration is spent."""


def format_float(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def connection_radius(vertex_count: int, d: int, gamma: float, eta: float) -> float:
    """min(gamma * (ln n / n)^(1/d), eta)."""
    if vertex_count < 2:
        raise ValueError("connection radius needs at least two vertices")
    n = vertex_count
    return min(gamma * (math.log(n) / n) ** (1.0 / d), eta)


def gamma_lower_bound(d: int, mu_free: float, rho: float, phi: float) -> float:
    """Smallest admissible GSE* radius constant for the given workspace."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if not phi > 0:
        raise ValueError("phi must be positive")
    h = (1 + phi) / (2 + phi) ** 2
    return h * ((1 + 1 / d) * (mu_free / (1 - rho))) ** (1 / d)


def prm_star_gamma(d: int, mu_free: float, margin: float = 1.1) -> float:
    return margin * 2 * (1 + 1 / d) ** (1 / d) * (mu_free / ball_volume(d, 1.0)) ** (1 / d)


@dataclass(frozen=True)
class PlannerConfig:
    iterations: int = 500
    seed: int = 0
    eta: Optional[float] = None
    phi: float = 1.0
    rho: float = 0.5
    gamma_override: Optional[float] = None
    collision_step: Optional[float] = None

    def resolve(self, env: Environment) -> "PlannerConfig":
        """Fill environment-dependent defaults and check the gamma condition."""
        if self.iterations < 0:
            raise ConfigError("iterations must be non-negative")
        if not 0 < self.rho < 1:
            raise ConfigError("rho must lie in (0, 1)")
        if not self.phi > 0:
            raise ConfigError("phi must be positive")
        eta = self.eta if self.eta is not None else 0.25 * env.diagonal
        if not eta > 0:
            raise ConfigError("eta must be positive")
        bound = gamma_lower_bound(env.dim, env.free_measure, self.rho, self.phi)
        gamma = self.gamma_override if self.gamma_override is not None else 1.1 * bound
        if not gamma > bound:
            raise ConfigError(f"gamma {gamma} does not exceed the lower bound {bound}")
        step = self.collision_step if self.collision_step is not None else 1e-3 * env.diagonal
        return replace(self, eta=eta, gamma_override=gamma, collision_step=step)

    @property
    def gamma(self) -> float:
        return self.gamma_override


@dataclass
class RunTrace:
    iterations: list = field(default_factory=list)
    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    best_cost: list = field(default_factory=list)
    wall_time: float = 0.0

    def record(self, it: int, rm: Roadmap):
        self.iterations.append(it)
        self.vertices.append(rm.n)
        self.edges.append(rm.edge_count)
        self.best_cost.append(rm.best_cost)

    @property
    def final_cost(self) -> float:
        return self.best_cost[-1] if self.best_cost else math.inf

    def first_found(self) -> Optional[int]:
        for it, c in zip(self.iterations, self.best_cost):
            if math.isfinite(c):
                return it
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        buf.write("iteration,vertices,edges,best_cost\n")
        for row in zip(self.iterations, self.vertices, self.edges, self.best_cost):
            buf.write(f"{row[0]},{row[1]},{row[2]},{format_float(row[3])}\n")
        return buf.getvalue()


def steer_gse(nearest_shape: GeneralizedShape, X_rand) -> np.ndarray:
    """Pull X_rand back onto the boundary of the nearest vertex's shape."""
    X_rand = np.asarray(X_rand, dtype=float)
    if contains(nearest_shape, X_rand):
        return X_rand.copy()
    v = X_rand - nearest_shape.center
    dist = float(np.linalg.norm(v))
    u = v / dist
    t = min(free_length_along(nearest_shape, u), dist)
    if not t > 0:
        raise Resample("sample direction is blocked at the shape center")
    return nearest_shape.center + t * u


def steer(X, Y, eta: float, env: Environment):
    """Closest point to Y on the segment [X, Y] within distance eta of X that
    is reachable from X without touching an obstacle.

    Returns ``(point, progressed)``; ``progressed`` is False when no free
    point beyond X exists, in which case X itself is returned.
    """
    X = as_point(X)
    Y = as_point(Y)
    v = Y - X
    dist = float(np.linalg.norm(v))
    if dist == 0.0:
        return X.copy(), False
    u = v / dist
    reach = min(eta, dist)
    hit = env.first_hit(X, u)
    if hit <= reach:
        reach = hit - STEER_BACKOFF * env.diagonal
    if reach <= 0:
        return X.copy(), False
    z = Y.copy() if reach == dist else X + reach * u
    return z, True


class _ShapeStore:
    """Stacked shape parameters mirroring the roadmap vertices."""

    def __init__(self, m: int, d: int, capacity: int = 256):
        self.centers = np.empty((capacity, d))
        self.axes = np.empty((capacity, m, d))
        self.r_mag = np.empty((capacity, m))
        self.theta = np.empty((capacity, m))
        self.n = 0

    def append(self, shape: GeneralizedShape):
        if self.n == self.centers.shape[0]:
            for name in ("centers", "axes", "r_mag", "theta"):
                arr = getattr(self, name)
                grown = np.empty((2 * arr.shape[0],) + arr.shape[1:])
                grown[: self.n] = arr[: self.n]
                setattr(self, name, grown)
        k = self.n
        self.centers[k] = shape.center
        self.axes[k] = shape.axes
        self.r_mag[k] = shape.r_mag
        self.theta[k] = shape.theta
        self.n += 1

    def connect(self, shape: GeneralizedShape) -> np.ndarray:
        n = self.n
        return connect_mask(shape, self.centers[:n], self.axes[:n], self.r_mag[:n], self.theta[:n])


class GSEPlanner:
    """Generalized shape expansion.

    ``samples`` optionally supplies the X_rand stream (a shared sample tape);
    otherwise samples are drawn from ``sample_free`` with the config seed.
    """

    name = "gse"

    def __init__(self, env: Environment, init, goal, config: PlannerConfig = PlannerConfig(),
                 samples: Optional[Iterator] = None):
        self.env = env
        self.config = config.resolve(env)
        self.rng = np.random.default_rng(self.config.seed)
        self._samples = samples
        self.roadmap = Roadmap(env.dim, env.lo, env.hi)
        self.store = _ShapeStore(len(env.obstacles), env.dim)
        self.core = []  # vertices produced by the shape-expansion step
        self.trace = RunTrace()
        self.iteration = 0
        self.listeners = []
        for X in (init, goal):
            X = as_point(X)
            if not env.is_free(X):
                raise ConfigError(f"start/goal {X} is not in free space")
            self._add(X, build_shape(env, X), core=True)

    def _add(self, X, shape, core: bool) -> int:
        idx = self.roadmap.add_vertex(X, shape)
        self.store.append(shape)
        if core:
            self.core.append(idx)
        return idx

    def draw(self) -> np.ndarray:
        if self._samples is not None:
            return np.asarray(next(self._samples), dtype=float)
        return sample_free(self.env, self.rng)

    def _expand(self, X_rand):
        """Shape-expansion step: returns the new vertex id (or raises Resample)."""
        rm = self.roadmap
        nearest = rm.nearest(X_rand, among=np.asarray(self.core))
        X_new = steer_gse(rm.shapes[nearest], X_rand)
        try:
            shape = build_shape(self.env, X_new)
        except (PointInObstacleError, GeometryError):
            raise Resample("steered point is not free") from None
        mask = self.store.connect(shape)
        idx = self._add(X_new, shape, core=True)
        rm.connect(idx, np.flatnonzero(mask))
        return nearest, idx

    def step(self) -> list:
        """One iteration; returns the ids of vertices added."""
        self.iteration += 1
        X_rand = self.draw()
        try:
            added = self._iterate(X_rand)
        except Resample:
            added = []
        for cb in self.listeners:
            for idx in added:
                cb(self, idx)
        self.trace.record(self.iteration, self.roadmap)
        return added

    def _iterate(self, X_rand) -> list:
        _, idx = self._expand(X_rand)
        return [idx]

    def run(self, iterations: Optional[int] = None) -> RunTrace:
        n = self.config.iterations if iterations is None else iterations
        t0 = time.perf_counter()
        for _ in range(n):
            self.step()
        self.trace.wall_time += time.perf_counter() - t0
        return self.trace

    def best_path(self):
        return self.roadmap.min_path()


class GSEStarPlanner(GSEPlanner):
    """GSE plus a steered vertex per iteration wired to neighbours within a
    shrinking radius."""

    name = "gse-star"

    def _iterate(self, X_rand) -> list:
        rm, cfg = self.roadmap, self.config
        nearest, idx_g = self._expand(X_rand)
        added = [idx_g]
        X_new, progressed = steer(rm.points[nearest], X_rand, cfg.eta, self.env)
        if not progressed:
            return added
        if np.array_equal(X_new, rm.points[idx_g]):
            idx = idx_g
            shape = rm.shapes[idx_g]
        else:
            try:
                shape = build_shape(self.env, X_new)
            except (PointInObstacleError, GeometryError):
                return added
            idx = self._add(X_new, shape, core=False)
            added.append(idx)
        r = connection_radius(rm.n, self.env.dim, cfg.gamma, cfg.eta)
        cand = [u for u in rm.near(X_new, r) if u != idx]
        if cand:
            ok = contains_many(shape, rm.points[cand])
            rm.connect(idx, [u for u, good in zip(cand, ok) if good])
        return added


class PRMStarPlanner:
    """Incremental PRM* with dense-sampling collision checks on edges."""

    name = "prm-star"

    def __init__(self, env: Environment, init, goal, config: PlannerConfig = PlannerConfig()):
        self.env = env
        self.config = config.resolve(env)
        self.rng = np.random.default_rng(self.config.seed)
        self.gamma = prm_star_gamma(env.dim, env.free_measure)
        self.roadmap = Roadmap(env.dim, env.lo, env.hi)
        self.trace = RunTrace()
        self.iteration = 0
        for X in (init, goal):
            X = as_point(X)
            if not env.is_free(X):
                raise ConfigError(f"start/goal {X} is not in free space")
            self.roadmap.add_vertex(X)
        self._connect(self.roadmap.goal_id)

    def _connect(self, idx: int):
        rm = self.roadmap
        n = max(rm.n, 2)
        r = self.gamma * (math.log(n) / n) ** (1 / self.env.dim)
        cand = [u for u in rm.near(rm.points[idx], r) if u != idx]
        if not cand:
            return
        ok = segments_collision_free(self.env, rm.points[idx], rm.points[cand], self.config.collision_step)
        rm.connect(idx, [u for u, good in zip(cand, ok) if good])

    def step(self):
        self.iteration += 1
        X = sample_free(self.env, self.rng)
        idx = self.roadmap.add_vertex(X)
        self._connect(idx)
        self.trace.record(self.iteration, self.roadmap)
        return [idx]

    def run(self, iterations: Optional[int] = None) -> RunTrace:
        n = self.config.iterations if iterations is None else iterations
        t0 = time.perf_counter()
        for _ in range(n):
            self.step()
        self.trace.wall_time += time.perf_counter() - t0
        return self.trace

    def best_path(self):
        return self.roadmap.min_path()


PLANNERS = {"gse": GSEPlanner, "gse-star": GSEStarPlanner, "prm-star": PRMStarPlanner}


def make_planner(name: str, env, init, goal, config: PlannerConfig = PlannerConfig()):
    try:
        cls = PLANNERS[name]
    except KeyError:
        raise ConfigError(f"unknown planner {name!r}") from None
    return cls(env, init, goal, config)


def prm_star_plan(env, init, goal, iterations: int, seed: int) -> RunTrace:
    return PRMStarPlanner(env, init, goal, PlannerConfig(iterations=iterations, seed=seed)).run()
