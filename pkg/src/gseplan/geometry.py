"""
Geometric primitives for d-dimensional workspaces with convex obstacles.

Obstacles are closed convex sets (spheres, axis-aligned boxes, convex hulls of
point clouds) living strictly inside an axis-aligned bounding box.  Everything
here is a pure function of its inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import gamma as gamma_fn

ANGLE_TOL = 1e-9
GAP_TOL = 1e-12


class GeometryError(ValueError):
    """Invalid geometric input (degenerate obstacle, bad environment...)."""


class PointInObstacleError(GeometryError):
    """A query point lies inside (or on the boundary of) an obstacle."""


class SamplingBudgetExceeded(RuntimeError):
    pass


def as_point(x) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or not np.all(np.isfinite(p)):
        raise GeometryError(f"not a finite point: {x!r}")
    return p


def ball_volume(d: int, radius: float) -> float:
    return math.pi ** (d / 2) / gamma_fn(d / 2 + 1) * radius**d


def min_norm_point(points: np.ndarray, tol: float = 1e-12, max_iter: int = 1000):
    """Minimum-norm point of conv(points) by Wolfe's algorithm.

    Returns ``(point, weights)`` where ``weights`` are convex coefficients over
    the rows of ``points``.
    """
    Q = np.asarray(points, dtype=float)
    n = Q.shape[0]
    sq = np.einsum("ij,ij->i", Q, Q)
    scale = max(sq.max(), 1.0)
    S = [int(np.argmin(sq))]
    lam = np.array([1.0])
    x = Q[S[0]].copy()
    for _ in range(max_iter):
        j = int(np.argmin(Q @ x))
        if x @ x - Q[j] @ x <= tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            A = Q[S]
            k = len(S)
            M = np.zeros((k + 1, k + 1))
            M[:k, :k] = A @ A.T
            M[:k, k] = 1.0
            M[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            alpha = np.linalg.lstsq(M, rhs, rcond=None)[0][:k]
            if np.all(alpha > tol):
                lam = alpha
                x = alpha @ A
                break
            neg = alpha <= tol
            ratios = lam[neg] / (lam[neg] - alpha[neg])
            step = ratios.min() if ratios.size else 0.0
            lam = lam + step * (alpha - lam)
            keep = lam > tol
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ Q[S]
    w = np.zeros(n)
    w[S] = lam
    return x, w


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise GeometryError("sphere radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        diff = np.atleast_2d(pts) - self.center
        return np.einsum("ij,ij->i", diff, diff) <= self.radius**2

    def nearest_point(self, X: np.ndarray) -> np.ndarray:
        v = X - self.center
        return self.center + self.radius * v / np.linalg.norm(v)

    def spread(self, X: np.ndarray, axis: np.ndarray) -> float:
        # tangent cone half-angle
        D = np.linalg.norm(self.center - X)
        return math.asin(min(1.0, self.radius / D))

    def ray_entry(self, origin: np.ndarray, u: np.ndarray) -> float:
        oc = origin - self.center
        b = oc @ u
        c = oc @ oc - self.radius**2
        disc = b * b - c
        if disc < 0:
            return math.inf
        t = -b - math.sqrt(disc)
        if t < 0:
            return 0.0 if c <= 0 else math.inf
        return t

    def volume(self) -> float:
        return ball_volume(self.dim, self.radius)

    def support_points(self) -> np.ndarray:
        # axis extreme points; only used for bounds checks
        eye = np.eye(self.dim) * self.radius
        return np.vstack([self.center + eye, self.center - eye])

    def to_json(self) -> dict:
        return {"type": "sphere", "center": self.center.tolist(), "radius": float(self.radius)}


@dataclass(frozen=True)
class AxisBox:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", as_point(self.lo))
        object.__setattr__(self, "hi", as_point(self.hi))
        if self.lo.shape != self.hi.shape or not np.all(self.lo < self.hi):
            raise GeometryError("box needs lo < hi componentwise")

    @property
    def dim(self) -> int:
        return self.lo.size

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def nearest_point(self, X: np.ndarray) -> np.ndarray:
        return np.clip(X, self.lo, self.hi)

    def vertices(self) -> np.ndarray:
        d = self.dim
        corners = np.array(np.meshgrid(*([[0, 1]] * d), indexing="ij")).reshape(d, -1).T
        return np.where(corners == 1, self.hi, self.lo)

    def spread(self, X: np.ndarray, axis: np.ndarray) -> float:
        # The angle to the axis is quasiconvex on the half-space holding the
        # box, so its maximum over the box is attained at a vertex.
        return points_spread(X, axis, self.vertices())

    def ray_entry(self, origin: np.ndarray, u: np.ndarray) -> float:
        t0, t1 = -math.inf, math.inf
        for k in range(self.dim):
            if u[k] == 0.0:
                if origin[k] < self.lo[k] or origin[k] > self.hi[k]:
                    return math.inf
                continue
            a = (self.lo[k] - origin[k]) / u[k]
            b = (self.hi[k] - origin[k]) / u[k]
            if a > b:
                a, b = b, a
            t0, t1 = max(t0, a), min(t1, b)
        if t0 > t1 or t1 < 0:
            return math.inf
        return max(t0, 0.0)

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def support_points(self) -> np.ndarray:
        return self.vertices()

    def to_json(self) -> dict:
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True)
class ConvexHullCloud:
    """Obstacle given as the convex hull of a boundary point cloud."""

    points: np.ndarray
    _hull: ConvexHull = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < pts.shape[1] + 1:
            raise GeometryError("hull cloud needs at least d+1 points")
        try:
            hull = ConvexHull(pts)
        except Exception as exc:  # scipy raises QhullError for flat clouds
            raise GeometryError(f"degenerate hull cloud: {exc}") from None
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_hull", hull)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def contains_points(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(pts)
        eq = self._hull.equations
        return np.all(pts @ eq[:, :-1].T + eq[:, -1] <= tol, axis=1)

    def nearest_point(self, X: np.ndarray) -> np.ndarray:
        x, _ = min_norm_point(self.points - X)
        return X + x

    def spread(self, X: np.ndarray, axis: np.ndarray) -> float:
        return points_spread(X, axis, self.points)

    def ray_entry(self, origin: np.ndarray, u: np.ndarray) -> float:
        normals, offsets = self._hull.equations[:, :-1], self._hull.equations[:, -1]
        t0, t1 = 0.0, math.inf
        for n, off in zip(normals, offsets):
            num = -(n @ origin + off)
            den = n @ u
            if den == 0.0:
                if num < 0:
                    return math.inf
                continue
            t = num / den
            if den > 0:
                t1 = min(t1, t)
            else:
                t0 = max(t0, t)
        return t0 if t0 <= t1 else math.inf

    def volume(self) -> float:
        return float(self._hull.volume)

    def support_points(self) -> np.ndarray:
        return self.points[self._hull.vertices]

    def to_json(self) -> dict:
        return {"type": "hull", "points": self.points.tolist()}


Obstacle = Union[Sphere, AxisBox, ConvexHullCloud]


def points_spread(X: np.ndarray, axis: np.ndarray, points: np.ndarray) -> float:
    """Largest angle between ``axis`` and the directions from X to ``points``."""
    v = np.atleast_2d(points) - X
    a = axis / np.linalg.norm(axis)
    cos = v @ a
    sin = np.linalg.norm(v - np.outer(cos, a), axis=1)
    return float(np.max(np.arctan2(sin, cos)))


def min_distance_vector(obs: Obstacle, X) -> tuple[np.ndarray, float]:
    """Vector from X to the closest point of ``obs`` and its length.

    Raises PointInObstacleError if X is inside or on the obstacle.
    """
    X = as_point(X)
    if obs.contains_points(X)[0]:
        raise PointInObstacleError(f"point {X} lies in obstacle")
    r = obs.nearest_point(X) - X
    mag = float(np.linalg.norm(r))
    if mag <= 0.0:
        raise PointInObstacleError(f"point {X} lies on obstacle boundary")
    return r, mag


def max_angular_spread(obs, X, r_vec) -> float:
    """Half-angle of the cone with apex X and axis ``r_vec`` that covers ``obs``.

    ``obs`` may also be a raw (k, d) array of boundary points, in which case the
    maximum is taken over those points.
    """
    X = as_point(X)
    r_vec = np.asarray(r_vec, dtype=float)
    if np.linalg.norm(r_vec) == 0.0:
        raise GeometryError("zero-length minimum distance vector")
    if isinstance(obs, (Sphere, AxisBox, ConvexHullCloud)):
        theta = obs.spread(X, r_vec)
    else:
        theta = points_spread(X, r_vec, np.asarray(obs, dtype=float))
    return min(max(theta, 0.0), math.pi)


@dataclass
class Environment:
    lo: np.ndarray
    hi: np.ndarray
    obstacles: list = field(default_factory=list)
    validate: bool = True

    def __post_init__(self):
        self.lo = as_point(self.lo)
        self.hi = as_point(self.hi)
        if self.lo.shape != self.hi.shape or not np.all(self.lo < self.hi):
            raise GeometryError("bounds need lo < hi componentwise")
        if self.dim < 2:
            raise GeometryError("dimension must be at least 2")
        self.obstacles = list(self.obstacles)
        for obs in self.obstacles:
            if obs.dim != self.dim:
                raise GeometryError("obstacle dimension does not match bounds")
        if self.validate:
            self._check_layout()
        self.free_measure = estimate_free_measure(self)
        if self.validate and not self.free_measure > 0:
            raise GeometryError("free space has no volume")

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def _check_layout(self):
        for k, obs in enumerate(self.obstacles):
            pts = obs.support_points()
            if not (np.all(pts > self.lo) and np.all(pts < self.hi)):
                raise GeometryError(f"obstacle {k} not strictly inside bounds")
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                if obstacle_gap(self.obstacles[i], self.obstacles[j]) <= 0:
                    raise GeometryError(f"obstacles {i} and {j} overlap")

    def in_bounds(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def in_collision(self, pts) -> np.ndarray:
        """Boolean mask of points lying in some obstacle."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        hit = np.zeros(len(pts), dtype=bool)
        for obs in self.obstacles:
            hit |= obs.contains_points(pts)
        return hit

    def is_free(self, X) -> bool:
        X = np.asarray(X, dtype=float)
        return bool(self.in_bounds(X)[0] and not self.in_collision(X)[0])

    def first_hit(self, origin, u) -> float:
        """Distance along unit direction u to the first obstacle entry."""
        return min((obs.ray_entry(origin, u) for obs in self.obstacles), default=math.inf)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "bounds": {"lo": self.lo.tolist(), "hi": self.hi.tolist()},
            "obstacles": [obs.to_json() for obs in self.obstacles],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> "Environment":
        try:
            dim = int(doc["dim"])
            lo, hi = doc["bounds"]["lo"], doc["bounds"]["hi"]
            obstacles = [obstacle_from_json(o) for o in doc.get("obstacles", [])]
        except (KeyError, TypeError) as exc:
            raise GeometryError(f"malformed environment document: {exc}") from None
        if len(lo) != dim or len(hi) != dim:
            raise GeometryError("bounds do not match 'dim'")
        return cls(lo, hi, obstacles)

    @classmethod
    def load(cls, path) -> "Environment":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())


def obstacle_from_json(doc: dict) -> Obstacle:
    kind = doc.get("type")
    if kind == "sphere":
        return Sphere(doc["center"], float(doc["radius"]))
    if kind == "box":
        return AxisBox(doc["lo"], doc["hi"])
    if kind == "hull":
        return ConvexHullCloud(doc["points"])
    raise GeometryError(f"unknown obstacle type {kind!r}")


def obstacle_gap(a: Obstacle, b: Obstacle) -> float:
    """Euclidean distance between two convex obstacles (0 if they touch)."""
    if isinstance(a, Sphere) and isinstance(b, Sphere):
        return max(0.0, np.linalg.norm(a.center - b.center) - a.radius - b.radius)
    if isinstance(a, AxisBox) and isinstance(b, AxisBox):
        sep = np.maximum(0.0, np.maximum(a.lo - b.hi, b.lo - a.hi))
        return float(np.linalg.norm(sep))
    if isinstance(b, Sphere):
        a, b = b, a
    if isinstance(a, Sphere):
        if isinstance(b, AxisBox):
            dist = np.linalg.norm(np.clip(a.center, b.lo, b.hi) - a.center)
        else:
            dist = np.linalg.norm(min_norm_point(b.points - a.center)[0])
            if b.contains_points(a.center)[0]:
                return 0.0
        return max(0.0, float(dist) - a.radius)
    # polytope pair: distance is the min-norm point of the Minkowski difference
    pa, pb = a.support_points(), b.support_points()
    diff = (pa[:, None, :] - pb[None, :, :]).reshape(-1, pa.shape[1])
    gap = float(np.linalg.norm(min_norm_point(diff)[0]))
    return gap if gap > GAP_TOL * np.abs(diff).max() else 0.0


def segment_collision_free(env: Environment, A, B, step: float | None = None) -> bool:
    """Dense-sampling collision oracle for the segment AB.

    Checks A + t(B - A) for t = 0, step/|AB|, ..., 1 (endpoint always included).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if step is None:
        step = 1e-3 * env.diagonal
    if not env.obstacles:
        return True
    length = float(np.linalg.norm(B - A))
    n = int(math.floor(length / step)) if length > 0 else 0
    t = np.arange(n + 1) * (step / length) if n > 0 else np.zeros(1)
    t = np.append(t[t < 1.0], 1.0)
    pts = A + t[:, None] * (B - A)
    return not env.in_collision(pts).any()


def segments_collision_free(env: Environment, A, Bs, step: float | None = None) -> np.ndarray:
    """Vectorised form of segment_collision_free for one start and many ends."""
    A = np.asarray(A, dtype=float)
    Bs = np.atleast_2d(np.asarray(Bs, dtype=float))
    out = np.ones(len(Bs), dtype=bool)
    if not env.obstacles or len(Bs) == 0:
        return out
    if step is None:
        step = 1e-3 * env.diagonal
    lengths = np.linalg.norm(Bs - A, axis=1)
    counts = np.floor(lengths / step).astype(int)
    owners, ts = [], []
    for k, (L, n) in enumerate(zip(lengths, counts)):
        t = np.arange(n + 1) * (step / L) if n > 0 else np.zeros(1)
        t = np.append(t[t < 1.0], 1.0)
        ts.append(t)
        owners.append(np.full(t.size, k))
    owners = np.concatenate(owners)
    ts = np.concatenate(ts)
    pts = A + ts[:, None] * (Bs[owners] - A)
    hit = env.in_collision(pts)
    out[np.unique(owners[hit])] = False
    return out


def sample_free(env: Environment, rng: np.random.Generator, max_tries: int = 100_000) -> np.ndarray:
    """Uniform sample from free space by rejection from the bounding box."""
    for _ in range(max_tries):
        x = rng.uniform(env.lo, env.hi)
        if not env.in_collision(x)[0]:
            return x
    raise SamplingBudgetExceeded(f"no free sample after {max_tries} draws")


def estimate_free_measure(env: Environment) -> float:
    """Volume of bounds minus obstacle volumes (obstacles are disjoint)."""
    return env.volume - sum(obs.volume() for obs in env.obstacles)
