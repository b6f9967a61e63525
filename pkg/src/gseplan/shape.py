"""
Generalized shapes: star-convex safe regions built from per-obstacle cones.

For every obstacle the shape about X keeps a cone with apex X, axis along the
minimum distance vector and half-angle equal to the obstacle's angular spread.
Inside that cone the shape is truncated at the obstacle's minimum distance;
outside it the obstacle imposes no restriction.  The result is clipped to the
workspace box.  A point P belongs to the shape iff, for every obstacle, the
direction X->P lies outside the cone or |P - X| is below the cutoff.

The module-level kernels (``blocked_cutoffs``, ``box_exit``) work on stacked
arrays so the planners can test a new vertex against every stored shape in one
call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    ANGLE_TOL,
    Environment,
    PointInObstacleError,
    as_point,
    max_angular_spread,
    min_distance_vector,
)


@dataclass(frozen=True)
class GeneralizedShape:
    center: np.ndarray
    axes: np.ndarray  # (m, d) unit vectors, sorted by r_mag
    r_mag: np.ndarray  # (m,)
    theta: np.ndarray  # (m,)
    lo: np.ndarray
    hi: np.ndarray
    order: tuple = ()  # obstacle index of each record

    @property
    def records(self):
        return list(zip(self.axes, self.r_mag, self.theta))

    def contains(self, P) -> bool:
        return contains(self, P)

    def free_length_along(self, u) -> float:
        return free_length_along(self, u)


def build_shape(env: Environment, X) -> GeneralizedShape:
    """Shape about a free point X; raises PointInObstacleError otherwise."""
    X = as_point(X)
    if not env.in_bounds(X)[0]:
        raise PointInObstacleError(f"point {X} outside workspace bounds")
    d, m = env.dim, len(env.obstacles)
    axes = np.empty((m, d))
    r_mag = np.empty(m)
    theta = np.empty(m)
    for i, obs in enumerate(env.obstacles):
        r_vec, mag = min_distance_vector(obs, X)
        axes[i] = r_vec / mag
        r_mag[i] = mag
        theta[i] = max_angular_spread(obs, X, r_vec)
    order = np.argsort(r_mag, kind="stable")
    return GeneralizedShape(
        X, axes[order], r_mag[order], theta[order], env.lo, env.hi, tuple(int(k) for k in order)
    )


def _angles(axes: np.ndarray, u: np.ndarray) -> np.ndarray:
    # angle between each axis (..., m, d) and direction u (..., d)
    cos = np.einsum("...md,...d->...m", axes, u)
    perp = u[..., None, :] - cos[..., None] * axes
    sin = np.sqrt(np.einsum("...md,...md->...m", perp, perp))
    return np.arctan2(sin, cos)


def blocked_cutoffs(axes, r_mag, theta, u) -> np.ndarray:
    """Distance at which direction u leaves each shape through an obstacle cone.

    Shapes are stacked along the leading axis: axes (n, m, d), r_mag and theta
    (n, m), u (n, d).  Returns (n,) with +inf where no cone blocks u.
    """
    if axes.shape[-2] == 0:
        return np.full(u.shape[0], np.inf)
    blocked = _angles(axes, u) <= theta + ANGLE_TOL
    return np.where(blocked, r_mag, np.inf).min(axis=-1)


def box_exit(centers, u, lo, hi) -> np.ndarray:
    """Distance from each center along u until it leaves the box [lo, hi]."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t_hi = np.where(u > 0, (hi - centers) / u, np.inf)
        t_lo = np.where(u < 0, (lo - centers) / u, np.inf)
    return np.maximum(np.minimum(t_hi, t_lo).min(axis=-1), 0.0)


def contains(shape: GeneralizedShape, P) -> bool:
    P = np.asarray(P, dtype=float)
    if np.any(P < shape.lo) or np.any(P > shape.hi):
        return False
    v = P - shape.center
    dist = float(np.linalg.norm(v))
    if dist == 0.0:
        return True
    cutoff = blocked_cutoffs(shape.axes[None], shape.r_mag[None], shape.theta[None], (v / dist)[None])
    return bool(dist < cutoff[0])


def free_length_along(shape: GeneralizedShape, u) -> float:
    """Largest t such that center + s*u is in the shape for all s < t."""
    u = np.asarray(u, dtype=float)
    cut = blocked_cutoffs(shape.axes[None], shape.r_mag[None], shape.theta[None], u[None])[0]
    return float(min(cut, box_exit(shape.center[None], u[None], shape.lo, shape.hi)[0]))


def shapes_connect(A: GeneralizedShape, B: GeneralizedShape) -> bool:
    """Whether the segment between the centers has a point inside both shapes."""
    v = B.center - A.center
    L = float(np.linalg.norm(v))
    if L == 0.0:
        return True
    u = v / L
    return free_length_along(A, u) + free_length_along(B, -u) > L


def connect_mask(shape: GeneralizedShape, centers, axes, r_mag, theta) -> np.ndarray:
    """shapes_connect(shape, S_k) for a stack of shapes S_k given as arrays."""
    n = centers.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    v = centers - shape.center
    L = np.linalg.norm(v, axis=1)
    safe = np.where(L > 0, L, 1.0)
    u = v / safe[:, None]
    m = shape.axes.shape[0]
    t_self = np.minimum(
        blocked_cutoffs(np.broadcast_to(shape.axes, (n, m, shape.axes.shape[1])),
                        np.broadcast_to(shape.r_mag, (n, m)),
                        np.broadcast_to(shape.theta, (n, m)), u),
        box_exit(np.broadcast_to(shape.center, v.shape), u, shape.lo, shape.hi),
    )
    t_other = np.minimum(
        blocked_cutoffs(axes, r_mag, theta, -u),
        box_exit(centers, -u, shape.lo, shape.hi),
    )
    return (t_self + t_other > L) | (L == 0)


def contains_many(shape: GeneralizedShape, P) -> np.ndarray:
    """Vectorised membership of the rows of P in a single shape."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    v = P - shape.center
    dist = np.linalg.norm(v, axis=1)
    safe = np.where(dist > 0, dist, 1.0)
    u = v / safe[:, None]
    n, m = len(P), shape.axes.shape[0]
    cut = blocked_cutoffs(np.broadcast_to(shape.axes, (n, m, P.shape[1])),
                          np.broadcast_to(shape.r_mag, (n, m)),
                          np.broadcast_to(shape.theta, (n, m)), u)
    inside = np.all((P >= shape.lo) & (P <= shape.hi), axis=1)
    return inside & ((dist < cut) | (dist == 0))
