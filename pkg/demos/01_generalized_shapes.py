"""Generalized shapes: what a single vertex "sees".

A shape about a free point X is the set of points reachable from X along a
straight, collision-free segment as certified by per-obstacle cones.  This
script builds one, probes membership along a few rays and cross-checks every
member it finds against the dense-sampling collision oracle.

    python demos/01_generalized_shapes.py
"""

import math

import numpy as np

from gseplan import AxisBox, Environment, Sphere, build_shape, free_length_along
from gseplan.geometry import segments_collision_free
from gseplan.shape import contains_many

env = Environment([0, 0], [10, 10], [Sphere([6, 5], 1.2), AxisBox([2, 6], [3.5, 8])])
X = np.array([3.0, 3.0])
shape = build_shape(env, X)

print("shape about", X)
for k, (axis, r, theta) in zip(shape.order, shape.records):
    print(f"  obstacle {k}: axis {np.round(axis, 3)}, distance {r:.3f}, half-angle {math.degrees(theta):.1f} deg")

print("\nhow far can we travel from X before leaving the shape?")
for deg in range(0, 360, 45):
    u = np.array([math.cos(math.radians(deg)), math.sin(math.radians(deg))])
    print(f"  heading {deg:3d} deg: {free_length_along(shape, u):.3f}")

rng = np.random.default_rng(0)
P = rng.uniform(env.lo, env.hi, size=(20_000, 2))
members = P[contains_many(shape, P)]
free = segments_collision_free(env, X, members)
print(f"\n{len(members)} of {len(P)} random points are members; "
      f"{int(free.sum())} of those segments pass the collision oracle")
