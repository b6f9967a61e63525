import numpy as np
import pytest

from gseplan.bench import random_workspace
from gseplan.geometry import AxisBox, ConvexHullCloud, Sphere


def boundary_samples(obs, n=4096, rng=None):
    """Dense sample of an obstacle's boundary, independent of the planner code."""
    rng = np.random.default_rng(0) if rng is None else rng
    if isinstance(obs, Sphere):
        g = rng.normal(size=(n, obs.dim))
        return obs.center + obs.radius * g / np.linalg.norm(g, axis=1, keepdims=True)
    if isinstance(obs, AxisBox):
        pts = rng.uniform(obs.lo, obs.hi, size=(n, obs.dim))
        axis = rng.integers(obs.dim, size=n)
        side = rng.integers(2, size=n)
        pts[np.arange(n), axis] = np.where(side == 1, obs.hi[axis], obs.lo[axis])
        return np.vstack([pts, obs.vertices()])
    if isinstance(obs, ConvexHullCloud):
        return obs.points
    raise TypeError(obs)


@pytest.fixture(scope="session")
def workspaces():
    """Ten desk-scale test environments: d in {2, 3}, m in {4, 16}."""
    out = []
    for k, (d, m) in enumerate([(2, 4), (2, 16), (3, 4), (3, 16), (2, 4),
                                (2, 16), (3, 4), (3, 16), (2, 4), (3, 16)]):
        out.append(random_workspace(d, m, seed=100 + k))
    return out


ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record a pass/fail line for an acceptance criterion."""

    def _report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
