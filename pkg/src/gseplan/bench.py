"""
Experiment harness: random workspaces, convergence and completeness studies.

Every study is a deterministic function of its spec.  Trials are independent
and may run in a process pool; results are always reduced in
(workspace, trial) order so the CSV output does not depend on scheduling.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import AxisBox, Environment, GeometryError, Sphere, obstacle_gap
from .planners import CSV_HEADER, ConfigError, PlannerConfig, format_float, make_planner
from .promenade import PromenadeSpec, build_promenade, wilson_interval

MASK64 = (1 << 64) - 1
WORKSPACE_SIDE = 10.0


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed: int, workspace_index: int, trial_index: int) -> int:
    """64-bit seed for one trial: splitmix64 chained over the three inputs."""
    h = splitmix64(master_seed & MASK64)
    h = splitmix64(h ^ (workspace_index & MASK64))
    return splitmix64(h ^ (trial_index & MASK64))


def parallel_map(fn, jobs, workers: int = 1):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


@dataclass(frozen=True)
class Workspace:
    env: Environment
    init: np.ndarray
    goal: np.ndarray
    seed: int

    def to_json(self) -> dict:
        doc = self.env.to_json()
        doc["init"] = self.init.tolist()
        doc["goal"] = self.goal.tolist()
        return doc


def random_workspace(d: int, m: int, seed: int, max_tries: int = 10_000) -> Workspace:
    """Box of side 10 with m disjoint spheres/boxes (alternating) and start/goal
    in opposite corners at least 0.6 diagonals apart.

    Obstacle sizes are drawn from [0.06, 0.14] * side, shrunk by (4/m)^(1/d)
    once m exceeds 4.
    """
    if m < 0:
        raise ConfigError("obstacle count must be non-negative")
    rng = np.random.default_rng(seed)
    side = WORKSPACE_SIDE
    lo, hi = np.zeros(d), np.full(d, side)
    corner_pad = 0.08 * side
    init = np.full(d, corner_pad)
    goal = np.full(d, side - corner_pad)
    keep_out = 0.1 * side
    # shrink obstacles as m grows so the covered fraction stays comparable
    scale = min(1.0, (4 / max(m, 1)) ** (1 / d))
    obstacles = []
    tries = 0
    while len(obstacles) < m:
        tries += 1
        if tries > max_tries:
            raise GeometryError(f"could not place {m} obstacles in {max_tries} attempts")
        size = rng.uniform(0.06, 0.14) * side * scale
        center = rng.uniform(lo + size + 0.05 * side, hi - size - 0.05 * side)
        if len(obstacles) % 2 == 0:
            obs = Sphere(center, size)
        else:
            half = size * rng.uniform(0.6, 1.0, size=d)
            obs = AxisBox(center - half, center + half)
        if any(obstacle_gap(obs, o) <= 0.02 * side for o in obstacles):
            continue
        probe = [Sphere(init, keep_out), Sphere(goal, keep_out)]
        if any(obstacle_gap(obs, p) <= 0 for p in probe):
            continue
        obstacles.append(obs)
    env = Environment(lo, hi, obstacles)
    assert np.linalg.norm(goal - init) >= 0.6 * env.diagonal
    return Workspace(env, init, goal, seed)


@dataclass(frozen=True)
class StudySpec:
    kind: str = "convergence"
    dim: int = 2
    obstacles: int = 4
    workspace_seeds: tuple = (0,)
    trials: int = 10
    iterations: int = 500
    planners: tuple = ("gse", "gse-star")
    master_seed: int = 0
    reference_iterations: int | None = None
    promenade: PromenadeSpec | None = None
    workers: int = 1

    def validate(self):
        if self.kind not in ("convergence", "completeness", "promenade"):
            raise ConfigError(f"unknown study kind {self.kind!r}")
        if self.trials < 1 or self.iterations < 1 or not self.planners:
            raise ConfigError("trials, iterations and planners must be non-empty")
        if self.promenade is None:
            if not self.workspace_seeds:
                raise ConfigError("need at least one workspace seed")
            if self.dim not in (2, 3):
                raise ConfigError("generated workspaces are 2-D or 3-D")
            if self.obstacles < 0:
                raise ConfigError("obstacle count must be non-negative")

    @classmethod
    def from_json(cls, doc: dict) -> "StudySpec":
        doc = dict(doc)
        if "promenade" in doc and doc["promenade"] is not None:
            doc["promenade"] = PromenadeSpec(**doc["promenade"])
        for key in ("workspace_seeds", "planners"):
            if key in doc:
                doc[key] = tuple(doc[key])
        try:
            spec = cls(**doc)
        except TypeError as exc:
            raise ConfigError(f"bad study spec: {exc}") from None
        spec.validate()
        return spec

    @classmethod
    def load(cls, path) -> "StudySpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    @property
    def reference_budget(self) -> int:
        return self.reference_iterations or 8 * self.iterations


def study_workspaces(spec: StudySpec) -> list:
    if spec.promenade is not None:
        env, X_init, X_goal, _ = build_promenade(spec.promenade)
        return [Workspace(env, X_init, X_goal, 0)]
    return [random_workspace(spec.dim, spec.obstacles, s) for s in spec.workspace_seeds]


def _run_job(args):
    planner, ws, seed, iterations = args
    p = make_planner(planner, ws.env, ws.init, ws.goal, PlannerConfig(iterations=iterations, seed=seed))
    return p.run().best_cost


@dataclass
class StudyOutput:
    """Per-trial cost traces plus the derived tables."""

    spec: StudySpec
    # (planner, workspace_seed, trial_seed) -> list of best costs per iteration
    traces: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)

    def raw_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        buf.write("planner,workspace_seed,trial_seed,iteration,best_cost\n")
        for (planner, ws, ts), costs in self.traces.items():
            for it, c in enumerate(costs, start=1):
                buf.write(f"{planner},{ws},{ts},{it},{format_float(c)}\n")
        return buf.getvalue()

    def aggregate(self):
        """Rows (planner, workspace_seed, iteration, mean, n_finite, n_excluded)."""
        groups = {}
        for (planner, ws, _), costs in self.traces.items():
            groups.setdefault((planner, ws), []).append(costs)
        rows = []
        for (planner, ws), runs in groups.items():
            arr = np.asarray(runs, dtype=float)
            for k in range(arr.shape[1]):
                col = arr[:, k]
                finite = col[np.isfinite(col)]
                mean = float(np.mean(finite)) if finite.size else math.inf
                rows.append((planner, ws, k + 1, mean, int(finite.size), int(col.size - finite.size)))
        return rows

    def workspace_average(self):
        """Mean over workspaces of per-workspace means: (planner, iteration, mean)."""
        per = {}
        for planner, ws, it, mean, _, _ in self.aggregate():
            per.setdefault((planner, it), []).append(mean)
        return [(p, it, float(np.mean(v))) for (p, it), v in per.items()]

    def aggregate_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        buf.write("planner,workspace_seed,iteration,mean_best_cost,trials_aggregated,excluded\n")
        for planner, ws, it, mean, n, excl in self.aggregate():
            buf.write(f"{planner},{ws},{it},{format_float(mean)},{n},{excl}\n")
        return buf.getvalue()

    def success(self):
        """Rows (planner, iteration, successes, trials, wilson_lo, wilson_hi)."""
        groups = {}
        for (planner, _, _), costs in self.traces.items():
            groups.setdefault(planner, []).append(costs)
        rows = []
        for planner, runs in groups.items():
            ok = np.isfinite(np.asarray(runs, dtype=float))
            for k in range(ok.shape[1]):
                s = int(ok[:, k].sum())
                lo, hi = wilson_interval(s, ok.shape[0])
                rows.append((planner, k + 1, s, ok.shape[0], lo, hi))
        return rows

    def success_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        buf.write("planner,iteration,successes,trials,fraction,wilson_lo,wilson_hi\n")
        for planner, it, s, n, lo, hi in self.success():
            buf.write(f"{planner},{it},{s},{n},{format_float(s / n)},{format_float(lo)},{format_float(hi)}\n")
        return buf.getvalue()

    def reference_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        buf.write("workspace_seed,reference_iterations,c_star\n")
        for ws, c in self.reference.items():
            buf.write(f"{ws},{self.spec.reference_budget},{format_float(c)}\n")
        return buf.getvalue()

    def write(self, outdir):
        import os

        os.makedirs(outdir, exist_ok=True)
        files = {"raw.csv": self.raw_csv()}
        if self.spec.kind == "convergence":
            files["aggregate.csv"] = self.aggregate_csv()
            files["reference.csv"] = self.reference_csv()
        else:
            files["success.csv"] = self.success_csv()
        for name, text in files.items():
            with open(os.path.join(outdir, name), "w") as fh:
                fh.write(text)
        return sorted(files)


def _collect(spec: StudySpec, workspaces) -> StudyOutput:
    jobs, keys = [], []
    for planner in spec.planners:
        for w, ws in enumerate(workspaces):
            for t in range(spec.trials):
                seed = trial_seed(spec.master_seed, w, t)
                jobs.append((planner, ws, seed, spec.iterations))
                keys.append((planner, ws.seed, seed))
    results = parallel_map(_run_job, jobs, spec.workers)
    return StudyOutput(spec, dict(zip(keys, results)))


def run_convergence_study(spec: StudySpec) -> StudyOutput:
    spec.validate()
    workspaces = study_workspaces(spec)
    out = _collect(spec, workspaces)
    ref_jobs = [("prm-star", ws, trial_seed(spec.master_seed, w, 2**32 - 1), spec.reference_budget)
                for w, ws in enumerate(workspaces)]
    refs = parallel_map(_run_job, ref_jobs, spec.workers)
    out.reference = {ws.seed: costs[-1] for ws, costs in zip(workspaces, refs)}
    return out


def run_completeness_study(spec: StudySpec) -> StudyOutput:
    spec.validate()
    return _collect(spec, study_workspaces(spec))
