"""
The promenade benchmark: a square workspace [0, a+2]^2 with the central
obstacle [1, a+1]^2, start and goal just left and right of the obstacle's lower
corners.  Solutions either go below the obstacle (cheap, "Type-L") or above it
("Type-B").

The five-state automaton reads the vertices GSE adds and tracks whether the
graph is building the upper detour before ever touching the lower-left
corner region.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import AxisBox, Environment
from .planners import CSV_HEADER, ConfigError, GSEPlanner, PlannerConfig, format_float
from .roadmap import PathResult
from .shape import build_shape, contains_many


class AutomatonState(enum.Enum):
    INIT = "s_init"
    S1 = "s_1"
    S2 = "s_2"
    ACCEPTING = "s_accepting"
    REJECTING = "s_rejecting"

    @property
    def absorbing(self) -> bool:
        return self in (AutomatonState.ACCEPTING, AutomatonState.REJECTING)


class SolutionType(enum.Enum):
    TYPE_L = "TypeL"
    TYPE_B = "TypeB"
    OTHER = "Other"


_NEXT = {
    AutomatonState.INIT: AutomatonState.S1,
    AutomatonState.S1: AutomatonState.S2,
    AutomatonState.S2: AutomatonState.ACCEPTING,
}


@dataclass(frozen=True)
class PromenadeSpec:
    alpha: float = 2.0
    epsilon: float = 0.05
    gamma_f: float = 0.3

    def validate(self):
        a, e, g = self.alpha, self.epsilon, self.gamma_f
        if not a >= 2:
            raise ConfigError("alpha must be at least 2")
        if not 0 < e < 0.5 * min(a, 1.0):
            raise ConfigError("epsilon must be positive and well below min(alpha, 1)")
        if not 0 < g < 0.5:
            raise ConfigError("gamma_f must be positive and small (< 0.5)")

    @property
    def mirror_x(self) -> float:
        return self.alpha / 2 + 1


@dataclass(frozen=True)
class Regions:
    """Region predicates for a promenade instance.

    Boxes are stored as (lo, hi) pairs; L1 is the half-plane x + y <= 2 inside
    the workspace and L2 its mirror image.
    """

    spec: PromenadeSpec
    B1: tuple
    B2: tuple
    F_init: tuple
    F1: tuple
    F2: tuple

    def reflect(self, pts) -> np.ndarray:
        pts = np.array(pts, dtype=float, ndmin=2)
        pts[:, 0] = 2 * self.spec.mirror_x - pts[:, 0]
        return pts

    def in_L1(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return pts[:, 0] + pts[:, 1] <= 2

    def in_L2(self, pts) -> np.ndarray:
        return self.in_L1(self.reflect(pts))

    @staticmethod
    def in_box(box, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo, hi = box
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def forward(self, state: AutomatonState) -> tuple:
        return {AutomatonState.INIT: self.F_init, AutomatonState.S1: self.F1,
                AutomatonState.S2: self.F2}[state]


def _box(lo, hi):
    return (np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))


def build_promenade(spec: PromenadeSpec = PromenadeSpec(), check_forward: bool = True):
    """Returns ``(env, X_init, X_goal, regions)``."""
    spec.validate()
    a, e, g = spec.alpha, spec.epsilon, spec.gamma_f
    env = Environment([0.0, 0.0], [a + 2, a + 2], [AxisBox([1.0, 1.0], [a + 1, a + 1])])
    X_init = np.array([1 - e, 1 + 2 * e])
    X_goal = np.array([a + 1 + e, 1 + 2 * e])
    mx = spec.mirror_x
    B1 = _box([0, a + 1], [1, a + 2])
    B2 = _box([2 * mx - 1, a + 1], [2 * mx, a + 2])
    F_init = _box([1 - g, a + 2 - g], [1, a + 2])
    F1 = _box([mx - g / 2, a + 2 - 1.5 * g], [mx + g / 2, a + 2 - 0.5 * g])
    F2 = _box([2 * mx - 1, a + 2 - g], [2 * mx - 1 + g, a + 2])
    regions = Regions(spec, B1, B2, F_init, F1, F2)
    if check_forward:
        _check_forward_regions(env, regions)
    return env, X_init, X_goal, regions


def _check_forward_regions(env: Environment, regions: Regions, samples: int = 64):
    lo1, hi1 = regions.F1
    if not (np.all(lo1 >= [1, regions.spec.alpha + 1]) and np.all(hi1 <= [regions.spec.alpha + 1, regions.spec.alpha + 2])):
        raise ConfigError("F1 does not fit above the obstacle")
    for box in (regions.F_init, regions.F1, regions.F2):
        if env.in_collision(np.array(np.meshgrid(*zip(*box))).reshape(2, -1).T).any():
            raise ConfigError("forward region touches the obstacle")
    lo2, hi2 = regions.F2
    corners = np.array([[lo2[0], lo2[1]], [lo2[0], hi2[1]], [hi2[0], lo2[1]], [hi2[0], hi2[1]]])
    rng = np.random.default_rng(0)
    pts = rng.uniform(lo1, hi1, size=(samples, 2))
    pts = np.vstack([pts, np.array(np.meshgrid(*zip(*regions.F1))).reshape(2, -1).T])
    for p in pts:
        if not contains_many(build_shape(env, p), corners).all():
            raise ConfigError("F2 is not inside the shape of every point of F1")


def automaton_step(state: AutomatonState, vertex, regions: Regions) -> AutomatonState:
    if state.absorbing:
        return state
    vertex = np.asarray(vertex, dtype=float)
    if regions.in_L1(vertex)[0]:
        return AutomatonState.REJECTING
    if Regions.in_box(regions.forward(state), vertex)[0]:
        return _NEXT[state]
    return state


def _segment_hits_halfplane(P, Q) -> bool:
    # x + y <= 2 is convex: the segment meets it iff an endpoint does
    return P[0] + P[1] <= 2 or Q[0] + Q[1] <= 2


def _segment_hits_box(P, Q, box) -> bool:
    lo, hi = box
    t0, t1 = 0.0, 1.0
    d = Q - P
    for k in range(len(P)):
        if d[k] == 0.0:
            if P[k] < lo[k] or P[k] > hi[k]:
                return False
            continue
        a, b = (lo[k] - P[k]) / d[k], (hi[k] - P[k]) / d[k]
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
        if t0 > t1:
            return False
    return True


def classify_polyline(points, regions: Regions) -> SolutionType:
    pts = np.asarray(points, dtype=float)
    mirrored = regions.reflect(pts)
    segs = list(zip(pts[:-1], pts[1:])) or [(pts[0], pts[0])]
    msegs = list(zip(mirrored[:-1], mirrored[1:])) or [(mirrored[0], mirrored[0])]
    hits_b1 = any(_segment_hits_box(P, Q, regions.B1) for P, Q in segs)
    hits_b2 = any(_segment_hits_box(P, Q, regions.B2) for P, Q in segs)
    if hits_b1 and hits_b2:
        return SolutionType.TYPE_B
    hits_l1 = any(_segment_hits_halfplane(P, Q) for P, Q in segs)
    hits_l2 = any(_segment_hits_halfplane(P, Q) for P, Q in msegs)
    if hits_l1 and hits_l2:
        return SolutionType.TYPE_L
    return SolutionType.OTHER


def classify_path(path: PathResult, points, regions: Regions) -> SolutionType:
    """Classify a roadmap path; ``points`` is the roadmap vertex array."""
    if not path.found:
        raise ValueError("cannot classify a path that was not found")
    return classify_polyline(np.asarray(points)[path.vertices], regions)


def type_l_optimum(spec: PromenadeSpec) -> float:
    """Shortest path below the obstacle: via the corners (1, 1) and (a+1, 1)."""
    return spec.alpha + 2 * spec.epsilon * math.sqrt(5)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    if trials <= 0:
        raise ValueError("wilson interval needs at least one trial")
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # pin the endpoints exactly at 0 and n: round-off must not fake a bound
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class TrialOutcome:
    trial: int
    seed: int
    result_type: str
    final_state: str
    final_cost: float
    first_path: int | None
    first_type: str


def run_promenade_trial(spec: PromenadeSpec, config: PlannerConfig, trial: int = 0,
                        planner_cls=GSEPlanner) -> TrialOutcome:
    env, X_init, X_goal, regions = build_promenade(spec, check_forward=False)
    planner = planner_cls(env, X_init, X_goal, config)
    state = [AutomatonState.INIT]
    first = {}

    def feed(p, idx):
        state[0] = automaton_step(state[0], p.roadmap.points[idx], regions)

    planner.listeners.append(feed)
    for _ in range(planner.config.iterations):
        planner.step()
        if "type" not in first and math.isfinite(planner.roadmap.best_cost):
            first["type"] = classify_path(planner.best_path(), planner.roadmap.points, regions).value
    path = planner.best_path()
    kind = classify_path(path, planner.roadmap.points, regions).value if path.found else "none"
    return TrialOutcome(trial, config.seed, kind, state[0].value, path.cost,
                        planner.trace.first_found(), first.get("type", "none"))


@dataclass
class StudyResult:
    outcomes: list
    accept_rate: float
    reject_rate: float
    undecided_rate: float
    wilson_interval: tuple
    type_b_rate: float
    type_b_wilson: tuple
    typel_always_rejected: bool
    accept_always_typeb: bool

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        buf.write("trial,seed,result_type,automaton_final_state,final_cost,iterations_to_first_path\n")
        for o in self.outcomes:
            first = "" if o.first_path is None else str(o.first_path)
            buf.write(f"{o.trial},{o.seed},{o.result_type},{o.final_state},"
                      f"{format_float(o.final_cost)},{first}\n")
        return buf.getvalue()


def summarize(outcomes) -> StudyResult:
    n = len(outcomes)
    acc = sum(o.final_state == AutomatonState.ACCEPTING.value for o in outcomes)
    rej = sum(o.final_state == AutomatonState.REJECTING.value for o in outcomes)
    typeb = sum(o.result_type == SolutionType.TYPE_B.value for o in outcomes)
    typel_ok = all(o.final_state == AutomatonState.REJECTING.value
                   for o in outcomes if o.result_type == SolutionType.TYPE_L.value)
    acc_ok = all(o.result_type in (SolutionType.TYPE_B.value, "none")
                 for o in outcomes if o.final_state == AutomatonState.ACCEPTING.value)
    return StudyResult(outcomes, acc / n, rej / n, (n - acc - rej) / n, wilson_interval(acc, n),
                       typeb / n, wilson_interval(typeb, n), typel_ok, acc_ok)


def run_automaton_study(spec: PromenadeSpec, config: PlannerConfig, trials: int,
                        master_seed: int = 0, workers: int = 1) -> StudyResult:
    """Run GSE on the promenade ``trials`` times, feeding every added vertex to
    the automaton.  Trial seeds come from ``trial_seed(master_seed, 0, k)``."""
    from .bench import parallel_map, trial_seed

    if trials < 1:
        raise ValueError("trials must be at least 1")
    build_promenade(spec)  # validates the spec and the forward-region layout
    jobs = [(spec, replace(config, seed=trial_seed(master_seed, 0, k)), k) for k in range(trials)]
    outcomes = parallel_map(_trial_job, jobs, workers)
    return summarize(outcomes)


def _trial_job(args):
    spec, config, k = args
    return run_promenade_trial(spec, config, k)
