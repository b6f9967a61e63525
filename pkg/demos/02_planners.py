"""GSE, GSE* and PRM* side by side on one random workspace.

All three planners receive the same seed.  GSE and GSE* draw the same sample
stream, so the GSE* graph always contains the GSE graph and its cost can only
be lower or equal.

    python demos/02_planners.py
"""

from gseplan.bench import random_workspace
from gseplan.planners import PlannerConfig, make_planner

ws = random_workspace(d=2, m=6, seed=11)
print(f"workspace: {len(ws.env.obstacles)} obstacles, start {ws.init}, goal {ws.goal}")

for name in ("gse", "gse-star", "prm-star"):
    planner = make_planner(name, ws.env, ws.init, ws.goal, PlannerConfig(iterations=400, seed=3))
    trace = planner.run()
    path = planner.best_path()
    milestones = {it: trace.best_cost[it - 1] for it in (25, 100, 400)}
    print(f"\n{name}")
    print(f"  first solution at iteration {trace.first_found()}")
    print("  best cost at " + ", ".join(f"{it}: {c:.4f}" for it, c in milestones.items()))
    print(f"  {planner.roadmap.n} vertices, {planner.roadmap.edge_count} edges, "
          f"path through {len(path.vertices)} vertices, {trace.wall_time:.2f}s")
