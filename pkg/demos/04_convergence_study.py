"""A small convergence study written to CSV.

Runs GSE and GSE* on two random workspaces, estimates the optimal cost with a
long PRM* run and writes raw traces, per-iteration means and the reference
costs to ./convergence_demo/.  The same study is available from the command
line as ``gseplan bench convergence --spec FILE --out DIR``.

    python demos/04_convergence_study.py
"""

from gseplan.bench import StudySpec, run_convergence_study

spec = StudySpec(kind="convergence", dim=2, obstacles=4, workspace_seeds=(0, 1), trials=5,
                 iterations=200, planners=("gse", "gse-star"), master_seed=0, reference_iterations=1600)
out = run_convergence_study(spec)
files = out.write("convergence_demo")
print("wrote", ", ".join(files))

means = {(p, ws, it): m for p, ws, it, m, _, _ in out.aggregate()}
for ws, c_star in out.reference.items():
    print(f"\nworkspace {ws}: PRM* reference {c_star:.4f}")
    for it in (50, 100, 200):
        row = "  ".join(f"{p} {means[(p, ws, it)] / c_star - 1:+.4f}" for p in spec.planners)
        print(f"  iteration {it:3d}: relative gap  {row}")
