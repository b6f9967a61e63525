"""Why GSE alone is not asymptotically optimal.

On the promenade workspace the start and goal sit just beside the lower
corners of a large square obstacle.  GSE sometimes commits to the long route
over the top (Type-B) before it has any vertex in the lower-left corner
region; the five-state automaton watches the vertices it adds and accepts
exactly such runs.

    python demos/03_promenade_automaton.py
"""

from gseplan.planners import PlannerConfig
from gseplan.promenade import PromenadeSpec, build_promenade, run_automaton_study, type_l_optimum

spec = PromenadeSpec(alpha=2.0, epsilon=0.05, gamma_f=0.3)
env, X_init, X_goal, regions = build_promenade(spec)
print(f"workspace {env.lo} - {env.hi}, obstacle {env.obstacles[0].lo} - {env.obstacles[0].hi}")
print(f"start {X_init}, goal {X_goal}, shortest cost {type_l_optimum(spec):.4f}")

result = run_automaton_study(spec, PlannerConfig(iterations=300), trials=40, master_seed=1)
lo, hi = result.wilson_interval
print(f"\naccepting {result.accept_rate:.3f} (95% Wilson [{lo:.3f}, {hi:.3f}]), "
      f"rejecting {result.reject_rate:.3f}, undecided {result.undecided_rate:.3f}")
first_b = sum(o.first_type == "TypeB" for o in result.outcomes)
print(f"first solution went over the top in {first_b} of {len(result.outcomes)} runs; "
      f"the final returned solution did in {result.type_b_rate * len(result.outcomes):.0f}")
print("TypeL solutions always end in the rejecting state:", result.typel_always_rejected)
print("accepting runs never return a TypeL solution:", result.accept_always_typeb)
