"""Command line front end.

    gseplan plan --env FILE --planner {gse,gse-star,prm-star} --iters N --seed S --out trace.csv
    gseplan bench {convergence,completeness} --spec FILE --out DIR
    gseplan promenade --alpha A --eps E --gamma-f G --trials T --iters N --seed S --out DIR
    gseplan env gen --dim D --obstacles M --seed S --out FILE

Exit codes: 0 success, 2 configuration error, 3 planner runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bench import StudySpec, random_workspace, run_completeness_study, run_convergence_study
from .geometry import Environment, GeometryError
from .planners import PLANNERS, ConfigError, PlannerConfig, make_planner
from .promenade import PromenadeSpec, run_automaton_study

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load_env(path):
    with open(path) as fh:
        doc = json.load(fh)
    env = Environment.from_json(doc)
    lo, hi = env.lo, env.hi
    init = np.asarray(doc.get("init", lo + 0.05 * (hi - lo)), dtype=float)
    goal = np.asarray(doc.get("goal", hi - 0.05 * (hi - lo)), dtype=float)
    return env, init, goal


def cmd_plan(args):
    env, init, goal = _load_env(args.env)
    cfg = PlannerConfig(iterations=args.iters, seed=args.seed, eta=args.eta, phi=args.phi,
                        rho=args.rho, gamma_override=args.gamma)
    planner = make_planner(args.planner, env, init, goal, cfg)
    trace = planner.run()
    with open(args.out, "w") as fh:
        fh.write(trace.to_csv())
    path = planner.best_path()
    print(f"{args.planner}: found={path.found} cost={path.cost} vertices={planner.roadmap.n}")


def cmd_bench(args):
    spec = StudySpec.load(args.spec)
    spec = spec.__class__(**{**spec.__dict__, "kind": args.kind})
    runner = run_convergence_study if args.kind == "convergence" else run_completeness_study
    written = runner(spec).write(args.out)
    print("wrote " + ", ".join(os.path.join(args.out, f) for f in written))


def cmd_promenade(args):
    spec = PromenadeSpec(args.alpha, args.eps, args.gamma_f)
    result = run_automaton_study(spec, PlannerConfig(iterations=args.iters), args.trials,
                                 master_seed=args.seed, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "promenade.csv"), "w") as fh:
        fh.write(result.to_csv())
    lo, hi = result.wilson_interval
    print(f"accept={result.accept_rate:.4f} [{lo:.4f}, {hi:.4f}] reject={result.reject_rate:.4f} "
          f"undecided={result.undecided_rate:.4f} typeB={result.type_b_rate:.4f}")


def cmd_env_gen(args):
    ws = random_workspace(args.dim, args.obstacles, args.seed)
    with open(args.out, "w") as fh:
        fh.write(json.dumps(ws.to_json(), indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gseplan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run one planner on an environment file")
    p.add_argument("--env", required=True)
    p.add_argument("--planner", choices=sorted(PLANNERS), default="gse-star")
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float)
    p.add_argument("--phi", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--gamma", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run a convergence or completeness study")
    p.add_argument("kind", choices=["convergence", "completeness"])
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("promenade", help="automaton study of GSE on the promenade problem")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--gamma-f", type=float, default=0.3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_promenade)

    p = sub.add_parser("env", help="environment utilities")
    env_sub = p.add_subparsers(dest="env_command", required=True)
    g = env_sub.add_parser("gen", help="generate a random workspace")
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--obstacles", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_env_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, GeometryError, ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"planner error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
