"""Command-line entry point: ``vsl run|compare|quadrature-table|list-problems``."""

import argparse
import sys

from . import __version__
from .config import BASELINE_N, load
from .errors import ConfigError, SolverError, UsageError
from .problems import DEFAULT_BASIS, DEFAULT_NU, ProblemId
from .quadrature import gauss_legendre_on

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

EQUATIONS = {
    ProblemId.POISSON1D: "-u_xx = f",
    ProblemId.POISSON2D: "-(u_xx + u_yy) = f",
    ProblemId.HEAT1D: "u_t - nu u_xx = f",
    ProblemId.HEAT2D: "u_t - nu (u_xx + u_yy) = f",
    ProblemId.BURGERS1D: "nu u_xx - u u_x = f",
    ProblemId.BURGERS2D: "nu (u_xx + u_yy) - u (u_x + u_y) = f",
}


def _run(args, compare: bool) -> int:
    from .runner import run

    cfg = load(args.config)
    out, written = run(cfg, compare=compare)
    for r in out.results:
        print(f"{r.label:12s} l2_rel={r.errors.l2_rel:.3e} linf_rel={r.errors.linf_rel:.3e} "
              f"wall={r.wall_seconds:.2f}s")
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def _quadrature_table(args) -> int:
    rule = gauss_legendre_on(args.order, args.a, args.b)
    print("index,node,weight")
    for i, (z, w) in enumerate(zip(rule.nodes, rule.weights)):
        print(f"{i},{z:.17g},{w:.17g}")
    return EXIT_OK


def _list_problems(_args) -> int:
    print("problem,equation,default_basis,nu,baseline_n")
    for pid in ProblemId:
        shape = "x".join(str(n) for n in DEFAULT_BASIS[pid].shape)
        nu = DEFAULT_NU.get(pid, "")
        print(f"{pid.value},{EQUATIONS[pid]},{shape},{nu},{BASELINE_N[pid]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vsl", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="solve one configured benchmark")
    r.add_argument("config", help="config file, or a report.json to replay")
    c = sub.add_parser("compare", help="run two or more solvers and tabulate errors")
    c.add_argument("config")
    q = sub.add_parser("quadrature-table", help="print Gauss-Legendre nodes and weights")
    q.add_argument("--order", type=int, required=True)
    q.add_argument("--a", type=float, default=-1.0, help="left end (default -1)")
    q.add_argument("--b", type=float, default=1.0, help="right end (default 1)")
    sub.add_parser("list-problems", help="list the benchmark problems")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args, compare=False)
        if args.command == "compare":
            return _run(args, compare=True)
        if args.command == "quadrature-table":
            return _quadrature_table(args)
        return _list_problems(args)
    except (ConfigError, UsageError) as exc:
        print(f"vsl: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"vsl: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
