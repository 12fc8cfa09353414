"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (or a sweep finding), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..solver import SolveConfig, iterate_splitting
from ..splitting import rate_bound
from .experiments import (
    ExperimentSpec,
    build_splitting,
    resolve_problem,
    run_beta_sweep,
    run_method_comparison,
    target_policy,
)
from .generators import gen_four_rooms, gen_random_mdp, gen_random_options, scalar_problem, two_state_chain
from .problem_io import Problem, dump_problem, load_problem, problem_to_dict
from .validation import validate_problem

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-10, help="sup-norm residual threshold")
    p.add_argument("--max-iters", type=int, default=100_000)


def _add_problem_flags(p, required=True):
    p.add_argument("--problem", required=required, help="problem JSON (MDP, optionally options)")
    p.add_argument("--options", help="separate option-set JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optsplit", description="Policy evaluation with options viewed as matrix splittings.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a generated problem as JSON")
    gen.add_argument("generator", choices=["random", "four-rooms", "scalar", "two-state"])
    gen.add_argument("--n", type=int, default=16)
    gen.add_argument("--k", type=int, default=4)
    gen.add_argument("--gamma", type=float, default=0.9)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sparsity", type=float, default=1.0)
    gen.add_argument("--n-options", type=int, default=3)
    gen.add_argument("--out", help="output path (default stdout)")

    solve = sub.add_parser("solve", help="solve one problem with one method")
    _add_problem_flags(solve)
    solve.add_argument("--method", default="options(1)",
                       help="options(c) | jacobi | gauss_seidel | sor(w) | richardson(t)")
    _add_solver_flags(solve)
    solve.add_argument("--out", help="write a JSON report instead of printing v")

    sweep = sub.add_parser("sweep-beta", help="termination-scale sweep, CSV out")
    sweep.add_argument("--spec", required=True, help="ExperimentSpec JSON")
    _add_problem_flags(sweep, required=False)
    sweep.add_argument("--seed", type=int, help="override the generator seed")
    sweep.add_argument("--tol", type=float)
    sweep.add_argument("--max-iters", type=int)
    sweep.add_argument("--out", help="override the output CSV path")

    compare = sub.add_parser("compare", help="compare splittings on one problem, CSV out")
    _add_problem_flags(compare)
    compare.add_argument("--method", default="options(1),options(0.5),jacobi,gauss_seidel,richardson(1)",
                         help="comma-separated method list")
    _add_solver_flags(compare)
    compare.add_argument("--out", help="output CSV path (default stdout)")

    validate = sub.add_parser("validate", help="run the invariant suite on a problem file")
    _add_problem_flags(validate)
    _add_solver_flags(validate)
    validate.add_argument("--seed", type=int, default=0, help="seed for random starting points")
    return parser


def _cmd_gen(args) -> int:
    if args.generator == "random":
        mdp = gen_random_mdp(args.n, args.k, args.gamma, args.seed, args.sparsity)
        problem = Problem(mdp, *gen_random_options(mdp, args.n_options, args.seed + 1))
    elif args.generator == "four-rooms":
        problem = Problem(*gen_four_rooms(args.gamma))
    elif args.generator == "scalar":
        problem = Problem(*scalar_problem(args.gamma))
    else:
        problem = Problem(*two_state_chain(args.gamma))
    if args.out:
        dump_problem(problem, args.out)
    else:
        json.dump(problem_to_dict(problem), sys.stdout)
        sys.stdout.write("\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    problem = load_problem(args.problem, args.options)
    s = build_splitting(problem, args.method)
    policy = target_policy(problem)
    r = (policy.probs * problem.mdp.reward).sum(axis=1)
    report = iterate_splitting(s, r, SolveConfig(args.tol, args.max_iters))
    rho, bound = rate_bound(s)
    if args.out:
        Path(args.out).write_text(json.dumps({
            "method": args.method,
            "v": report.v.tolist(),
            "iterations": report.iterations,
            "converged": report.converged,
            "diverged": report.diverged,
            "final_residual": report.final_residual,
            "empirical_rate": report.empirical_rate,
            "rho": rho,
            "norm_bound": bound,
        }, indent=2))
    else:
        np.savetxt(sys.stdout, report.v, fmt="%.17g")
    if not report.converged:
        print(f"warning: {args.method} did not converge ({report.iterations} iterations)",
              file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    if args.problem:
        spec.problem = {"path": args.problem, "options_path": args.options}
    if args.seed is not None:
        spec.problem = {**spec.problem, "seed": args.seed}
    if args.tol is not None:
        spec.tol = args.tol
    if args.max_iters is not None:
        spec.max_iters = args.max_iters
    if args.out:
        spec.output = args.out
    result = run_beta_sweep(spec)
    if spec.output is None:
        for row in result.rows:
            print(f"c={row.c:<6g} rho={row.rho:.9f} bound={row.norm_bound:.9f} "
                  f"iters={row.iterations}")
    for failure in result.failures:
        print(f"finding: {failure}", file=sys.stderr)
    print(f"status: {result.status}", file=sys.stderr)
    return EXIT_OK if not result.failures else EXIT_INVALID


def _cmd_compare(args) -> int:
    problem = load_problem(args.problem, args.options)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    out = args.out
    rows = run_method_comparison(problem, methods, args.tol, args.max_iters, output=out)
    if out is None:
        for row in rows:
            flag = "ok" if row.agrees else ("DIVERGED" if row.diverged else "MISMATCH")
            print(f"{row.method:<16} rho={row.rho:.9f} iters={row.iterations:<7} "
                  f"err={row.oracle_error:.3g} {flag}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    problem = load_problem(args.problem, args.options, validate=False)
    failures = validate_problem(problem, args.tol, args.max_iters, seed=args.seed)
    for failure in failures:
        print(f"FAIL {failure}")
    print("valid" if not failures else f"{len(failures)} check(s) failed")
    return EXIT_OK if not failures else EXIT_INVALID


COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "sweep-beta": _cmd_sweep,
    "compare": _cmd_compare,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
