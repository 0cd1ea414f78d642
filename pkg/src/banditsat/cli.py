"""Command-line front end.

``banditsat solve FILE`` runs the local search and prints evaluation-style
output: ``c`` header lines, one ``o <cost>`` line per improvement, an
``s`` status line, and a ``v`` model line for feasible results.  Exit
codes: 0 feasible, 20 no feasible assignment found, 1 usage/parse error.

``banditsat oracle FILE`` solves small instances exactly, for fixture
generation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .formula import WcnfError, evaluate_cost, falsified_hard_count, load_wcnf, parse_wcnf
from .oracle import OPTIMAL, exact_solve
from .search import FEASIBLE, Params, solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_SOLUTION = 20


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="banditsat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run the local search on a WCNF file")
    ps.add_argument("input", help="WCNF path, or - for standard input")
    ps.add_argument("--cutoff", type=float, default=300.0, help="seconds")
    ps.add_argument("--max-steps", type=int, default=None)
    ps.add_argument("--seed", type=int, default=1)
    ps.add_argument("-k", type=int, default=15, help="best-of-k greedy samples")
    ps.add_argument("-d", type=int, default=20, help="reward delay depth")
    ps.add_argument("--gamma", type=float, default=0.9)
    ps.add_argument("--arm-num", type=int, default=20)
    ps.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ps.add_argument(
        "--ablation",
        default="",
        help="comma list of: no_delay, mixed_training, no_binary, no_sample",
    )
    ps.add_argument("--first-feasible", action="store_true")
    ps.add_argument("--hard-reward", choices=("eq3", "eq3p1"), default="eq3")
    ps.add_argument("--model-format", choices=("bits", "lits"), default="bits")
    ps.add_argument("--trace", default=None, help="write improvement trace JSON here")
    ps.add_argument("--bandit-dump", default=None, help="write bandit state JSON here")
    ps.add_argument("--quiet", action="store_true", help="suppress c lines")

    po = sub.add_parser("oracle", help="exact solve a small WCNF file")
    po.add_argument("input")
    po.add_argument("--var-limit", type=int, default=25)
    return parser


_ABLATIONS = ("no_delay", "mixed_training", "no_binary", "no_sample")


def _params_from_args(args) -> Params:
    flags = {}
    for name in filter(None, (s.strip() for s in args.ablation.split(","))):
        if name not in _ABLATIONS:
            raise _UsageError(f"unknown ablation {name!r}")
        flags[name] = True
    return Params(
        k=args.k,
        d=args.d,
        gamma=args.gamma,
        arm_num=args.arm_num,
        lam=args.lam,
        cutoff=args.cutoff,
        max_steps=args.max_steps,
        seed=args.seed,
        first_feasible=args.first_feasible,
        hard_reward_variant=args.hard_reward,
        **flags,
    )


def _load(path):
    if path == "-":
        return parse_wcnf(sys.stdin)
    return load_wcnf(path)


def _model_line(assignment, num_vars: int, fmt: str) -> str:
    if fmt == "bits":
        return "v " + "".join("1" if assignment[v] else "0" for v in range(1, num_vars + 1))
    lits = (str(v if assignment[v] else -v) for v in range(1, num_vars + 1))
    return "v " + " ".join(lits)


def _cmd_solve(args) -> int:
    inst = _load(args.input)
    params = _params_from_args(args)
    out = sys.stdout

    if not args.quiet:
        print(
            f"c parameters: seed={params.seed} k={params.k} d={params.d} "
            f"gamma={params.gamma} arm_num={params.arm_num} lambda={params.lam} "
            f"cutoff={params.cutoff} max_steps={params.max_steps}",
            file=out,
        )
        print(
            f"c instance: vars={inst.num_vars} hard={inst.num_hard} "
            f"soft={inst.num_soft}",
            file=out,
        )

    def report(cost, step, elapsed):
        print(f"o {cost}", file=out, flush=True)

    result = solve(inst, params, on_improvement=report)

    if args.trace:
        payload = [
            {"t_seconds": t, "step": s, "cost": c} for t, s, c in result.trace
        ]
        with open(args.trace, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=1)
    if args.bandit_dump:
        with open(args.bandit_dump, "w", encoding="utf-8") as f:
            json.dump(_bandit_payload(result), f, indent=1)

    if result.status == FEASIBLE:
        assert evaluate_cost(inst, result.best_assignment) == result.best_cost
        assert falsified_hard_count(inst, result.best_assignment) == 0
        print("s OPTIMUM FOUND" if result.proved_optimal else "s SATISFIABLE", file=out)
        print(_model_line(result.best_assignment, inst.num_vars, args.model_format), file=out)
        return EXIT_OK
    print("s UNKNOWN", file=out)
    return EXIT_NO_SOLUTION


def _bandit_payload(result) -> dict:
    hb, sb = result.hard_bandit, result.soft_bandit
    hard_arms = [
        {
            "clause": hb.arm_info(a)[0],
            "pos": hb.arm_info(a)[1],
            "lit": hb.arm_info(a)[2],
            "V": float(hb.V[a]),
            "t": int(hb.t[a]),
        }
        for a in range(hb.n_arms)
    ]
    soft_arms = [
        {"clause": i, "V": float(sb.V[i]), "t": int(sb.t[i])}
        for i in range(sb.n_arms)
    ]
    return {
        "hard": {"n_optima": hb.n_optima, "arms": hard_arms},
        "soft": {"n_optima": sb.n_optima, "arms": soft_arms},
    }


def _cmd_oracle(args) -> int:
    inst = _load(args.input)
    try:
        result = exact_solve(inst, var_limit=args.var_limit)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if result.status == OPTIMAL:
        print(f"o {result.opt_cost}")
        print("s OPTIMUM FOUND")
        print(_model_line(result.assignment, inst.num_vars, "bits"))
        return EXIT_OK
    print("s UNSATISFIABLE")
    return EXIT_NO_SOLUTION


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_oracle(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except WcnfError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
