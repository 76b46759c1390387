"""Command-line interface.

Subcommands: validate, reduce-symmetric, solve-nstage, solve-sup,
solve-recursive, simulate, kernel-check, verify-paper.  All values print as
exact rationals with a decimal rendering alongside; machine-readable
reports (--csv/--json) contain no clocks, so repeated runs are
byte-identical.  Exit codes: 0 success, 1 failed checks or violations,
2 usage errors, 3 resource budget exhausted.
"""

from __future__ import annotations

import argparse
import sys

from .errors import BudgetExceededError, GameModelError, ParseError
from .gamefile import load_game, load_strategy, save_strategy
from .histories import build_trees, conditional_check, simulate
from .model import SymmetricGameSpec, is_symmetric_signaling, uniform_strategy
from .rationals import decimal_repr, format_rational, parse_rational
from .recursive import uniform_value
from .reduction import build_auxiliary
from .seqform import nstage_value
from .supvalue import augment_running_max, sup_value_lowerbounds
from .verify import run_verification, write_corpus_files

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _fmt(value) -> str:
    return f"{format_rational(value)} (= {decimal_repr(value)})"


def _load(path):
    try:
        return load_game(path)
    except FileNotFoundError:
        raise SystemExit(f"error: no such game file: {path}")
    except ParseError as err:
        raise SystemExit(f"error: {err}")


def _general(spec):
    return spec.expand() if isinstance(spec, SymmetricGameSpec) else spec


def cmd_validate(args) -> int:
    spec = _load(args.game)
    problems = spec.validate()
    if problems:
        print(f"{args.game}: {len(problems)} violation(s)")
        for p in problems:
            print(f"  - {p}")
        return EXIT_FAIL
    kind = "symmetric" if isinstance(spec, SymmetricGameSpec) else "general"
    print(f"{args.game}: ok ({kind} signaling, {len(spec.states)} states)")
    return EXIT_OK


def cmd_reduce_symmetric(args) -> int:
    spec = _general(_load(args.game))
    witness = is_symmetric_signaling(spec)
    if not witness:
        print(f"not a symmetric-signaling game: {witness.reason}")
        return EXIT_FAIL
    print(f"symmetric signaling confirmed; public signals: "
          f"{' '.join(witness.reduced.signals)}")
    aux = build_auxiliary(spec, args.horizon)
    lines = ["depth,observed_history,weight,posterior,transitions"]
    for level in aux.levels:
        for node in level:
            post = " ".join(f"{x}:{format_rational(p)}"
                            for x, p in sorted(node.posterior.items()))
            trans = []
            for i in aux.actions1:
                for j in aux.actions2:
                    psi = aux.signal_transition(node, i, j)
                    if psi:
                        trans.append(
                            f"({i},{j})->"
                            + "/".join(f"{s}:{format_rational(p)}"
                                       for s, p in sorted(psi.items(), key=str)))
            lines.append(",".join([
                str(node.depth),
                '"%s"' % " ".join(map(str, node.view())),
                format_rational(node.beta),
                '"%s"' % post,
                '"%s"' % "; ".join(trans),
            ]))
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"auxiliary game written to {args.csv} "
              f"({sum(len(l) for l in aux.levels)} nodes)")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_solve_nstage(args) -> int:
    spec = _load(args.game)
    if args.eval == "mean":
        sol = nstage_value(spec, args.horizon)
        value = sol.value
    else:
        aug = augment_running_max(spec)
        sol = nstage_value(aug.spec, args.horizon, aug.terminal_running_max())
        value = sol.value
    print(f"value ({args.eval}, horizon {args.horizon}): {_fmt(value)}")
    if args.strategy_out:
        save_strategy(args.strategy_out, sol.strategy1)
        print(f"player 1 optimal strategy written to {args.strategy_out}")
    if args.verbose:
        for player, strat in ((1, sol.strategy1), (2, sol.strategy2)):
            print(f"player {player} strategy:")
            for view in sorted(strat.table, key=lambda v: (len(v), v)):
                dist = strat.table[view]
                pretty = " ".join(f"{a}:{format_rational(p)}"
                                  for a, p in sorted(dist.items()))
                print(f"  {' '.join(map(str, view))}: {pretty}")
    return EXIT_OK


def cmd_solve_sup(args) -> int:
    spec = _load(args.game)
    report = sup_value_lowerbounds(spec, args.max_horizon)
    lines = ["n,lower_bound,decimal"]
    for n, v in report.values:
        lines.append(f"{n},{format_rational(v)},{decimal_repr(v)}")
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    last_n, last = report.values[-1]
    print(f"best certified lower bound: v(F_{last_n}) = {_fmt(last)}")
    if report.upper is not None:
        print(f"optimistic upper bound: {_fmt(report.upper)}")
    if report.exact:
        print("sup value determined exactly (bounds met)")
    else:
        print("sup value bracketed; lower bounds are guarantees, "
              f"stabilized={report.stabilized}")
    return EXIT_RESOURCE if report.budget_hit else EXIT_OK


def cmd_solve_recursive(args) -> int:
    spec = _load(args.game)
    tol = parse_rational(args.tol)
    report = uniform_value(spec, tol=tol, n_max=args.max_horizon,
                           window=args.window)
    lines = ["n,value,decimal"]
    for n, v in report.value_sequence:
        lines.append(f"{n},{format_rational(v)},{decimal_repr(v)}")
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    print(f"certified lower bound of the uniform value: "
          f"{_fmt(report.certified_lower)}")
    print(f"stabilized={report.stabilized} (tol {args.tol}, window {args.window}); "
          f"values are sound lower bounds, stabilization is heuristic")
    if report.eps_optimal_strategy1 is not None and args.strategy_out:
        save_strategy(args.strategy_out, report.eps_optimal_strategy1)
        print(f"eps-optimal strategy (horizon {report.strategy_horizon}, "
              f"guarantee {_fmt(report.strategy_guarantee)}) written to "
              f"{args.strategy_out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = _load(args.game)
    general = _general(spec)
    sigma = load_strategy(args.sigma) if args.sigma else uniform_strategy(general, 1)
    tau = load_strategy(args.tau) if args.tau else uniform_strategy(general, 2)
    summary = simulate(spec, sigma, tau, args.horizon, args.seed, args.replicas)
    print(f"replicas {summary.replicas}, horizon {summary.horizon}, "
          f"seed {summary.seed}")
    print(f"mean payoff: {summary.mean_of_means:.6f} "
          f"(stderr {summary.stderr_of_means():.6f})")
    print(f"mean sup payoff: {summary.mean_sup:.6f}")
    print(f"absorbed fraction: {summary.absorbed_fraction:.6f} "
          f"(at stage 1: {summary.stage1_absorbed_fraction:.6f})")
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    spec = _load(args.game)
    general = _general(spec)
    sigma = load_strategy(args.sigma) if args.sigma else uniform_strategy(general, 1)
    tau = load_strategy(args.tau) if args.tau else uniform_strategy(general, 2)
    if args.dump_trees:
        pair = build_trees(spec, args.m)
        lines = ["kind,level,sequence,weight"]
        for n in range(1, args.m + 1):
            for h in pair.histories(n):
                states, actions = h.stage_path()
                walk = " ".join(f"{x}/{'' if a is None else ','.join(a)}"
                                for x, a in zip(states, [None] + list(actions)))
                lines.append(f'history,{n},"{walk}",{format_rational(h.alpha)}')
            for v in pair.observations(n):
                lines.append(f'observation,{n},"{" ".join(map(str, v.view()))}",'
                             f"{format_rational(v.beta)}")
        with open(args.dump_trees, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"trees written to {args.dump_trees}")
    report = conditional_check(spec if isinstance(spec, SymmetricGameSpec)
                               else general, sigma, tau, args.n, args.m)
    print(f"kernel identities at (n={args.n}, m={args.m}): "
          f"{report.checked_pairs} pairs checked")
    for name, ok in (("row normalization", report.normalization_ok),
                     ("strategy independence", report.bayes_ok),
                     ("sum identity", report.sum_identity_ok),
                     ("one-step compatibility", report.compatibility_ok)):
        print(f"  {name}: {'exact' if ok else 'VIOLATED'}")
    print(f"max discrepancy: {format_rational(report.max_discrepancy)}")
    return EXIT_OK if report.all_exact else EXIT_FAIL


def cmd_verify_example(args) -> int:
    from . import corpus as corpus_mod
    from .claims import verify_example

    eps = parse_rational(args.eps)
    check = verify_example(corpus_mod.build_game, args.id, args.side,
                           horizon=args.horizon, eps=eps)
    print(check.describe())
    if check.reduced_matrix is not None:
        for row in check.reduced_matrix:
            print("  [" + ", ".join(format_rational(v) for v in row) + "]")
    if args.verbose:
        for name, value in check.vertex_values:
            print(f"  {name}: {_fmt(value)}")
    print("certified" if check.ok else "FAILED")
    return EXIT_OK if check.ok else EXIT_FAIL


def cmd_verify_paper(args) -> int:
    if args.write_corpus:
        paths = write_corpus_files(args.write_corpus)
        print(f"corpus written: {len(paths)} game files in {args.write_corpus}")
    report = run_verification(only=args.only)
    width = max(len(f"{r.entry}/{r.claim}") for r in report.rows)
    for r in report.rows:
        status = "pass" if r.ok else "FAIL"
        name = f"{r.entry}/{r.claim}"
        print(f"{status:4} {name:<{width}}  {r.quantity}: expected {r.expected}; "
              f"got {r.computed}  [{r.seconds:.2f}s]")
    total = len(report.rows)
    passed = sum(1 for r in report.rows if r.ok)
    print(f"{passed}/{total} claims verified")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signalgames",
        description=("Exact solvers for two-player zero-sum repeated games "
                     "with signals"))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a game file's invariants")
    p.add_argument("--game", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reduce-symmetric",
                       help="detect symmetric signaling and dump the "
                            "observed-history game")
    p.add_argument("--game", required=True)
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_reduce_symmetric)

    p = sub.add_parser("solve-nstage", help="exact n-stage value and strategies")
    p.add_argument("--game", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--eval", choices=["mean", "terminal"], default="mean",
                   help="mean of stage rewards, or terminal running maximum")
    p.add_argument("--strategy-out")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_solve_nstage)

    p = sub.add_parser("solve-sup",
                       help="monotone lower bounds of the sup-evaluation value")
    p.add_argument("--game", required=True)
    p.add_argument("--max-horizon", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_solve_sup)

    p = sub.add_parser("solve-recursive",
                       help="uniform value of a recursive nonnegative game")
    p.add_argument("--game", required=True)
    p.add_argument("--tol", default="1/10000")
    p.add_argument("--max-horizon", type=int, default=512)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--csv")
    p.add_argument("--strategy-out")
    p.set_defaults(func=cmd_solve_recursive)

    p = sub.add_parser("simulate", help="Monte Carlo play (floating point)")
    p.add_argument("--game", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicas", type=int, default=1000)
    p.add_argument("--sigma", help="player 1 strategy JSON")
    p.add_argument("--tau", help="player 2 strategy JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("kernel-check",
                       help="exact conditional-kernel identities at (n, m)")
    p.add_argument("--game", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sigma")
    p.add_argument("--tau")
    p.add_argument("--dump-trees", metavar="CSV",
                   help="also dump both weighted trees as CSV")
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("verify-example",
                       help="re-run a no-limsup-value example's reply bound")
    p.add_argument("--id", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--side", choices=["maxmin", "minmax"], required=True)
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--eps", default="1/100")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify_example)

    p = sub.add_parser("verify-paper",
                       help="re-verify every documented corpus claim")
    p.add_argument("--csv", help="write the machine-readable report here")
    p.add_argument("--json", help="write the JSON report here")
    p.add_argument("--only", help="restrict to one corpus entry")
    p.add_argument("--write-corpus", metavar="DIR",
                   help="also write the corpus game files to DIR")
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as err:
        print(f"resource budget exhausted: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except GameModelError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
