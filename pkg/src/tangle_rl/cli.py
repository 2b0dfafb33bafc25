"""Command-line entry point: run, solve, ttest, show-state.

Exit status is 0 on success, 1 for usage errors and 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import sys

from .harness import ExperimentConfig, column, default_out, export_ttest, read_raw, run_experiment, t_test
from .learn import AlgorithmKind, LearnerConfig
from .puzzle import (
    DEFAULT_CHAIN_LENGTH,
    VARIANTS,
    NotFound,
    StateParseError,
    bfs_solve,
    build_spec,
    canonical_key,
    hole_aliases,
    is_goal,
    parse_state,
    print_state,
    validate_state,
)

USAGE = 1
RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _chain_length(text: str):
    if text.lower() in ("none", "0"):
        return None
    return int(text)


def _puzzle_args(p, variant_default="simplified"):
    p.add_argument("--puzzle", choices=sorted(VARIANTS), default="fishermans")
    p.add_argument("--variant", default=variant_default)
    p.add_argument("--winding-limit", type=int, default=2)
    p.add_argument("--max-chain-length", type=_chain_length, default=DEFAULT_CHAIN_LENGTH, help="0 or none for no bound")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tangle_rl", description="String-and-hole puzzle learning workbench")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    run = sub.add_parser("run", help="run a multi-trial learning experiment")
    _puzzle_args(run)
    run.add_argument("--algorithm", choices=[k.value for k in AlgorithmKind], default="oasp")
    run.add_argument("--trials", type=int, default=30)
    run.add_argument("--episodes", type=int, default=6000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--alpha", type=float, default=0.2)
    run.add_argument("--gamma", type=float, default=0.9)
    run.add_argument("--eta", type=float, default=0.25)
    run.add_argument("--xi", type=float, default=1.0)
    run.add_argument("--beta", type=float, default=1.0)
    run.add_argument("--heuristic-from")
    run.add_argument("--out")
    run.add_argument("--parallel", type=int, default=1)
    run.add_argument("--switch-after", type=int)
    run.add_argument("--string-post-cap", type=int)
    run.add_argument("--probe-last", type=int, default=0)
    run.add_argument("--no-reinit", action="store_true", help="keep Q-Learning values across the switch")
    run.add_argument("--no-artifacts", action="store_true", help="skip per-trial Q-table and program files")

    solve = sub.add_parser("solve", help="shortest plan by breadth-first search")
    _puzzle_args(solve)
    solve.add_argument("--max-depth", type=int, default=20)

    tt = sub.add_parser("ttest", help="per-episode t-test between two raw CSVs")
    tt.add_argument("a")
    tt.add_argument("b")
    tt.add_argument("--column", default="steps")
    tt.add_argument("--student", action="store_true", help="pooled variance instead of Welch")
    tt.add_argument("--out")

    show = sub.add_parser("show-state", help="parse, validate and print a state")
    show.add_argument("state")
    show.add_argument("--puzzle", choices=sorted(VARIANTS), default="fishermans")
    show.add_argument("--variant", default="original")
    return parser


def _spec(args):
    if args.variant not in VARIANTS[args.puzzle]:
        raise UsageError(f"variant {args.variant!r} is not available for {args.puzzle}; choose from {', '.join(VARIANTS[args.puzzle])}")
    return build_spec(args.puzzle, args.variant, winding_limit=args.winding_limit, max_chain_length=args.max_chain_length)


def cmd_run(args) -> int:
    if args.variant not in VARIANTS[args.puzzle]:
        raise UsageError(f"variant {args.variant!r} is not available for {args.puzzle}")
    kind = AlgorithmKind(args.algorithm)
    if kind.uses_heuristic and not args.heuristic_from:
        raise UsageError(f"--algorithm {kind.value} requires --heuristic-from")
    if args.switch_after is not None and args.variant != "nonstationary-disk":
        raise UsageError("--switch-after only applies to --variant nonstationary-disk")
    try:
        learner = LearnerConfig(
            alpha=args.alpha,
            gamma=args.gamma,
            eta=args.eta,
            xi=args.xi,
            beta=args.beta,
            episodes=args.episodes,
            reinit_ql_on_switch=not args.no_reinit,
        )
        config = ExperimentConfig(
            puzzle=args.puzzle,
            variant=args.variant,
            algorithm=kind.value,
            trials=args.trials,
            episodes=args.episodes,
            seed=args.seed,
            out=args.out or default_out(),
            heuristic_from=args.heuristic_from,
            learner=learner,
            winding_limit=args.winding_limit,
            max_chain_length=args.max_chain_length,
            string_post_cap=args.string_post_cap,
            switch_after=args.switch_after,
            parallel=args.parallel,
            probe_last=args.probe_last,
            save_artifacts=not args.no_artifacts,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_experiment(config)
    steps = column(result.raw, "steps")
    tail = min(200, config.episodes)
    print(f"wrote {config.out}/raw.csv and {config.out}/aggregate.csv")
    print(f"mean steps over the last {tail} episodes: {steps[:, -tail:].mean():.2f}")
    return 0


def cmd_solve(args) -> int:
    spec = _spec(args)
    if args.max_depth < 1:
        raise UsageError("--max-depth must be >= 1")
    try:
        plan = bfs_solve(spec, args.max_depth)
    except NotFound as exc:
        print(str(exc), file=sys.stderr)
        return RUNTIME
    sys.stdout.write(plan.to_text())
    print(f"length {plan.length}")
    print(f"expanded {plan.expanded}")
    return 0


def cmd_ttest(args) -> int:
    a = read_raw(args.a)
    b = read_raw(args.b)
    try:
        ca, cb = column(a, args.column), column(b, args.column)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if ca.shape[1] != cb.shape[1]:
        raise UsageError(f"episode counts differ: {ca.shape[1]} vs {cb.shape[1]}")
    result = t_test(ca, cb, equal_var=args.student)
    text = export_ttest(result, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_show_state(args) -> int:
    if args.variant not in VARIANTS[args.puzzle]:
        raise UsageError(f"variant {args.variant!r} is not available for {args.puzzle}")
    spec = build_spec(args.puzzle, args.variant)
    state = parse_state(args.state, spec)
    validate_state(spec, state)
    print(print_state(state, hole_aliases(spec)))
    print(f"key {canonical_key(state)}")
    print(f"goal {str(is_goal(spec, state)).lower()}")
    return 0


COMMANDS = {"run": cmd_run, "solve": cmd_solve, "ttest": cmd_ttest, "show-state": cmd_show_state}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tangle_rl {args.command}: error: {exc}", file=sys.stderr)
        return USAGE
    except StateParseError as exc:
        print(f"tangle_rl {args.command}: {exc}", file=sys.stderr)
        return RUNTIME
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"tangle_rl {args.command}: {exc}", file=sys.stderr)
        return RUNTIME
