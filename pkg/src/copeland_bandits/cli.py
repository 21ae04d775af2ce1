"""Command-line interface.

Subcommands: ``run <config.json>``, ``analyze condorcet|stats|gaps|overlap``,
``bounds <matrix.csv>`` and ``winners <matrix.csv>``.  Exit codes: 0 on
success, 1 on configuration errors, 2 on runtime errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import _kernels, bounds as bounds_mod
from .harness import (
    ConfigError,
    ExperimentConfig,
    condorcet_probability,
    gap_ratio,
    parse_matrix_source,
    run_experiment,
    structure_stats,
    winner_overlap,
)
from .prefmat import (
    MatrixError,
    copeland_scores,
    copeland_winners,
    borda_winners,
    is_condorcet,
    load_matrix,
    random_walk_winners,
)


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_run(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        config = ExperimentConfig(
            matrix=config.matrix,
            algorithms=config.algorithms,
            horizon=config.horizon,
            replicates=config.replicates,
            seed=args.seed,
            checkpoint_ratio=config.checkpoint_ratio,
            output=config.output,
        )
    traces = run_experiment(config, threads=args.threads)
    finals = {}
    for t in traces:
        finals.setdefault(t.algorithm, []).append(t.final_regret)
    for alg in sorted(finals):
        vals = finals[alg]
        print(
            f"{alg}: {len(vals)} replicate(s), "
            f"mean final regret {sum(vals) / len(vals):.6g}"
        )
    if config.output is not None:
        print(f"traces written to {config.output}")
    return 0


def cmd_analyze(args) -> int:
    if args.what == "overlap":
        masters = [parse_matrix_source(m) for m in args.matrix]
        _emit({"overlapPercent": winner_overlap(masters)}, args.output)
        return 0
    master = parse_matrix_source(args.matrix[0])
    k = args.k or master.K
    if args.what == "condorcet":
        est = condorcet_probability(master, k, args.samples, args.seed)
        _emit(
            {"K": k, "samples": args.samples, "condorcetProbability": est},
            args.output,
        )
    elif args.what == "stats":
        st = structure_stats(master, k, args.samples, args.seed)
        _emit(
            {
                "K": k,
                "samples": st.n_samples,
                "skippedTies": st.skipped_ties,
                "winnerCount": {str(c): n for c, n in sorted(st.c_hist.items())},
                "winnerLosses": {str(c): n for c, n in sorted(st.l_c_hist.items())},
            },
            args.output,
        )
    elif args.what == "gaps":
        gr = gap_ratio(master, k, args.samples, args.seed)
        _emit(
            {
                "K": k,
                "used": gr.n_used,
                "skipped": gr.skipped,
                "meanGapRatioSquared": gr.mean_ratio,
            },
            args.output,
        )
    else:
        raise ConfigError(f"unknown analysis {args.what!r}")
    return 0


def cmd_bounds(args) -> int:
    matrix = load_matrix(args.matrix)
    report = bounds_mod.bound_report(matrix, args.alpha, args.delta, args.horizon)
    text = report.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(
        f"ccb bound at T={args.horizon:g}: {report.ccb_bound:.6g}"
        f" (vacuous: {report.vacuous}); scb shape: {report.scb_bound_shape:.6g}",
        file=sys.stderr,
    )
    return 0


def cmd_winners(args) -> int:
    matrix = load_matrix(args.matrix)
    cond = is_condorcet(matrix)
    _emit(
        {
            "copelandScores": copeland_scores(matrix).tolist(),
            "copelandWinners": sorted(copeland_winners(matrix)),
            "bordaWinners": sorted(borda_winners(matrix)),
            "randomWalkWinners": sorted(random_walk_winners(matrix)),
            "condorcetWinner": cond,
        },
        args.output,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copeland-bandits",
        description=(
            "Copeland dueling-bandit simulator "
            f"(backend: {_kernels.backend_name()})"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", help="sampling analyses on a master matrix")
    p_an.add_argument("what", choices=["condorcet", "stats", "gaps", "overlap"])
    p_an.add_argument(
        "--matrix",
        action="append",
        required=True,
        help="matrix source (fixture, file, cyclic(K,g), random(K,m,seed)); "
        "repeatable for overlap",
    )
    p_an.add_argument("--k", type=int, default=None, help="subset size")
    p_an.add_argument("--samples", type=int, default=1000)
    p_an.add_argument("--seed", type=int, default=0)
    p_an.add_argument("--output", default=None)
    p_an.set_defaults(func=cmd_analyze)

    p_b = sub.add_parser("bounds", help="bound report for a matrix CSV")
    p_b.add_argument("matrix")
    p_b.add_argument("--alpha", type=float, required=True)
    p_b.add_argument("--delta", type=float, required=True)
    p_b.add_argument("--horizon", type=float, required=True)
    p_b.add_argument("--output", default=None)
    p_b.set_defaults(func=cmd_bounds)

    p_w = sub.add_parser("winners", help="winner sets of a matrix CSV")
    p_w.add_argument("matrix")
    p_w.add_argument("--output", default=None)
    p_w.set_defaults(func=cmd_winners)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MatrixError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
