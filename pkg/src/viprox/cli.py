"""Command-line entry point.

Subcommands: generate, solve, bench, verify, gap.  Exit codes: 0 success,
2 configuration error, 3 numeric failure, 4 verification violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness
from .geometry import NumericError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viprox",
        description="Mirror-prox solvers and benchmarks for variational inequalities",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: VIPROX_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a problem instance file")
    gen.add_argument("--type", required=True, choices=["matrix_game", "piecewise_quad"])
    gen.add_argument("--L", type=float, default=10.0, help="Lipschitz bound (matrix game)")
    gen.add_argument("--sigma", type=float, default=0.0, help="per-coordinate noise variance")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    solve = sub.add_parser("solve", help="run one configuration, emit trajectory CSV")
    solve.add_argument("--config", required=True)
    solve.add_argument("--out", required=True)

    bench = sub.add_parser("bench", help="run a suite of configurations")
    bench.add_argument("--config", required=True, help="suite JSON file")
    bench.add_argument("--out", required=True)

    ver = sub.add_parser("verify", help="run the numeric lemma suites")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", default=None)

    gap = sub.add_parser("gap", help="estimate the dual gap of a point")
    gap.add_argument("--problem", required=True)
    gap.add_argument("--samples", type=int, default=20000)
    gap.add_argument("--seed", type=int, default=0)
    gap.add_argument("--point", default=None, help="comma-separated coordinates")
    gap.add_argument("--out", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        threads = harness.resolve_threads(args.threads)
        if args.command == "generate":
            harness.cmd_generate(args.type, args.L, args.sigma, args.seed, args.out)
            print(f"wrote {args.out}")
        elif args.command == "solve":
            summary = harness.cmd_solve(args.config, args.out, threads=threads)
            print(f"wrote {args.out} (mean final gap {summary['mean_final_gap']:.6g})")
        elif args.command == "bench":
            summaries = harness.cmd_bench(args.config, args.out, threads=threads)
            print(f"wrote {args.out} ({len(summaries)} configs)")
        elif args.command == "verify":
            report, violations = harness.cmd_verify(seed=args.seed, out_path=args.out)
            for item in report:
                print(f"{item['lemma_id']}: draws={item['draws']} violations={item['violations']}")
            if violations:
                print(f"FAILED: {violations} violations", file=sys.stderr)
                return harness.EXIT_VERIFICATION
            print("all lemma suites passed")
        elif args.command == "gap":
            point = None
            if args.point is not None:
                point = np.array([float(v) for v in args.point.split(",")])
            result = harness.cmd_gap(
                args.problem, samples=args.samples, seed=args.seed,
                point=point, out_path=args.out,
            )
            print(json.dumps(result, indent=2, sort_keys=True))
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return harness.EXIT_NUMERIC
    return harness.EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
