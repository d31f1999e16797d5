#!/usr/bin/env python3
"""Run the noisy matrix-game benchmark suite and emit the comparison CSV.

Reproduces the PMP-vs-KMP comparison (constant step, step-weighted and
inverse-step-weighted averaging, Euclidean and entropic geometries) on a
seeded random game with per-coordinate noise variance 0.4, five runs per
configuration.  The CSV feeds the plotting component; pass --plot-spec to
also write a ready-made spec file for it.
"""

import argparse
import json
from pathlib import Path

from viprox import harness

LABELS = {
    "pmp_eu_const": "PMP const.",
    "pmp_eu_gt_avg": "PMP $\\gamma_t$-avg.",
    "pmp_eu_gtinv_avg": "PMP $\\gamma_t^{-1}$-avg.",
    "kmp_eu_const": "KMP const.",
    "kmp_eu_gt_avg": "KMP $\\gamma_t$-avg.",
    "kmp_eu_gtinv_avg": "KMP $\\gamma_t^{-1}$-avg.",
    "pmp_en_const": "PMP const.",
    "pmp_en_gt_avg": "PMP $\\gamma_t$-avg.",
    "pmp_en_gtinv_avg": "PMP $\\gamma_t^{-1}$-avg.",
    "kmp_en_const": "KMP const.",
    "kmp_en_gt_avg": "KMP $\\gamma_t$-avg.",
    "kmp_en_gtinv_avg": "KMP $\\gamma_t^{-1}$-avg.",
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--suite", default=str(Path(__file__).parent / "paper_suite.json"))
    parser.add_argument("--out", default="out/matrix_game_bench.csv")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--plot-spec", default=None,
                        help="also write a plot spec JSON for the given geometry prefix (eu/en)")
    args = parser.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    threads = harness.resolve_threads(args.threads)
    summaries = harness.cmd_bench(args.suite, out, threads=threads)
    for s in summaries:
        print(f"{s['config_id']:>18s}: mean final gap {s['mean_final_gap']:.6g}")

    if args.plot_spec:
        prefix = args.plot_spec
        spec = {
            "labels": {k: v for k, v in LABELS.items() if f"_{prefix}_" in k},
            "y_column": "gap_avg_iterate",
            "log_x": True,
            "log_y": True,
            "title": f"Noisy matrix game ({'Euclidean' if prefix == 'eu' else 'Entropic'})",
        }
        spec_path = out.with_suffix(f".{prefix}.plotspec.json")
        spec_path.write_text(json.dumps(spec, indent=2) + "\n")
        print(f"wrote {spec_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
