#!/usr/bin/env python3
"""Render convergence figures from solver trajectory CSV files.

Input is the benchmark CSV with header
``config_id,iter,gamma,gap_avg_iterate,residual_sq,oracle_calls,run_id``
(or the single-configuration variant without ``config_id``).  Each curve is
the mean over runs of the chosen merit column at each recorded iteration,
optionally on log axes.  Batch mode only: one CSV and one JSON spec in, one
image out.

    python3 plot.py --csv bench.csv --spec spec.json --out figure.png

The spec object: ``labels`` (config_id -> legend label; selects and orders
the plotted configurations, default all), ``y_column``
(``gap_avg_iterate`` or ``residual_sq``), ``log_x``/``log_y`` flags,
``title``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

Y_COLUMNS = ("gap_avg_iterate", "residual_sq")

# fixed style so re-rendering the same inputs is byte-deterministic
STYLE = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
    "legend.fontsize": 9,
}


class SchemaError(ValueError):
    """CSV or spec does not match the harness output contract."""


def load_spec_dict(spec: dict) -> dict:
    y_column = spec.get("y_column", "gap_avg_iterate")
    if y_column not in Y_COLUMNS:
        raise SchemaError(f"y_column must be one of {Y_COLUMNS}, got {y_column!r}")
    return {
        "labels": spec.get("labels"),
        "y_column": y_column,
        "log_x": bool(spec.get("log_x", True)),
        "log_y": bool(spec.get("log_y", True)),
        "title": spec.get("title", ""),
    }


def load_spec(path: str | Path) -> dict:
    return load_spec_dict(json.loads(Path(path).read_text()))


def load_table(csv_path: str | Path, y_column: str) -> pd.DataFrame:
    try:
        df = pd.read_csv(csv_path)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise SchemaError(f"unreadable CSV {csv_path}: {exc}") from exc
    needed = {"iter", "run_id", y_column}
    missing = needed - set(df.columns)
    if missing:
        raise SchemaError(f"CSV {csv_path} lacks columns {sorted(missing)}")
    if df.empty:
        raise SchemaError(f"CSV {csv_path} has no data rows")
    if "config_id" not in df.columns:
        df = df.assign(config_id="run")
    return df


def build_curves(df: pd.DataFrame, y_column: str, labels: dict | None = None):
    """Mean-over-runs series per configuration: [(label, iters, values)]."""
    if labels:
        ids = list(labels)
        known = set(df["config_id"].unique())
        unknown = [i for i in ids if i not in known]
        if unknown:
            raise SchemaError(f"labels reference unknown config ids {unknown}")
    else:
        ids = sorted(df["config_id"].unique())
        labels = {i: i for i in ids}
    curves = []
    for config_id in ids:
        block = df[df["config_id"] == config_id]
        mean = block.groupby("iter")[y_column].mean().sort_index()
        curves.append((labels[config_id], mean.index.to_numpy(), mean.to_numpy()))
    return curves


def render(csv_path: str | Path, spec: dict, out_path: str | Path) -> int:
    """Draw the configured curves and write the image; returns the curve count."""
    df = load_table(csv_path, spec["y_column"])
    curves = build_curves(df, spec["y_column"], spec.get("labels"))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, iters, values in curves:
            ax.plot(iters, values, label=label)
        if spec.get("log_x", True):
            ax.set_xscale("log")
        if spec.get("log_y", True):
            ax.set_yscale("log")
        ax.set_xlabel("iteration")
        ax.set_ylabel(spec["y_column"].replace("_", " "))
        if spec.get("title"):
            ax.set_title(spec["title"])
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_path)
        plt.close(fig)
    return len(curves)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render convergence curves from a trajectory CSV")
    parser.add_argument("--csv", required=True)
    parser.add_argument("--spec", required=True, help="JSON plot spec")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
        count = render(args.csv, spec, args.out)
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} ({count} curves)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
