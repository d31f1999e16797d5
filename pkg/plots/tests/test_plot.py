import json
import subprocess
import sys
from pathlib import Path

import pytest

import plot

REPO_ROOT = Path(__file__).resolve().parents[2]

HEADER = "config_id,iter,gamma,gap_avg_iterate,residual_sq,oracle_calls,run_id"


def write_csv(path, rows, header=HEADER):
    path.write_text("\n".join([header] + rows) + "\n")


def synthetic_csv(path, configs=("a", "b"), runs=2, iters=10):
    rows = []
    for c_idx, config in enumerate(configs):
        for run in range(runs):
            for i in range(1, iters + 1):
                gap = (c_idx + 1.0) * (run + 1.0) / i
                rows.append(f"{config},{i},0.1,{gap},{gap * gap},{i + 1},{run}")
    write_csv(path, rows)


def test_build_curves_means_over_runs(tmp_path):
    csv_path = tmp_path / "t.csv"
    # run 0 gap = 1, run 1 gap = 3 at every iteration: mean is 2
    rows = [f"only,{i},0.1,{g},0.0,{i},{r}" for r in (0, 1) for i, g in ((1, 1.0 if r == 0 else 3.0), (2, 1.0 if r == 0 else 3.0))]
    write_csv(csv_path, rows)
    df = plot.load_table(csv_path, "gap_avg_iterate")
    curves = plot.build_curves(df, "gap_avg_iterate")
    assert len(curves) == 1
    label, iters, values = curves[0]
    assert label == "only"
    assert list(iters) == [1, 2]
    assert list(values) == [2.0, 2.0]


def test_single_config_csv_without_config_column(tmp_path):
    csv_path = tmp_path / "t.csv"
    rows = [f"{i},0.1,{1.0 / i},0.0,{i + 1},0" for i in range(1, 6)]
    write_csv(csv_path, rows, header="iter,gamma,gap_avg_iterate,residual_sq,oracle_calls,run_id")
    out = tmp_path / "fig.png"
    n = plot.render(csv_path, plot.load_spec_dict({}), out)
    assert n == 1 and out.exists()


def test_label_map_selects_and_orders(tmp_path):
    csv_path = tmp_path / "t.csv"
    synthetic_csv(csv_path, configs=("a", "b", "c"))
    df = plot.load_table(csv_path, "gap_avg_iterate")
    curves = plot.build_curves(df, "gap_avg_iterate", {"c": "PMP const.", "a": "KMP $\\gamma_t$-avg."})
    assert [c[0] for c in curves] == ["PMP const.", "KMP $\\gamma_t$-avg."]
    with pytest.raises(plot.SchemaError, match="unknown config ids"):
        plot.build_curves(df, "gap_avg_iterate", {"zzz": "missing"})


def test_residual_column_and_multi_curve_render(tmp_path):
    csv_path = tmp_path / "t.csv"
    synthetic_csv(csv_path, configs=("a", "b"))
    out = tmp_path / "fig.svg"
    spec = {"y_column": "residual_sq", "log_x": True, "log_y": True, "title": "residuals"}
    n = plot.render(csv_path, plot.load_spec_dict(spec), out)
    assert n == 2
    assert out.read_text().startswith("<?xml")


def test_empty_csv_is_schema_error(tmp_path):
    csv_path = tmp_path / "empty.csv"
    write_csv(csv_path, [])
    with pytest.raises(plot.SchemaError, match="no data rows"):
        plot.load_table(csv_path, "gap_avg_iterate")
    truly_empty = tmp_path / "zero.csv"
    truly_empty.write_text("")
    with pytest.raises(plot.SchemaError):
        plot.load_table(truly_empty, "gap_avg_iterate")


def test_missing_column_is_schema_error(tmp_path):
    csv_path = tmp_path / "bad.csv"
    csv_path.write_text("iter,run_id\n1,0\n")
    with pytest.raises(plot.SchemaError, match="gap_avg_iterate"):
        plot.load_table(csv_path, "gap_avg_iterate")


def test_bad_y_column_rejected(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({"y_column": "oracle_calls"}))
    with pytest.raises(plot.SchemaError, match="y_column"):
        plot.load_spec(spec_path)


def test_render_is_byte_deterministic(tmp_path):
    csv_path = tmp_path / "t.csv"
    synthetic_csv(csv_path)
    spec = plot.load_spec_dict({})
    out1, out2 = tmp_path / "f1.png", tmp_path / "f2.png"
    plot.render(csv_path, spec, out1)
    plot.render(csv_path, spec, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_round_trip(tmp_path):
    csv_path = tmp_path / "t.csv"
    synthetic_csv(csv_path)
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({"y_column": "gap_avg_iterate", "log_x": True, "log_y": True}))
    out = tmp_path / "fig.png"
    assert plot.main(["--csv", str(csv_path), "--spec", str(spec_path), "--out", str(out)]) == 0
    assert out.exists()
    assert plot.main(["--csv", str(tmp_path / "absent.csv"), "--spec", str(spec_path),
                      "--out", str(out)]) == 2


def test_ac11_render_bench_output_smoke(tmp_path):
    """Acceptance: the full benchmark CSV renders to one curve per config."""
    suite = json.loads((REPO_ROOT / "scripts" / "paper_suite.json").read_text())
    for cfg in suite["configs"]:
        cfg.update(T=20, runs=2, gap_samples=200)  # desk-mini sizes, same 12 configs
    mini = tmp_path / "suite.json"
    mini.write_text(json.dumps(suite))
    csv_path = tmp_path / "bench.csv"
    subprocess.run(
        [sys.executable, "-m", "viprox.cli", "bench", "--config", str(mini), "--out", str(csv_path)],
        check=True, capture_output=True,
    )
    out = tmp_path / "fig.png"
    spec = plot.load_spec_dict({"y_column": "gap_avg_iterate", "log_x": True, "log_y": True})
    n = plot.render(csv_path, spec, out)
    print(f"AC-11 plot smoke test: PASS ({n} curves from the bench CSV)")
    assert out.exists()
    assert n == len(suite["configs"])
