"""Experiment orchestration: run configs, CSV/JSON artifacts, verification.

The CSV contract (consumed by the plotting component) is one row per
recorded iteration per run with the exact header
``iter,gamma,gap_avg_iterate,residual_sq,oracle_calls,run_id``; bench output
prepends a ``config_id`` column.  All floats are written with 17 significant
digits, so identical configurations reproduce byte-identical files.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry as geo
from . import merit
from . import problems as prb
from . import schedules as sch
from . import solvers, verify

SOLVE_HEADER = "iter,gamma,gap_avg_iterate,residual_sq,oracle_calls,run_id"
BENCH_HEADER = "config_id," + SOLVE_HEADER

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFICATION = 4


class ConfigError(ValueError):
    """Malformed configuration; the message carries the offending field path."""


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("VIPROX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"VIPROX_THREADS: not an integer: {env!r}") from exc
    return 1


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    problem: str | dict
    algorithm: str
    geometry: str
    step: sch.StepSchedule
    averaging: sch.AveragingScheme
    T: int
    runs: int = 1
    gap_samples: int = merit.DEFAULT_GAP_SAMPLES
    seed: int = 0
    checkpoints: str = "auto"
    config_id: str = ""


def parse_run_config(obj: dict, config_id: str = "") -> RunConfig:
    def need(key):
        if key not in obj:
            raise ConfigError(f"{key}: missing required field")
        return obj[key]

    algorithm = need("algorithm")
    if algorithm not in solvers.ALGORITHMS:
        raise ConfigError(f"algorithm: unknown value {algorithm!r}")
    geometry = need("geometry")
    if geometry not in ("euclidean", "entropic"):
        raise ConfigError(f"geometry: unknown value {geometry!r}")
    try:
        step = sch.step_from_json(need("step"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"step: {exc}") from exc
    try:
        averaging = sch.averaging_from_json(obj.get("averaging", {}))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"averaging: {exc}") from exc
    T = int(need("T"))
    if T < 1:
        raise ConfigError("T: must be at least 1")
    runs = int(obj.get("runs", 1))
    if runs < 1:
        raise ConfigError("runs: must be at least 1")
    gap_samples = int(obj.get("gap_samples", merit.DEFAULT_GAP_SAMPLES))
    if gap_samples < 1:
        raise ConfigError("gap_samples: must be at least 1")
    checkpoints = obj.get("checkpoints", "auto")
    if checkpoints not in ("auto", "every", "log"):
        raise ConfigError(f"checkpoints: unknown value {checkpoints!r}")
    return RunConfig(
        problem=need("problem"),
        algorithm=algorithm,
        geometry=geometry,
        step=step,
        averaging=averaging,
        T=T,
        runs=runs,
        gap_samples=gap_samples,
        seed=int(obj.get("seed", 0)),
        checkpoints=checkpoints,
        config_id=config_id,
    )


def resolve_problem(spec: str | dict, base_dir: str | Path = ".") -> prb.ProblemInstance:
    """A problem is either a path to an instance file or an inline generator spec."""
    if isinstance(spec, str):
        path = Path(spec)
        if not path.is_absolute():
            path = Path(base_dir) / path
        if not path.exists():
            raise ConfigError(f"problem: instance file not found: {path}")
        return prb.load_instance(path)
    if isinstance(spec, dict):
        try:
            return prb.generate_instance(
                spec.get("type", ""),
                L=float(spec.get("L", 10.0)),
                sigma=float(spec.get("sigma", 0.0)),
                seed=int(spec.get("seed", 0)),
            )
        except ValueError as exc:
            raise ConfigError(f"problem: {exc}") from exc
    raise ConfigError("problem: expected a path or an inline generator object")


# ---------------------------------------------------------------------------
# solving


def _single_run(problem, cfg: RunConfig, run_id: int, estimator: merit.GapEstimator):
    geom = geo.geometry_by_name(cfg.geometry)
    cps = solvers.default_checkpoints(cfg.T, cfg.checkpoints)
    traj = solvers.run(
        problem, geom, cfg.algorithm, cfg.step, cfg.averaging, cfg.T,
        seed=cfg.seed, stream=run_id, checkpoints=cps, run_id=run_id,
    )
    gaps = estimator.gap_series(traj.y_avg, include_candidate=True)
    res_sq = merit.residual_sq_series(geom, problem.domain, problem, traj.x_pre, traj.gammas)
    return traj, gaps, res_sq


def solve_config(cfg: RunConfig, base_dir: str | Path = ".", threads: int = 1):
    """All runs of one configuration; returns (per-run results, summary dict)."""
    problem = resolve_problem(cfg.problem, base_dir)
    estimator = merit.GapEstimator.build(problem, cfg.gap_samples, seed=cfg.seed)
    run_ids = list(range(cfg.runs))
    if threads > 1 and cfg.runs > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: _single_run(problem, cfg, i, estimator), run_ids))
    else:
        results = [_single_run(problem, cfg, i, estimator) for i in run_ids]

    per_run = []
    final_gaps = []
    for traj, gaps, res_sq in results:
        final_gaps.append(float(gaps[-1]))
        per_run.append(
            {
                "run_id": traj.run_id,
                "final_gap": float(gaps[-1]),
                "min_residual_sq": float(res_sq.min()),
                "oracle_calls": int(traj.oracle_calls[-1]),
            }
        )
    summary = {
        "config_id": cfg.config_id,
        "algorithm": cfg.algorithm,
        "geometry": cfg.geometry,
        "step": sch.step_to_json(cfg.step),
        "averaging": sch.averaging_to_json(cfg.averaging),
        "T": cfg.T,
        "runs": cfg.runs,
        "gap_samples": cfg.gap_samples,
        "seed": cfg.seed,
        "per_run": per_run,
        "mean_final_gap": float(np.mean(final_gaps)),
    }
    return results, summary


def result_rows(results, config_id: str | None = None):
    """CSV rows ordered by (run_id, iter); optionally tagged with a config id."""
    rows = []
    for traj, gaps, res_sq in results:
        for i in range(len(traj.iters)):
            row = (
                f"{traj.iters[i]},{_fmt(traj.gammas[i])},{_fmt(gaps[i])},"
                f"{_fmt(res_sq[i])},{traj.oracle_calls[i]},{traj.run_id}"
            )
            rows.append(f"{config_id},{row}" if config_id is not None else row)
    return rows


def cmd_generate(kind: str, L: float, sigma: float, seed: int, out_path: str | Path) -> None:
    try:
        inst = prb.generate_instance(kind, L=L, sigma=sigma, seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    prb.save_instance(inst, out_path)


def cmd_solve(config_path: str | Path, out_path: str | Path, threads: int = 1) -> dict:
    config_path = Path(config_path)
    try:
        obj = json.loads(config_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {config_path}: {exc}") from exc
    cfg = parse_run_config(obj)
    results, summary = solve_config(cfg, base_dir=config_path.parent, threads=threads)
    out_path = Path(out_path)
    out_path.write_text("\n".join([SOLVE_HEADER] + result_rows(results)) + "\n")
    summary_path = out_path.with_suffix(".summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def cmd_bench(suite_path: str | Path, out_path: str | Path, threads: int = 1) -> list[dict]:
    suite_path = Path(suite_path)
    try:
        suite = json.loads(suite_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"suite: cannot read {suite_path}: {exc}") from exc
    entries = suite.get("configs")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("configs: suite needs a non-empty config list")
    configs = []
    seen = set()
    for i, entry in enumerate(entries):
        config_id = entry.get("id")
        if not config_id:
            raise ConfigError(f"configs[{i}].id: missing config id")
        if config_id in seen:
            raise ConfigError(f"configs[{i}].id: duplicate config id {config_id!r}")
        seen.add(config_id)
        try:
            configs.append(parse_run_config(entry, config_id=config_id))
        except ConfigError as exc:
            raise ConfigError(f"configs[{i}] ({config_id}): {exc}") from exc

    def run_entry(cfg: RunConfig):
        return solve_config(cfg, base_dir=suite_path.parent, threads=1)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run_entry, configs))
    else:
        outcomes = [run_entry(cfg) for cfg in configs]

    rows = [BENCH_HEADER]
    summaries = []
    for cfg, (results, summary) in zip(configs, outcomes):
        rows.extend(result_rows(results, config_id=cfg.config_id))
        summaries.append(summary)
    out_path = Path(out_path)
    out_path.write_text("\n".join(rows) + "\n")
    summary_path = out_path.with_suffix(".summary.json")
    summary_path.write_text(json.dumps(summaries, indent=2, sort_keys=True) + "\n")
    return summaries


def cmd_verify(seed: int = 0, out_path: str | Path | None = None) -> tuple[list[dict], int]:
    report = verify.run_suites(seed=seed)
    violations = sum(item["violations"] for item in report)
    payload = {"seed": seed, "suites": report, "total_violations": violations}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text)
    return report, violations


def cmd_gap(
    problem_path: str | Path,
    samples: int = merit.DEFAULT_GAP_SAMPLES,
    seed: int = 0,
    point: np.ndarray | None = None,
    out_path: str | Path | None = None,
) -> dict:
    """Gap estimate and divergence-bound audit for one feasible point."""
    problem = resolve_problem(str(problem_path))
    estimator = merit.GapEstimator.build(problem, samples, seed=seed)
    x = problem.domain.barycenter() if point is None else np.asarray(point, dtype=np.float64)
    if not problem.domain.contains(x, tol=1e-9):
        raise ConfigError("point: not feasible for the problem domain")
    result = {
        "point": x.tolist(),
        "n_samples": estimator.n_samples,
        "gap": estimator.gap(x),
        "gap_with_candidate": estimator.gap(x, include_candidate=True),
        "D_estimate_euclidean": estimator.estimate_D(geo.EUCLIDEAN),
        "D_estimate_entropic": estimator.estimate_D(geo.ENTROPIC),
    }
    if out_path is not None:
        Path(out_path).write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return result
