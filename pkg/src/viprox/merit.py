"""Merit functions: sampled dual gap and prox residual.

The dual gap sup_{z in X} <F(z), x - z> is estimated from below by a fixed
set of uniformly sampled feasible points; F(z) and <F(z), z> are precomputed
once so a whole trajectory of candidates is a single matrix product.  With
``include_candidate`` the candidate itself joins the sample set, which pins
the estimate at >= 0.

The residual R_gamma(x) = (x - prox(x, gamma F(x))) / gamma needs no
sampling and vanishes exactly at solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from . import schedules as sch
from . import solvers
from .rng import Rng

GAP_SAMPLE_STREAM = 0x6A70  # reserved stream id, clear of per-run noise streams
DEFAULT_GAP_SAMPLES = 20_000


@dataclass(frozen=True)
class GapEstimator:
    z: np.ndarray  # (N, d) feasible sample points
    fz: np.ndarray  # (N, d) deterministic mapping at the samples
    offset: np.ndarray  # (N,) <F(z), z>

    @classmethod
    def build(cls, problem, n_samples: int = DEFAULT_GAP_SAMPLES, seed: int = 0) -> "GapEstimator":
        if n_samples < 1:
            raise ValueError("need at least one gap sample")
        domain = problem.domain
        rng = Rng(seed, stream=GAP_SAMPLE_STREAM)
        z = geo.sample_simplex_product(rng, domain.k, domain.n, n_samples)
        return cls.from_points(problem, z)

    @classmethod
    def from_points(cls, problem, z: np.ndarray) -> "GapEstimator":
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2 or z.shape[0] < 1:
            raise ValueError("sample set must be a non-empty (N, d) array")
        fz = problem.map_batch(z)
        return cls(z=z, fz=fz, offset=np.einsum("ij,ij->i", fz, z))

    @property
    def n_samples(self) -> int:
        return self.z.shape[0]

    def with_extra_points(self, problem, extra: np.ndarray) -> "GapEstimator":
        extra = np.atleast_2d(np.asarray(extra, dtype=np.float64))
        return GapEstimator.from_points(problem, np.vstack([self.z, extra]))

    def gap(self, x: np.ndarray, include_candidate: bool = False) -> float:
        return float(self.gap_series(np.asarray(x)[None, :], include_candidate)[0])

    def gap_series(self, X: np.ndarray, include_candidate: bool = False) -> np.ndarray:
        """Gap estimates for each row of X: max_j <F(z_j), x - z_j>."""
        X = np.asarray(X, dtype=np.float64)
        values = (self.fz @ X.T - self.offset[:, None]).max(axis=0)
        if include_candidate:
            # the candidate contributes <F(x), x - x> = 0
            values = np.maximum(values, 0.0)
        return values

    def estimate_D(self, geometry: geo.BregmanGeometry, max_points: int = 1024) -> float:
        """Largest pairwise divergence over (a prefix of) the sample set."""
        pts = self.z[: min(self.n_samples, max_points)]
        if geometry.kind == "euclidean":
            sq = np.sum(pts**2, axis=1)
            pair = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
            return 0.5 * float(pair.max())
        logp = np.log(np.maximum(pts, geometry.boundary_floor))
        self_term = np.sum(pts * logp, axis=1)
        cross = pts @ logp.T
        return float((self_term[:, None] - cross).max())


def dual_gap(estimator: GapEstimator, x: np.ndarray, include_candidate: bool = False) -> float:
    return estimator.gap(x, include_candidate)


# ---------------------------------------------------------------------------
# residuals


def residual(
    geometry: geo.BregmanGeometry, domain, map_fn, x: np.ndarray, gamma: float
) -> np.ndarray:
    """R_gamma(x) = (x - prox(x, gamma F(x))) / gamma."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=np.float64)
    moved = geo.prox_map(geometry, domain, x, gamma * map_fn(x))
    return (x - moved) / gamma


def residual_norm_sq(
    geometry: geo.BregmanGeometry, domain, map_fn, x: np.ndarray, gamma: float
) -> float:
    r = residual(geometry, domain, map_fn, x, gamma)
    return float(r @ r)


def residual_sq_series(
    geometry: geo.BregmanGeometry, domain, problem, X: np.ndarray, gammas: np.ndarray
) -> np.ndarray:
    """Batched squared residual norms at points X[i] with step sizes gammas[i]."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    gammas = np.asarray(gammas, dtype=np.float64)
    F = problem.map_batch(X)
    moved = geo.prox_map_rows(geometry, domain, X, gammas[:, None] * F)
    R = (X - moved) / gammas[:, None]
    return np.einsum("ij,ij->i", R, R)


def min_residual_sq(
    trajectory: solvers.Trajectory, problem, geometry: geo.BregmanGeometry,
) -> float:
    """Running minimum of ||R_{gamma_t}(x_t)||^2 over the recorded iterations."""
    series = residual_sq_series(
        geometry, problem.domain, problem, trajectory.x_pre, trajectory.gammas
    )
    return float(series.min())


# ---------------------------------------------------------------------------
# expectation over repeated runs


def expected_dual_gap(
    problem,
    geometry: geo.BregmanGeometry,
    algorithm: str,
    schedule: sch.StepSchedule,
    averaging: sch.AveragingScheme,
    T: int,
    runs: int,
    seed: int,
    estimator: GapEstimator,
    checkpoints: np.ndarray | None = None,
    include_candidate: bool = True,
):
    """Mean over independent runs of the sampled gap at the averaged iterates.

    Run j uses noise stream j of the solver seed.  Returns (iters, mean_gaps).
    """
    if runs < 1:
        raise ValueError("need at least one run")
    total = None
    iters = None
    for run_id in range(runs):
        traj = solvers.run(
            problem, geometry, algorithm, schedule, averaging, T,
            seed=seed, stream=run_id, checkpoints=checkpoints, run_id=run_id,
        )
        gaps = estimator.gap_series(traj.y_avg, include_candidate=include_candidate)
        total = gaps if total is None else total + gaps
        iters = traj.iters
    return iters, total / runs
