"""Mirror-prox iterations.

Two update rules over a Bregman geometry:

* Popov: reuse the previous leading-iterate mapping value, so each
  iteration costs one fresh mapping evaluation,

      y_{t+1} = prox(x_t, gamma_t * g_t),   g_t cached from step t-1
      x_{t+1} = prox(x_t, gamma_t * g_{t+1}),  g_{t+1} evaluated at y_{t+1}

* Korpelevich: evaluate at both the base and the leading iterate, two
  evaluations per iteration.

The stochastic variants draw one Gaussian mapping sample per evaluation;
with sigma = 0 they coincide with the deterministic path exactly because
no noise is drawn.  Oracle-call accounting is exact: Popov makes T + 1
evaluations over T iterations (one at initialization), Korpelevich 2T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import schedules as sch
from .geometry import _bisect_rows
from .rng import Rng

ALGORITHMS = ("popov_stochastic", "popov_deterministic", "korpelevich")

FEASIBILITY_TOL = 1e-9


@dataclass
class SolverState:
    problem: object
    geometry: geo.BregmanGeometry
    algorithm: str
    t: int
    x: np.ndarray
    y: np.ndarray
    cached_map: np.ndarray | None
    oracle_calls: int
    rng: Rng


def _evaluate(state: SolverState, point: np.ndarray) -> np.ndarray:
    state.oracle_calls += 1
    if state.algorithm == "popov_deterministic":
        return state.problem.map(point)
    return state.problem.sample(point, state.rng).value


def init(
    problem,
    geometry: geo.BregmanGeometry,
    algorithm: str,
    seed: int,
    stream: int = 0,
    start: str = "barycenter",
) -> SolverState:
    """Fresh solver state with y0 = x0 and, for Popov, the cached evaluation."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    domain = problem.domain
    if geometry.kind == "entropic" and not isinstance(domain, geo.SimplexProduct):
        raise geo.DomainMismatchError("entropic geometry needs a simplex-product domain")
    rng = Rng(seed, stream=stream)
    if start == "barycenter":
        x0 = domain.barycenter()
    elif start == "random":
        x0 = geo.random_point(domain, rng)
    else:
        raise ValueError(f"unknown start rule {start!r}")
    state = SolverState(
        problem=problem,
        geometry=geometry,
        algorithm=algorithm,
        t=0,
        x=x0,
        y=x0.copy(),
        cached_map=None,
        oracle_calls=0,
        rng=rng,
    )
    if algorithm.startswith("popov"):
        state.cached_map = _evaluate(state, state.y)
    return state


def _check_feasible(state: SolverState, z: np.ndarray) -> np.ndarray:
    if not state.problem.domain.contains(z, tol=FEASIBILITY_TOL):
        raise geo.NumericError("iterate left the feasible set")
    return z


def popov_step(state: SolverState, gamma_t: float) -> SolverState:
    """One Popov iteration; exactly one fresh mapping evaluation."""
    domain = state.problem.domain
    y_next = geo.prox_map(state.geometry, domain, state.x, gamma_t * state.cached_map)
    fresh = _evaluate(state, y_next)
    x_next = geo.prox_map(state.geometry, domain, state.x, gamma_t * fresh)
    state.y = _check_feasible(state, y_next)
    state.x = _check_feasible(state, x_next)
    state.cached_map = fresh
    state.t += 1
    return state


def korpelevich_step(state: SolverState, gamma_t: float) -> SolverState:
    """One extragradient iteration; two mapping evaluations."""
    domain = state.problem.domain
    g_base = _evaluate(state, state.x)
    y_next = geo.prox_map(state.geometry, domain, state.x, gamma_t * g_base)
    g_lead = _evaluate(state, y_next)
    x_next = geo.prox_map(state.geometry, domain, state.x, gamma_t * g_lead)
    state.y = _check_feasible(state, y_next)
    state.x = _check_feasible(state, x_next)
    state.cached_map = g_lead
    state.t += 1
    return state


def step(state: SolverState, gamma_t: float) -> SolverState:
    if state.algorithm == "korpelevich":
        return korpelevich_step(state, gamma_t)
    return popov_step(state, gamma_t)


# ---------------------------------------------------------------------------
# full runs


@dataclass
class Trajectory:
    """Checkpointed records of one run.

    Row i describes iteration ``iters[i]`` = t+1: the step size gamma_t it
    used, the pre-step main iterate x_t (residuals are evaluated there), the
    leading iterate y_{t+1}, the weighted average over the configured window
    ending at t, and the cumulative oracle-call count.
    """

    iters: np.ndarray
    gammas: np.ndarray
    y: np.ndarray
    y_avg: np.ndarray
    x_pre: np.ndarray
    oracle_calls: np.ndarray
    x0: np.ndarray
    x_final: np.ndarray
    T: int
    run_id: int = 0


def default_checkpoints(T: int, policy: str = "auto", count: int = 200) -> np.ndarray:
    """All iterations up to 1000, otherwise ``count`` log-spaced ones."""
    if policy == "every" or (policy == "auto" and T <= 1000):
        return np.arange(1, T + 1)
    grid = np.unique(np.round(np.logspace(0.0, np.log10(T), count)).astype(int))
    return grid[(grid >= 1) & (grid <= T)]


def run(
    problem,
    geometry: geo.BregmanGeometry,
    algorithm: str,
    schedule: sch.StepSchedule,
    averaging: sch.AveragingScheme,
    T: int,
    seed: int,
    stream: int = 0,
    checkpoints: np.ndarray | None = None,
    start: str = "barycenter",
    run_id: int = 0,
) -> Trajectory:
    """Execute T steps, maintaining the running weighted average online.

    With a zero window the average is a single accumulator; with the half
    window the average at step t spans tau = floor(t/2)..t, realized through
    prefix sums so the recorded curve is well defined at every checkpoint and
    matches the half-horizon average at the final iteration.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    horizon = T - 1
    if checkpoints is None:
        checkpoints = default_checkpoints(T)
    checkpoints = np.asarray(checkpoints, dtype=int)
    marks = set(int(i) for i in checkpoints)

    state = init(problem, geometry, algorithm, seed, stream=stream, start=start)
    x0 = state.x.copy()
    d = x0.shape[0]

    half = averaging.window == "half"
    if half:
        cum_w = np.zeros(T + 1)
        cum_s = np.zeros((T + 1, d))
    acc_w = 0.0
    acc_s = np.zeros(d)

    rec = {k: [] for k in ("iters", "gammas", "y", "y_avg", "x_pre", "oracle_calls")}
    for t in range(T):
        g_t = sch.gamma(schedule, t, horizon)
        x_pre = state.x
        step(state, g_t)
        w = sch.weight(averaging, schedule, t, horizon)
        if half:
            cum_w[t + 1] = cum_w[t] + w
            cum_s[t + 1] = cum_s[t] + w * state.y
        else:
            acc_w += w
            acc_s = acc_s + w * state.y
        if (t + 1) in marks:
            if half:
                j = sch.window_start(averaging, t)
                avg = (cum_s[t + 1] - cum_s[j]) / (cum_w[t + 1] - cum_w[j])
            else:
                avg = acc_s / acc_w
            rec["iters"].append(t + 1)
            rec["gammas"].append(g_t)
            rec["y"].append(state.y.copy())
            rec["y_avg"].append(avg)
            rec["x_pre"].append(x_pre)
            rec["oracle_calls"].append(state.oracle_calls)

    return Trajectory(
        iters=np.array(rec["iters"], dtype=int),
        gammas=np.array(rec["gammas"]),
        y=np.array(rec["y"]),
        y_avg=np.array(rec["y_avg"]),
        x_pre=np.array(rec["x_pre"]),
        oracle_calls=np.array(rec["oracle_calls"], dtype=int),
        x0=x0,
        x_final=state.x.copy(),
        T=T,
        run_id=run_id,
    )


# ---------------------------------------------------------------------------
# high-accuracy reference solutions (deterministic Popov, Euclidean geometry)


def _popov_reference_py(J, r, x0, gamma, iters, k, n):
    x = x0.copy()
    g = J @ x + r
    for _ in range(iters):
        v = (x - gamma * g).reshape(k, n)
        y = _bisect_rows(v, 1e-10, 200).reshape(k * n)
        g = J @ y + r
        v = (x - gamma * g).reshape(k, n)
        x = _bisect_rows(v, 1e-10, 200).reshape(k * n)
    return x


try:
    from numba import njit

    _popov_reference = njit(cache=True)(_popov_reference_py)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _popov_reference = _popov_reference_py


def reference_solution(inst, gamma: float, iters: int = 10**6) -> np.ndarray:
    """Long deterministic Popov run from the barycenter at a fixed step size.

    Intended to approximate a solution point on affine simplex-product
    problems; callers must gate on a residual check before trusting it.
    """
    domain = inst.domain
    x0 = domain.barycenter()
    J = np.ascontiguousarray(inst.jacobian)
    r = np.ascontiguousarray(inst.offset)
    return _popov_reference(J, r, x0, float(gamma), int(iters), domain.k, domain.n)
