"""Executable numeric oracles for the step-size lemmas and rate constants.

Every analytical inequality the solvers rely on is restated here as a
checkable computation: exact partial sums against their closed-form bounds,
the max-value identity for q d^nu - s d, the constants entering the
stochastic and deterministic rate bounds, and the bounds themselves.  The
property suites draw random parameters and count violations; a run with
zero violations is the desk-scale certificate that the implementation and
the analysis agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from . import schedules as sch
from .rng import Rng

_REL_SLACK = 1e-12  # absorbs roundoff in exact-sum comparisons


@dataclass(frozen=True)
class TheoremConstants:
    alpha: float = 1.0
    r: float = 0.5
    w5: float = 2.0
    nu: float = 1.0
    L_nu: float = 1.0
    M_nu: float = 0.0
    sigma: float = 0.0  # noise scale: E||F_hat - F||^2 <= sigma^2
    D: float = 0.0  # bound on max Bregman divergence over the domain

    def __post_init__(self):
        if not 0 <= self.r < 1:
            raise ValueError("r must lie in [0, 1)")
        if self.w5 <= 1:
            raise ValueError("w5 must exceed 1")
        if self.alpha <= 0 or self.L_nu <= 0:
            raise ValueError("alpha and L_nu must be positive")
        if self.nu < 0 or self.M_nu < 0 or self.sigma < 0 or self.D < 0:
            raise ValueError("nu, M_nu, sigma, D must be non-negative")


# ---------------------------------------------------------------------------
# step-size sum lemmas


def step_sum_bounds_sqrt(c: float, T: int, log_const: float = 6.0) -> dict:
    """Sums of gamma_t = c/sqrt(t+1) over the back half window t = floor(T/2)..T.

    Returns the exact sums next to their proven bounds: the squared sum is at
    most c^2 ln(6) and the plain sum at least c sqrt(T+1)/2.  ``log_const``
    exists so tests can inject a deliberately wrong bound.
    """
    if T < 1 or c <= 0:
        raise ValueError("need T >= 1 and c > 0")
    t = np.arange(T // 2, T + 1, dtype=np.float64)
    sum_sq = float(np.sum(c**2 / (t + 1)))
    sum_lin = float(np.sum(c / np.sqrt(t + 1)))
    bound_sq = c**2 * math.log(log_const)
    bound_sum = c * math.sqrt(T + 1) / 2.0
    return {
        "sum_sq": sum_sq,
        "sum": sum_lin,
        "bound_sq": bound_sq,
        "bound_sum": bound_sum,
        "sq_ok": sum_sq <= bound_sq * (1 + _REL_SLACK),
        "sum_ok": sum_lin >= bound_sum * (1 - _REL_SLACK),
    }


def _branch_bound(c: float, a: float, exponent: float, T: int) -> float:
    """Upper bound on sum_{t=0}^T (c/(t+1)^a)^exponent, exponent = 2/(1-p) or 2p/(1-p).

    Subcritical decay (a * exponent < 1) admits the pure integral form; at
    and above the critical exponent the t = 0 term dominates the integral
    and must be carried explicitly (first term plus integral comparison).
    """
    thresh = 1.0 / exponent
    ce = c**exponent
    if a < thresh:
        power = 1.0 - a * exponent
        return ce / power * (T + 2) ** power
    if a == thresh:
        return ce * (1.0 + math.log(T + 1))
    return ce * (a * exponent) / (a * exponent - 1.0)


def power_step_sum_bounds(c: float, a: float, p: float, T: int) -> dict:
    """Exact sums of gamma_t = c/(t+1)^a against the five closed-form bounds.

    Parts: (i) lower bound on sum gamma_t; (ii) upper bound on
    sum gamma_t^{2/(1-p)} for p in [0,1); (iii) upper bound on
    sum gamma_t^{2p/(1-p)} for p in (0,1); (iv) lower bound on sum 1/gamma_t;
    (v) lower bound on sum gamma_t^2 for a < 1/2.  Parts whose parameter
    regime does not apply are reported as skipped.
    """
    if c <= 0 or not 0 < a < 1 or not 0 <= p < 1 or T < 0:
        raise ValueError("need c > 0, a in (0,1), p in [0,1), T >= 0")
    t = np.arange(0, T + 1, dtype=np.float64)
    g = c / (t + 1) ** a
    parts = {}

    sum_g = float(g.sum())
    parts["i"] = {
        "sum": sum_g,
        "bound": c * (T + 1) ** (1 - a),
        "direction": "lower",
        "holds": sum_g >= c * (T + 1) ** (1 - a) * (1 - _REL_SLACK),
    }

    e2 = 2.0 / (1.0 - p)
    s2 = float(np.sum(g**e2))
    b2 = _branch_bound(c, a, e2, T)
    parts["ii"] = {
        "sum": s2, "bound": b2, "direction": "upper",
        "holds": s2 <= b2 * (1 + _REL_SLACK),
    }

    if p > 0:
        e3 = 2.0 * p / (1.0 - p)
        s3 = float(np.sum(g**e3))
        b3 = _branch_bound(c, a, e3, T)
        parts["iii"] = {
            "sum": s3, "bound": b3, "direction": "upper",
            "holds": s3 <= b3 * (1 + _REL_SLACK),
        }
    else:
        parts["iii"] = {"skipped": "needs p > 0"}

    s4 = float(np.sum(1.0 / g))
    b4 = T ** (1 + a) / (c * (1 + a))
    parts["iv"] = {
        "sum": s4, "bound": b4, "direction": "lower",
        "holds": s4 >= b4 * (1 - _REL_SLACK),
    }

    if a < 0.5:
        s5 = float(np.sum(g**2))
        b5 = c**2 * (T + 1) ** (1 - 2 * a)
        parts["v"] = {
            "sum": s5, "bound": b5, "direction": "lower",
            "holds": s5 >= b5 * (1 - _REL_SLACK),
        }
    else:
        parts["v"] = {"skipped": "needs a < 1/2"}

    return parts


def max_value_lemma(q: float, s: float, nu: float) -> float:
    """max_{d >= 0} of q d^nu - s d, attained at d = (q nu / s)^{1/(1-nu)}."""
    if q < 0 or s <= 0:
        raise ValueError("need q >= 0 and s > 0")
    if not 0 < nu < 1:
        raise ValueError("nu must lie in (0, 1)")
    return (1 - nu) * (q * nu**nu / s**nu) ** (1.0 / (1.0 - nu))


def max_value_argmax(q: float, s: float, nu: float) -> float:
    return (q * nu / s) ** (1.0 / (1.0 - nu))


# ---------------------------------------------------------------------------
# rate constants and bounds


def theorem_constants(tc: TheoremConstants) -> dict:
    """The four rate constants; the residual constants need nu in (0, 1)."""
    a, nu, L, M, sig, D = tc.alpha, tc.nu, tc.L_nu, tc.M_nu, tc.sigma, tc.D
    if nu > 0:
        d_hat = 2 ** (2 + nu) * L**2 * D**nu / a ** (1 + nu) + (
            17 * sig**2 + 16 * M**2
        ) / (2 * a)
        d_bar = 3 * 2**nu * L**2 * D**nu / a ** (1 + nu) + 6 * M**2 / a
    else:
        d_hat = (9 * sig**2 + 2 * (L + M) ** 2) / (2 * a)
        d_bar = (L + M) ** 2 / (2 * a)
    out = {"D_hat": d_hat, "D_bar": d_bar, "C_hat": None, "C_tilde": None}
    if 0 < nu < 1:
        base = L**2 * nu**nu / a ** (1 + nu)
        ex = 1.0 / (1.0 - nu)
        out["C_hat"] = (1 - nu) * (
            (2 ** (1 + 2 * nu) * base) ** ex + (2 ** (1 + nu) * base) ** ex
        )
        out["C_tilde"] = (1 - nu) * (
            (2 ** (2 * nu - 1) * L**2 * (tc.r * (tc.w5 - 1) * a + 4) * nu**nu / a ** (1 + nu)) ** ex
            + (2 ** (1 + nu) * base / (1 - tc.r) ** nu) ** ex
        )
    return out


def c_hat(tc: TheoremConstants) -> float:
    if not 0 < tc.nu < 1:
        raise ValueError("C_hat is defined for nu in (0, 1) only")
    return theorem_constants(tc)["C_hat"]


def c_tilde(tc: TheoremConstants) -> float:
    if not 0 < tc.nu < 1:
        raise ValueError("C_tilde is defined for nu in (0, 1) only")
    return theorem_constants(tc)["C_tilde"]


def rate_bound_stochastic(
    tc: TheoremConstants,
    schedule: sch.StepSchedule,
    averaging: sch.AveragingScheme,
    T: int,
) -> float:
    """Expected-dual-gap bound matching the (schedule, averaging) regime.

    T is the last step index of the run (a run of n steps has T = n - 1).
    """
    d_hat = theorem_constants(tc)["D_hat"]
    D, c = tc.D, schedule.c

    if schedule.kind == "constant_horizon":
        if averaging.window != "zero" or averaging.weights == "inverse_step":
            raise ValueError("constant-horizon bound needs plain averaging from 0")
        if schedule.a != 0.5:
            raise ValueError("constant-horizon bound is stated for a = 1/2")
        return (2 * D + c**2 * d_hat) / (c * math.sqrt(T + 1))

    if schedule.kind != "power":
        raise ValueError(f"no stochastic bound for schedule kind {schedule.kind!r}")
    a = schedule.a

    if averaging.weights == "step" and averaging.window == "half":
        if a != 0.5:
            raise ValueError("half-window bound is stated for a = 1/2")
        if T < 1:
            raise ValueError("half-window bound needs T >= 1")
        return (4 * D + 2 * d_hat * c**2 * math.log(6.0)) / (c * math.sqrt(T + 1))

    if averaging.weights == "step" and averaging.window == "zero":
        lead = 2 * D / (c * (T + 1) ** (1 - a))
        if a < 0.5:
            return lead + d_hat * c * 2 ** (1 - 2 * a) / ((1 - 2 * a) * (T + 1) ** a)
        if a == 0.5:
            return lead + d_hat * c * math.log(T + 2) / (T + 1) ** (1 - a)
        return lead + d_hat * c / ((2 * a - 1) * (T + 1) ** (1 - a))

    if averaging.weights == "inverse_step" and averaging.window == "zero":
        if T < 1:
            raise ValueError("inverse-weight bound needs T >= 1")
        return 2 * 4**a * (1 + a) * D / (c * T ** (1 - a)) + 2 * d_hat * c * (1 + a) / T**a

    raise ValueError("no stochastic bound matches this configuration")


def residual_bound_lipschitz(
    tc: TheoremConstants, gamma: float, T: int, bpsi_x0: float
) -> float:
    """Bound on min_{t <= T} ||R_gamma(x_t)||^2 for Lipschitz mappings at a capped constant step."""
    cap = sch.lipschitz_cap(tc.alpha, tc.L_nu, tc.r, tc.w5)
    if gamma > cap * (1 + 1e-12):
        raise ValueError(f"gamma {gamma} exceeds the admissible cap {cap}")
    if bpsi_x0 < 0 or T < 0:
        raise ValueError("need bpsi_x0 >= 0 and T >= 0")
    factor = 0.5 * tc.alpha * tc.r * (1 - 1 / tc.w5)
    return bpsi_x0 / (factor * gamma**2 * (T + 1))


def optimal_c(f1: float, f3: float, f2_over_f4_ratio: float) -> float:
    """Step-size constant minimizing f1/(c f2) + f3 c / f4."""
    if f1 <= 0 or f3 <= 0 or f2_over_f4_ratio <= 0:
        raise ValueError("all inputs must be positive")
    return math.sqrt(f1 / f3 / f2_over_f4_ratio)


# ---------------------------------------------------------------------------
# exact gap oracle for matrix games (test support)


def exact_matrix_game_gap(inst, x: np.ndarray) -> float:
    """Exact sup_z <F(z), x - z> over the product of two 2-point simplices.

    The objective is concave and quadratic in the two free coordinates, so
    the maximum over the unit square is attained at a corner, an edge
    critical point, or the interior critical point; all are enumerated.
    """
    x = np.asarray(x, dtype=np.float64)
    z0 = np.array([0.0, 1.0, 0.0, 1.0])
    e1 = np.array([1.0, -1.0, 0.0, 0.0])
    e2 = np.array([0.0, 0.0, 1.0, -1.0])

    def h(s: float, u: float) -> float:
        z = z0 + s * e1 + u * e2
        return float((inst.jacobian @ z + inst.offset) @ (x - z))

    h00, h10, h01 = h(0, 0), h(1, 0), h(0, 1)
    h11, hs, hu = h(1, 1), h(0.5, 0), h(0, 0.5)
    a3 = 2 * h00 - 4 * hs + 2 * h10
    a1 = h10 - h00 - a3
    a4 = 2 * h00 - 4 * hu + 2 * h01
    a2 = h01 - h00 - a4
    a5 = h11 - h00 - a1 - a2 - a3 - a4

    candidates = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    for u in (0.0, 1.0):  # edges along s
        if a3 != 0:
            s_crit = -(a1 + a5 * u) / (2 * a3)
            if 0 < s_crit < 1:
                candidates.append((s_crit, u))
    for s in (0.0, 1.0):  # edges along u
        if a4 != 0:
            u_crit = -(a2 + a5 * s) / (2 * a4)
            if 0 < u_crit < 1:
                candidates.append((s, u_crit))
    det = 4 * a3 * a4 - a5**2
    if abs(det) > 1e-12 * max(1.0, abs(a3), abs(a4), abs(a5)) ** 2:
        s_crit = (-2 * a4 * a1 + a5 * a2) / det
        u_crit = (-2 * a3 * a2 + a5 * a1) / det
        if 0 < s_crit < 1 and 0 < u_crit < 1:
            candidates.append((s_crit, u_crit))
    return max(h(s, u) for s, u in candidates)


# ---------------------------------------------------------------------------
# verification suites


def sqrt_step_suite(draws: int = 200, seed: int = 0, log_const: float = 6.0) -> dict:
    rng = Rng(seed, stream=1)
    c_vals = rng.uniform_range(0.1, 10.0, draws)
    T_vals = 1 + (rng.uniform(draws) * 9999).astype(int)
    violations = 0
    for c, T in zip(c_vals, T_vals):
        rep = step_sum_bounds_sqrt(float(c), int(T), log_const=log_const)
        if not (rep["sq_ok"] and rep["sum_ok"]):
            violations += 1
    return {"lemma_id": "step_sums_sqrt", "draws": draws, "violations": violations}


def power_step_suite(draws: int = 200, seed: int = 0) -> dict:
    rng = Rng(seed, stream=2)
    c_vals = rng.uniform_range(0.1, 10.0, draws)
    a_vals = rng.uniform_range(0.02, 0.98, draws)
    p_vals = rng.uniform_range(0.0, 0.95, draws)
    T_vals = 1 + (rng.uniform(draws) * 9999).astype(int)
    violations = 0
    checked = 0
    for c, a, p, T in zip(c_vals, a_vals, p_vals, T_vals):
        parts = power_step_sum_bounds(float(c), float(a), float(p), int(T))
        for part in parts.values():
            if "skipped" in part:
                continue
            checked += 1
            if not part["holds"]:
                violations += 1
    return {
        "lemma_id": "step_sums_power",
        "draws": draws,
        "parts_checked": checked,
        "violations": violations,
    }


def three_point_suite(triples: int = 1000, seed: int = 0, tol: float = 1e-9) -> dict:
    """B(z,x) + B(x,y) - B(z,y) = <grad psi(y) - grad psi(x), z - x> on random triples."""
    rng = Rng(seed, stream=3)
    violations = 0
    for geom in (geo.EUCLIDEAN, geo.ENTROPIC):
        pts = geo.sample_simplex_product(rng, 2, 2, 3 * triples).reshape(triples, 3, 4)
        for x, y, z in pts:
            lhs = (
                geo.bregman_divergence(geom, z, x)
                + geo.bregman_divergence(geom, x, y)
                - geo.bregman_divergence(geom, z, y)
            )
            rhs = float((geo.grad_psi(geom, y) - geo.grad_psi(geom, x)) @ (z - x))
            scale = 1.0 + abs(lhs) + abs(rhs)
            if abs(lhs - rhs) > tol * scale:
                violations += 1
    return {"lemma_id": "three_point_identity", "draws": 2 * triples, "violations": violations}


def strong_convexity_suite(pairs: int = 1000, seed: int = 0) -> dict:
    rng = Rng(seed, stream=4)
    violations = 0
    for geom in (geo.EUCLIDEAN, geo.ENTROPIC):
        pts = geo.sample_simplex_product(rng, 2, 2, 2 * pairs).reshape(pairs, 2, 4)
        for z, x in pts:
            div = geo.bregman_divergence(geom, z, x)
            lower = 0.5 * geom.alpha * float((z - x) @ (z - x))
            if div < lower - 1e-12:
                violations += 1
    return {"lemma_id": "strong_convexity_lower_bound", "draws": 2 * pairs, "violations": violations}


def max_value_suite(draws: int = 100, grid: int = 10_000, seed: int = 0) -> dict:
    rng = Rng(seed, stream=5)
    q_vals = rng.uniform_range(0.0, 10.0, draws)
    s_vals = rng.uniform_range(0.1, 10.0, draws)
    nu_vals = rng.uniform_range(0.05, 0.95, draws)
    violations = 0
    for q, s, nu in zip(q_vals, s_vals, nu_vals):
        peak = max_value_lemma(float(q), float(s), float(nu))
        d_star = max_value_argmax(float(q), float(s), float(nu))
        d = np.linspace(0.0, 10.0 * d_star + 1.0, grid)
        values = q * d**float(nu) - s * d
        if values.max() > peak * (1 + 1e-12) + 1e-15:
            violations += 1
        at_star = q * d_star**float(nu) - s * d_star
        if abs(at_star - peak) > 1e-8 * (1.0 + abs(peak)):
            violations += 1
    return {"lemma_id": "max_value", "draws": draws, "violations": violations}


def prox_optimality_suite(cases: int = 100, seed: int = 0, tol: float = 1e-7) -> dict:
    """First-order optimality of the prox output against random comparison points."""
    rng = Rng(seed, stream=6)
    domain = geo.SimplexProduct(2, 2)
    violations = 0
    for geom in (geo.EUCLIDEAN, geo.ENTROPIC):
        X = geo.sample_simplex_product(rng, 2, 2, cases)
        Z = rng.normal(cases * 4).reshape(cases, 4)
        probes = geo.sample_simplex_product(rng, 2, 2, 100)
        for x, zeta in zip(X, Z):
            out = geo.prox_map(geom, domain, x, zeta)
            grad_term = zeta - geo.grad_psi(geom, x) + geo.grad_psi(geom, out)
            inner = (probes - out) @ grad_term
            if inner.min() < -tol:
                violations += 1
    return {"lemma_id": "prox_first_order_optimality", "draws": 2 * cases, "violations": violations}


def run_suites(seed: int = 0) -> list[dict]:
    return [
        sqrt_step_suite(seed=seed),
        power_step_suite(seed=seed),
        three_point_suite(seed=seed),
        strong_convexity_suite(seed=seed),
        max_value_suite(seed=seed),
        prox_optimality_suite(seed=seed),
    ]
