"""Step-size schedules and iterate-averaging schemes.

Conventions: step index t is 0-based; a run of T steps has indices
0..T-1, and horizon-dependent formulas receive ``horizon = T - 1`` (the
last step index).  The averaged output after step t weights the leading
iterates produced at steps tau = window_start..t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

STEP_KINDS = ("power", "constant_horizon", "fixed")
WEIGHT_KINDS = ("step", "inverse_step", "uniform")
WINDOW_KINDS = ("zero", "half")


@dataclass(frozen=True)
class StepSchedule:
    """gamma_t = c/(t+1)^a (power), c/(T+1)^a (constant_horizon), or a fixed value."""

    kind: str
    c: float = 1.0
    a: float = 0.5
    value: float = 0.0  # fixed kind only

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.kind == "fixed":
            if self.value <= 0:
                raise ValueError("fixed step size must be positive")
        else:
            if self.c <= 0:
                raise ValueError("c must be positive")
            if not 0 < self.a < 1:
                raise ValueError("exponent a must lie in (0, 1)")


def power_schedule(c: float = 1.0, a: float = 0.5) -> StepSchedule:
    return StepSchedule("power", c=c, a=a)


def constant_horizon_schedule(c: float = 1.0, a: float = 0.5) -> StepSchedule:
    return StepSchedule("constant_horizon", c=c, a=a)


def fixed_schedule(value: float) -> StepSchedule:
    return StepSchedule("fixed", value=value)


def gamma(schedule: StepSchedule, t: int, horizon: int | None = None) -> float:
    """Step size at step index t; constant_horizon needs the horizon."""
    if t < 0:
        raise ValueError("step index must be non-negative")
    if schedule.kind == "fixed":
        return schedule.value
    if schedule.kind == "power":
        return schedule.c / (t + 1) ** schedule.a
    if horizon is None:
        raise ValueError("constant_horizon schedule queried without a horizon")
    return schedule.c / (horizon + 1) ** schedule.a


def lipschitz_cap(alpha: float, L1: float, r: float, w5: float) -> float:
    """Largest constant step admissible for the Lipschitz residual guarantee."""
    if alpha <= 0 or L1 <= 0:
        raise ValueError("alpha and L1 must be positive")
    if not 0 <= r < 1:
        raise ValueError("r must lie in [0, 1)")
    if w5 <= 1:
        raise ValueError("w5 must exceed 1")
    first = alpha / (math.sqrt(2.0) * L1 * math.sqrt(r * (w5 - 1) * alpha + 4.0))
    second = alpha * math.sqrt(1.0 - r) / (2.0 * L1)
    return min(first, second)


@dataclass(frozen=True)
class AveragingScheme:
    weights: str = "uniform"  # "step" | "inverse_step" | "uniform"
    window: str = "zero"  # "zero" | "half"

    def __post_init__(self):
        if self.weights not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight rule {self.weights!r}")
        if self.window not in WINDOW_KINDS:
            raise ValueError(f"unknown window rule {self.window!r}")


def window_start(scheme: AveragingScheme, T: int) -> int:
    if T < 0:
        raise ValueError("T must be non-negative")
    return T // 2 if scheme.window == "half" else 0


def weight(
    scheme: AveragingScheme, schedule: StepSchedule, t: int, horizon: int | None = None
) -> float:
    if scheme.weights == "uniform":
        return 1.0
    g = gamma(schedule, t, horizon)
    return g if scheme.weights == "step" else 1.0 / g


# ---------------------------------------------------------------------------
# JSON config fragments


def step_from_json(obj: dict) -> StepSchedule:
    kind = obj.get("kind")
    if kind == "power":
        return power_schedule(c=float(obj.get("c", 1.0)), a=float(obj.get("a", 0.5)))
    if kind == "constant_horizon":
        return constant_horizon_schedule(
            c=float(obj.get("c", 1.0)), a=float(obj.get("a", 0.5))
        )
    if kind == "fixed":
        if "gamma" not in obj:
            raise ValueError("fixed step needs a 'gamma' field")
        return fixed_schedule(float(obj["gamma"]))
    raise ValueError(f"unknown step kind {kind!r}")


def step_to_json(schedule: StepSchedule) -> dict:
    if schedule.kind == "fixed":
        return {"kind": "fixed", "gamma": schedule.value}
    return {"kind": schedule.kind, "c": schedule.c, "a": schedule.a}


def averaging_from_json(obj: dict) -> AveragingScheme:
    return AveragingScheme(
        weights=obj.get("weights", "uniform"), window=obj.get("window", "zero")
    )


def averaging_to_json(scheme: AveragingScheme) -> dict:
    return {"weights": scheme.weights, "window": scheme.window}
