"""Mirror-prox solvers for stochastic and deterministic variational
inequalities over Bregman geometries, with merit-function benchmarking."""

from . import geometry, harness, merit, problems, rng, schedules, solvers, verify

__all__ = [
    "geometry",
    "harness",
    "merit",
    "problems",
    "rng",
    "schedules",
    "solvers",
    "verify",
]

__version__ = "0.1.0"
