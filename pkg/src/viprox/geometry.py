"""Bregman geometries over simplex products and boxes.

Two distance-generating functions are supported, both 1-strongly convex in
the Euclidean norm on their domains:

* ``euclidean``: psi(x) = ||x||^2 / 2, divergence ||z - x||^2 / 2, prox by
  Euclidean projection.
* ``entropic``: psi(x) = sum x_i (ln x_i - 1) on products of probability
  simplices, divergence sum z_i ln(z_i / x_i) (blockwise KL), prox by the
  multiplicative-weights update with per-block renormalization.

The simplex projection uses bisection on the shift parameter tau with
z = max(v - tau, 0), stopping when the coordinate sum is within 1e-10 of 1.
The Euclidean prox is this projection applied to x - zeta, so the two share
one code path by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng

SIMPLEX_SUM_TOL = 1e-10
SIMPLEX_MAX_BISECT = 200


class DimensionError(ValueError):
    """Operands live in different spaces."""


class BoundaryError(ValueError):
    """Entropic operation at a point with a (near-)zero coordinate."""


class NumericError(ArithmeticError):
    """Non-finite input or an iterate that left the feasible set."""


class DomainMismatchError(ValueError):
    """Geometry, domain, and problem are not mutually compatible."""


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class SimplexProduct:
    """k independent probability simplices of n coordinates each."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("SimplexProduct needs k >= 1 and n >= 1")

    @property
    def total_dim(self) -> int:
        return self.k * self.n

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.total_dim,):
            return False
        if np.any(x < -tol):
            return False
        sums = x.reshape(self.k, self.n).sum(axis=1)
        return bool(np.all(np.abs(sums - 1.0) <= tol))

    def barycenter(self) -> np.ndarray:
        return np.full(self.total_dim, 1.0 / self.n)


@dataclass(frozen=True)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionError("box bounds must be 1-d arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("box needs lower <= upper componentwise")

    @property
    def total_dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.lower.shape:
            return False
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def barycenter(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


Domain = SimplexProduct | Box


# ---------------------------------------------------------------------------
# geometries


@dataclass(frozen=True)
class BregmanGeometry:
    kind: str  # "euclidean" | "entropic"
    alpha: float = 1.0
    boundary_floor: float = 1e-300

    def __post_init__(self):
        if self.kind not in ("euclidean", "entropic"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


EUCLIDEAN = BregmanGeometry("euclidean")
ENTROPIC = BregmanGeometry("entropic")


def geometry_by_name(name: str) -> BregmanGeometry:
    if name == "euclidean":
        return EUCLIDEAN
    if name == "entropic":
        return ENTROPIC
    raise ValueError(f"unknown geometry {name!r}")


# ---------------------------------------------------------------------------
# simplex projection (bisection on the shift tau)


def _bisect_rows_py(V, tol, max_iter):
    m, n = V.shape
    out = np.empty_like(V)
    for i in range(m):
        v = V[i]
        lo = v.min() - 1.0 / n
        hi = v.max()
        tau = 0.5 * (lo + hi)
        for _ in range(max_iter):
            tau = 0.5 * (lo + hi)
            s = 0.0
            for j in range(n):
                d = v[j] - tau
                if d > 0.0:
                    s += d
            if abs(s - 1.0) <= tol:
                break
            if s > 1.0:
                lo = tau
            else:
                hi = tau
        for j in range(n):
            d = v[j] - tau
            out[i, j] = d if d > 0.0 else 0.0
    return out


try:  # compiled path; the interpreted fallback implements the same algorithm
    from numba import njit

    _bisect_rows = njit(cache=True)(_bisect_rows_py)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _bisect_rows = _bisect_rows_py


def project_simplex_rows(V: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean projection of V (m, n) onto the simplex."""
    V = np.ascontiguousarray(V, dtype=np.float64)
    return _bisect_rows(V, SIMPLEX_SUM_TOL, SIMPLEX_MAX_BISECT)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex."""
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise NumericError("cannot project a non-finite vector")
    return project_simplex_rows(v[None, :])[0]


# ---------------------------------------------------------------------------
# divergence, gradient, prox


def bregman_divergence(geom: BregmanGeometry, z: np.ndarray, x: np.ndarray) -> float:
    """B_psi(z, x) for feasible z, x."""
    z = np.asarray(z, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if z.shape != x.shape:
        raise DimensionError(f"shape mismatch {z.shape} vs {x.shape}")
    if geom.kind == "euclidean":
        d = z - x
        return 0.5 * float(d @ d)
    if np.any(x < geom.boundary_floor):
        raise BoundaryError("entropic divergence needs x bounded away from zero")
    pos = z > 0.0
    terms = np.zeros_like(z)
    terms[pos] = z[pos] * np.log(z[pos] / x[pos])
    return float(terms.sum())


def grad_psi(geom: BregmanGeometry, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if geom.kind == "euclidean":
        return x.copy()
    if np.any(x < geom.boundary_floor):
        raise BoundaryError("entropic gradient needs x bounded away from zero")
    return np.log(x)


def _entropic_prox_rows(X: np.ndarray, Z: np.ndarray, floor: float) -> np.ndarray:
    # Multiplicative update x * exp(-zeta), computed in log space so that a
    # large zeta cannot overflow, then renormalized per row.
    with np.errstate(divide="ignore"):
        logw = np.where(X > 0.0, np.log(np.maximum(X, floor)), -np.inf) - Z
    logw -= logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    p = w / w.sum(axis=1, keepdims=True)
    p = np.maximum(p, floor)
    return p / p.sum(axis=1, keepdims=True)


def prox_map_rows(
    geom: BregmanGeometry, domain: Domain, X: np.ndarray, Z: np.ndarray
) -> np.ndarray:
    """Row-wise prox: each row of X is a point, each row of Z a dual step."""
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if X.shape != Z.shape or X.shape[1] != domain.total_dim:
        raise DimensionError("points and dual steps must match the domain dimension")
    if not np.all(np.isfinite(Z)):
        raise NumericError("non-finite dual step")
    m = X.shape[0]
    if isinstance(domain, Box):
        if geom.kind != "euclidean":
            raise DomainMismatchError("entropic geometry needs a simplex-product domain")
        return np.clip(X - Z, domain.lower, domain.upper)
    k, n = domain.k, domain.n
    if geom.kind == "euclidean":
        V = (X - Z).reshape(m * k, n)
        return project_simplex_rows(V).reshape(m, k * n)
    out = _entropic_prox_rows(
        X.reshape(m * k, n), Z.reshape(m * k, n), geom.boundary_floor
    )
    return out.reshape(m, k * n)


def prox_map(
    geom: BregmanGeometry, domain: Domain, x: np.ndarray, zeta: np.ndarray
) -> np.ndarray:
    """argmin_{z in domain} psi(z) + <z, zeta - grad psi(x)>."""
    x = np.asarray(x, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    return prox_map_rows(geom, domain, x[None, :], zeta[None, :])[0]


# ---------------------------------------------------------------------------
# sampling


def sample_simplex_product(rng: Rng, k: int, n: int, count: int) -> np.ndarray:
    """Uniform points on a product of k simplices via sorted-uniform spacings."""
    if n == 1:
        return np.ones((count, k))
    u = rng.uniform(count * k * (n - 1)).reshape(count * k, n - 1)
    u.sort(axis=1)
    zero = np.zeros((count * k, 1))
    one = np.ones((count * k, 1))
    spacings = np.diff(np.hstack([zero, u, one]), axis=1)
    return spacings.reshape(count, k * n)


def random_point(domain: Domain, rng: Rng) -> np.ndarray:
    if isinstance(domain, SimplexProduct):
        return sample_simplex_product(rng, domain.k, domain.n, 1)[0]
    width = domain.upper - domain.lower
    return domain.lower + width * rng.uniform(domain.total_dim)
