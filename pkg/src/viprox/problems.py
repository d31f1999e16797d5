"""Benchmark problem instances: noisy two-player matrix games on a product of
simplices and piecewise-quadratic minimization on a simplex.

Both generators build their curvature matrices from an eigenvalue
decomposition Q diag(lambda) Q^T with lambda uniform on [0, L] and Q the
orthogonal factor of a random matrix with entries uniform on [0, 4], so the
operator is monotone with a known Lipschitz bound by construction.  Noise is
Gaussian with covariance ``sigma * I`` (``sigma`` stores the per-coordinate
variance; 0 disables noise).  All draws come from the counter-based
:class:`~viprox.rng.Rng`, so a seed pins the instance exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import DimensionError, SimplexProduct, sample_simplex_product
from .rng import Rng

DEFAULT_TIE_TOL = 1e-12


@dataclass(frozen=True)
class GrowthParams:
    """Variation bound ||F(x) - F(y)||_* <= L_nu ||x - y||^nu + M_nu."""

    nu: float
    L_nu: float
    M_nu: float

    def __post_init__(self):
        if self.L_nu <= 0 or self.M_nu < 0 or self.nu < 0:
            raise ValueError("growth parameters out of range")


@dataclass(frozen=True)
class MappingSample:
    value: np.ndarray
    noise_draw_id: int


def _random_psd(rng: Rng, dim: int, max_eig: float) -> np.ndarray:
    lambdas = rng.uniform_range(0.0, max_eig, dim)
    raw = rng.uniform_range(0.0, 4.0, dim * dim).reshape(dim, dim)
    q, _ = np.linalg.qr(raw)
    m = (q * lambdas) @ q.T
    return 0.5 * (m + m.T)


# ---------------------------------------------------------------------------
# noisy matrix game


@dataclass(frozen=True)
class MatrixGameInstance:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    p: np.ndarray
    q: np.ndarray
    sigma: float  # per-coordinate noise variance
    L: float
    seed: int

    @property
    def domain(self) -> SimplexProduct:
        return SimplexProduct(k=2, n=2)

    @property
    def jacobian(self) -> np.ndarray:
        top = np.hstack([self.A + self.A.T, self.B])
        bottom = np.hstack([self.D.T, self.C + self.C.T])
        return np.vstack([top, bottom])

    @property
    def offset(self) -> np.ndarray:
        return np.concatenate([self.p, self.q])

    @property
    def growth(self) -> GrowthParams:
        return GrowthParams(nu=1.0, L_nu=self.L, M_nu=0.0)

    def map(self, x: np.ndarray) -> np.ndarray:
        return matrix_game_map(self, x)

    def map_batch(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.jacobian.T + self.offset

    def sample(self, x: np.ndarray, rng: Rng) -> MappingSample:
        return matrix_game_sample(self, x, rng)


def generate_matrix_game(L: float, seed: int, sigma: float = 0.0) -> MatrixGameInstance:
    """Random monotone game whose mapping Jacobian has spectrum in [0, L]."""
    if L <= 0:
        raise ValueError("L must be positive")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = Rng(seed, stream=0)
    jac = _random_psd(rng, 4, L)
    p = rng.normal(2)
    q = rng.normal(2)
    return MatrixGameInstance(
        A=jac[:2, :2] / 2.0,
        B=jac[:2, 2:].copy(),
        C=jac[2:, 2:] / 2.0,
        D=jac[2:, :2].T.copy(),
        p=p,
        q=q,
        sigma=float(sigma),
        L=float(L),
        seed=int(seed),
    )


def matrix_game_map(inst: MatrixGameInstance, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (4,):
        raise DimensionError(f"matrix game expects points in R^4, got {x.shape}")
    return inst.jacobian @ x + inst.offset


def matrix_game_sample(inst: MatrixGameInstance, x: np.ndarray, rng: Rng) -> MappingSample:
    value = matrix_game_map(inst, x)
    draw_id = rng.counter
    if inst.sigma > 0:
        value = value + np.sqrt(inst.sigma) * rng.normal(4)
    return MappingSample(value=value, noise_draw_id=draw_id)


# ---------------------------------------------------------------------------
# piecewise quadratic


@dataclass(frozen=True)
class PiecewiseQuadInstance:
    A: tuple  # four 2x2 PSD matrices, eigenvalues of A[i] in [0, i+1]
    b: tuple  # four offset vectors
    x_trans: tuple  # three simplex points where consecutive pieces agree
    sigma: float
    seed: int
    tie_tol: float = DEFAULT_TIE_TOL

    @property
    def domain(self) -> SimplexProduct:
        return SimplexProduct(k=1, n=2)

    def map(self, x: np.ndarray) -> np.ndarray:
        return pwq_subgradient(self, x, self.tie_tol)

    def map_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        values = np.stack(
            [0.5 * np.einsum("ij,jk,ik->i", X, a, X) + X @ bi for a, bi in zip(self.A, self.b)],
            axis=1,
        )
        top = values.max(axis=1, keepdims=True)
        active = values >= top - self.tie_tol
        idx = active.argmax(axis=1)  # smallest active index
        grads = np.stack(
            [X @ (0.5 * (a + a.T)).T + bi for a, bi in zip(self.A, self.b)], axis=1
        )
        return grads[np.arange(X.shape[0]), idx]

    def sample(self, x: np.ndarray, rng: Rng) -> MappingSample:
        return pwq_sample(self, x, rng)


def generate_piecewise_quad(seed: int, sigma: float = 0.0) -> PiecewiseQuadInstance:
    """Four-piece max-of-quadratics on the simplex, continuous across pieces.

    The offsets follow b_i = b_{i-1} + (A_{i-1} - A_i) x_trans / 2, which makes
    piece i agree with piece i-1 at the i-th transition point.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    rng = Rng(seed, stream=0)
    mats = [_random_psd(rng, 2, float(i)) for i in (1, 2, 3, 4)]
    b1 = rng.normal(2)
    trans = [sample_simplex_product(rng, 1, 2, 1)[0] for _ in range(3)]
    offsets = [b1]
    for i in range(1, 4):
        offsets.append(offsets[i - 1] + 0.5 * (mats[i - 1] - mats[i]) @ trans[i - 1])
    return PiecewiseQuadInstance(
        A=tuple(mats),
        b=tuple(offsets),
        x_trans=tuple(trans),
        sigma=float(sigma),
        seed=int(seed),
    )


def pwq_piece_values(inst: PiecewiseQuadInstance, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (2,):
        raise DimensionError(f"piecewise quadratic expects points in R^2, got {x.shape}")
    return np.array([0.5 * x @ a @ x + bi @ x for a, bi in zip(inst.A, inst.b)])


def pwq_loss(inst: PiecewiseQuadInstance, x: np.ndarray) -> float:
    return float(pwq_piece_values(inst, x).max())


def pwq_subgradient(
    inst: PiecewiseQuadInstance, x: np.ndarray, tie_tol: float = DEFAULT_TIE_TOL
) -> np.ndarray:
    """Subgradient selection: the smallest index attaining the max within tie_tol."""
    values = pwq_piece_values(inst, x)
    active = np.nonzero(values >= values.max() - tie_tol)[0]
    i = int(active[0])
    a, bi = inst.A[i], inst.b[i]
    return 0.5 * (a + a.T) @ np.asarray(x, dtype=np.float64) + bi


def pwq_sample(inst: PiecewiseQuadInstance, x: np.ndarray, rng: Rng) -> MappingSample:
    value = pwq_subgradient(inst, x, inst.tie_tol)
    draw_id = rng.counter
    if inst.sigma > 0:
        value = value + np.sqrt(inst.sigma) * rng.normal(2)
    return MappingSample(value=value, noise_draw_id=draw_id)


def pwq_growth_bound(inst: PiecewiseQuadInstance, n_samples: int = 2000, seed: int = 0) -> float:
    """Audited bounded-variation constant: twice the largest sampled piece-gradient norm."""
    rng = Rng(seed, stream=0)
    X = sample_simplex_product(rng, 1, 2, n_samples)
    norms = [
        np.linalg.norm(X @ (0.5 * (a + a.T)).T + bi, axis=1).max()
        for a, bi in zip(inst.A, inst.b)
    ]
    return 2.0 * float(max(norms))


# ---------------------------------------------------------------------------
# serialization

ProblemInstance = MatrixGameInstance | PiecewiseQuadInstance


def instance_to_json(inst: ProblemInstance) -> dict:
    if isinstance(inst, MatrixGameInstance):
        return {
            "type": "matrix_game",
            "seed": inst.seed,
            "L": inst.L,
            "sigma": inst.sigma,
            "matrices": {
                "A": inst.A.flatten().tolist(),
                "B": inst.B.flatten().tolist(),
                "C": inst.C.flatten().tolist(),
                "D": inst.D.flatten().tolist(),
            },
            "vectors": {"p": inst.p.tolist(), "q": inst.q.tolist()},
        }
    return {
        "type": "piecewise_quad",
        "seed": inst.seed,
        "L": 4.0,
        "sigma": inst.sigma,
        "matrices": {f"A{i + 1}": a.flatten().tolist() for i, a in enumerate(inst.A)},
        "vectors": {
            **{f"b{i + 1}": b.tolist() for i, b in enumerate(inst.b)},
            **{f"x_trans{i + 1}": t.tolist() for i, t in enumerate(inst.x_trans)},
        },
    }


def instance_from_json(obj: dict) -> ProblemInstance:
    kind = obj.get("type")
    if kind == "matrix_game":
        mats = obj["matrices"]
        vecs = obj["vectors"]
        return MatrixGameInstance(
            A=np.array(mats["A"]).reshape(2, 2),
            B=np.array(mats["B"]).reshape(2, 2),
            C=np.array(mats["C"]).reshape(2, 2),
            D=np.array(mats["D"]).reshape(2, 2),
            p=np.array(vecs["p"]),
            q=np.array(vecs["q"]),
            sigma=float(obj["sigma"]),
            L=float(obj["L"]),
            seed=int(obj["seed"]),
        )
    if kind == "piecewise_quad":
        mats = obj["matrices"]
        vecs = obj["vectors"]
        return PiecewiseQuadInstance(
            A=tuple(np.array(mats[f"A{i}"]).reshape(2, 2) for i in (1, 2, 3, 4)),
            b=tuple(np.array(vecs[f"b{i}"]) for i in (1, 2, 3, 4)),
            x_trans=tuple(np.array(vecs[f"x_trans{i}"]) for i in (1, 2, 3)),
            sigma=float(obj["sigma"]),
            seed=int(obj["seed"]),
        )
    raise ValueError(f"unknown problem type {kind!r}")


def save_instance(inst: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst), indent=2) + "\n")


def load_instance(path: str | Path) -> ProblemInstance:
    return instance_from_json(json.loads(Path(path).read_text()))


def generate_instance(kind: str, L: float, sigma: float, seed: int) -> ProblemInstance:
    if kind == "matrix_game":
        return generate_matrix_game(L, seed, sigma=sigma)
    if kind == "piecewise_quad":
        return generate_piecewise_quad(seed, sigma=sigma)
    raise ValueError(f"unknown problem type {kind!r}")
