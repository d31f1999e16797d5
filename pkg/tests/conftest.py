from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import settings

from viprox import problems as prb
from viprox.geometry import Box
from viprox.problems import MappingSample

settings.register_profile("ci", deadline=None, max_examples=50)
settings.load_profile("ci")


@dataclass
class AffineBoxProblem:
    """Test-only affine mapping on a box, where the prox is a plain clip and
    interior steps stay feasible."""

    A: np.ndarray
    b: np.ndarray
    box: Box
    sigma: float = 0.0

    @property
    def domain(self) -> Box:
        return self.box

    def map(self, x):
        return self.A @ x + self.b

    def map_batch(self, X):
        return np.asarray(X) @ self.A.T + self.b

    def sample(self, x, rng):
        return MappingSample(value=self.map(x), noise_draw_id=rng.counter)


@pytest.fixture
def box_problem():
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    b = np.array([0.3, -0.2])
    return AffineBoxProblem(A=A, b=b, box=Box(np.array([-10.0, -10.0]), np.array([10.0, 10.0])))


@pytest.fixture(scope="session")
def game():
    return prb.generate_matrix_game(10.0, 42)


@pytest.fixture(scope="session")
def noisy_game():
    return prb.generate_matrix_game(10.0, 1, sigma=0.4)


@pytest.fixture(scope="session")
def pwq():
    return prb.generate_piecewise_quad(3)
