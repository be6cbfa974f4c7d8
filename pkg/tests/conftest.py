import numpy as np
import pytest

from entsus.models import two_qubit_model

# closed forms for H = -Z0 - Z1 + lam X0X1, ground state in span{|00>, |11>}
SQRT5 = np.sqrt(5.0)
TWO_QUBIT_A_SQ = 1.0 / (1.0 + (2.0 - SQRT5) ** 2)


def two_qubit_purity(lam: float) -> float:
    t = (2.0 - np.sqrt(4.0 + lam**2)) / lam if lam else 0.0
    a_sq = 1.0 / (1.0 + t**2)
    b_sq = 1.0 - a_sq
    return 1.0 - 2.0 * a_sq * b_sq


def two_qubit_s2(lam: float) -> float:
    return -np.log(two_qubit_purity(lam))


@pytest.fixture
def two_qubit():
    return two_qubit_model()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, dim: int) -> np.ndarray:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)
