import numpy as np
import pytest

from vbeat.core import EmitterKind, EmitterModel


@pytest.fixture
def v_model():
    return EmitterModel(kind=EmitterKind.V_SYSTEM, fss_ueV=13.0,
                        gamma1_per_ps=1e-3, gamma2_per_ps=1e-3)


@pytest.fixture
def tls_model():
    return EmitterModel(kind=EmitterKind.TWO_LEVEL, gamma1_per_ps=1e-3,
                        gamma2_per_ps=1e-3)


def random_density_matrix(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
