import numpy as np
import pytest
from hypothesis import settings
from scipy.linalg import expm

from switchtemp import EvalContext, QuadratureConfig, desk_params

settings.register_profile("default", deadline=None)
settings.load_profile("default")

DENSE = QuadratureConfig(nodes_per_unit=4096)

# criterion number -> summary line, filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])


def count_oracle(t, lambda12, lambda21, k_max=80):
    """P(N_t = k) from the matrix exponential of the alternating pure-birth generator."""
    G = np.zeros((k_max + 1, k_max + 1))
    for k in range(k_max):
        rate = lambda12 if k % 2 == 0 else lambda21
        G[k, k], G[k, k + 1] = -rate, rate
    return expm(G * t)[0]


@pytest.fixture
def desk():
    return desk_params()


@pytest.fixture
def ctx_q():
    return EvalContext(0.25)


@pytest.fixture
def ctx_dense():
    return EvalContext(0.25, quad=DENSE)
