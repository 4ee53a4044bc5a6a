import numpy as np
import pytest

from redfield.bath import BathParameters
from redfield.entanglement import FamilyParams, make_family_state

FIG1_RATES = dict(omega=1.0, a=0.005, b=0.05, alpha=0.001, gamma=0.001)
FIG1_FAMILY = FamilyParams(mu=0.025, nu=0.1, u=0.02, v=0.125)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fig1_params():
    return BathParameters.from_kms_ratio(w_over_gamma=0.5, **FIG1_RATES)


@pytest.fixture
def fig1_state():
    return make_family_state(FIG1_FAMILY)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_valid_params(rng, scale=0.01, b_scale=0.05, zero_temperature=False):
    """Weak-coupling parameter set: rates up to ``scale``, |b| up to ``b_scale`` (units of omega)."""
    a, alpha, gamma = rng.uniform(0.0, scale, size=3)
    b = rng.uniform(-b_scale, b_scale)
    omega_tilde = rng.uniform(0.8, 1.2)
    if zero_temperature:
        ratio = 1.0
    else:
        ratio = rng.uniform(0.0, 1.0)
    return BathParameters.from_kms_ratio(1.0, a, b, alpha, gamma, ratio, omega_tilde=omega_tilde)


def random_family(rng, entangled=False):
    while True:
        mu = rng.uniform(0.0, 0.5)
        nu = rng.uniform(0.0, 1.0 - 2.0 * mu)
        vmax = np.sqrt(nu * (1.0 - 2.0 * mu - nu))
        u = rng.uniform(-mu, mu)
        v = rng.uniform(-vmax, vmax)
        if not entangled or abs(v) > mu + 1e-3:
            return FamilyParams(mu, nu, u, v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
