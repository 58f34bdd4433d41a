import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spectral_perturb.matcore import Subspace

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_symmetric(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2


def random_subspace(rng, n, r):
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return Subspace(q)


def random_rotation(rng, r):
    q, rr = np.linalg.qr(rng.standard_normal((r, r)))
    return q * np.sign(np.diag(rr))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
