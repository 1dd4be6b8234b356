import numpy as np
import pytest
from hypothesis import settings

from r2opuc.recurrence import CoefficientData

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_cd(seed, n, c_scale=5.0):
    """Random data of degree n + 1: ℓ ~ U(0.05, 0.95), c ~ U(-c_scale, c_scale)."""
    rng = np.random.default_rng(seed)
    ell = np.concatenate([[0.0], rng.uniform(0.05, 0.95, n + 1)])
    c = rng.uniform(-c_scale, c_scale, n + 2)
    return CoefficientData.from_ell(c, ell)


@pytest.fixture
def make_random():
    return random_cd


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: (int(k.split()[0]), k)):
        terminalreporter.write_line(mod.RESULTS[key])
