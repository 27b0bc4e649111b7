import numpy as np
import pytest

from kcbs_sos import coefficients, realization

SUPPORTED_N = (5, 9, 17)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=SUPPORTED_N, ids=lambda n: f"n{n}")
def n(request):
    return request.param


@pytest.fixture
def coeffs(n):
    return coefficients.derive(n)


@pytest.fixture
def can(n):
    return realization.canonical(n)


def _orthogonal_cycle(n, rng):
    from kcbs_sos import numerics as nx

    vecs = [nx.random_state(3, rng)]
    for _ in range(1, n - 1):
        x = nx.random_state(3, rng)
        x = x - np.vdot(vecs[-1], x) * vecs[-1]
        vecs.append(x / np.linalg.norm(x))
    # the last vector must be orthogonal to both of its neighbours
    last = np.conj(np.cross(vecs[-1], vecs[0]))
    vecs.append(last / np.linalg.norm(last))
    return vecs


@pytest.fixture
def orthogonal_cycle():
    """Random unit vectors in C^3 with each one orthogonal to its two neighbours."""
    return _orthogonal_cycle


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
