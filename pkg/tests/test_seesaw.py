import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcbs_sos import coefficients as co
from kcbs_sos import numerics as nx
from kcbs_sos import realization as rz
from kcbs_sos import seesaw as ss
from kcbs_sos.operators import build_Bn


def test_optimal_state_example():
    psi, value = ss.optimal_state(np.diag([1.0, 3.0, 2.0]))
    assert value == 3.0
    assert np.allclose(psi, [0, 1, 0])


def test_sign_operator_example():
    assert np.allclose(ss.sign_operator(np.diag([2.0, -1.0, 0.0])), np.diag([1.0, -1.0, 1.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sign_operator_is_an_involution(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = nx.hermitize(g)
    S = ss.sign_operator(H)
    assert np.allclose(S @ S, np.eye(4), atol=1e-10)
    # sign(H) maximises tr(H X) over -1 <= X <= 1, reaching the trace norm
    assert np.trace(H @ S).real == pytest.approx(np.abs(np.linalg.eigvalsh(H)).sum(), abs=1e-10)


def test_observable_step_is_optimal(rng):
    c = co.derive(5)
    A = [2 * nx.random_effect(3, rng) - np.eye(3) for _ in range(5)]
    psi = nx.random_state(3, rng)
    best = ss.optimal_observable(2, psi, A, c)
    A_best = A[:2] + [best] + A[3:]
    top = ss._value(c, psi, A_best)
    for _ in range(50):
        trial = A[:2] + [2 * nx.random_effect(3, rng) - np.eye(3)] + A[3:]
        assert ss._value(c, psi, trial) <= top + 1e-12


def test_canonical_is_a_fixed_point(coeffs, can):
    A = list(can.observables)
    psi = can.psi
    for i in range(coeffs.n):
        A[i] = ss.optimal_observable(i, psi, A, coeffs)
    assert ss._value(coeffs, psi, A) == pytest.approx(coeffs.eta_q, abs=1e-10)
    for a, ref in zip(A, can.observables):
        assert np.allclose(a @ psi, ref @ psi, atol=1e-10)
    _, top = ss.optimal_state(build_Bn(coeffs, A))
    assert top <= coeffs.eta_q + 1e-9


def test_restart_is_monotone():
    c = co.derive(5)
    rng = np.random.default_rng(7)
    _, _, values = ss.run_restart(c, 3, 200, rng)
    assert all(b >= a - 1e-10 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("dim", [3, 4])
def test_sandwich(dim):
    c = co.derive(5)
    trace = ss.seesaw(5, dim=dim, restarts=6, max_iters=300, seed=1)
    assert trace.best_value <= c.eta_q + 1e-9
    assert trace.best_value >= c.eta_c
    r = trace.best_realization
    assert r.dim == dim
    assert r.validate() is r


def test_seesaw_reproducible():
    a = ss.seesaw(5, restarts=3, max_iters=50, seed=5)
    b = ss.seesaw(5, restarts=3, max_iters=50, seed=5)
    assert a.values == b.values
    assert a.to_json() == b.to_json()


def test_seesaw_rejects_small_dim():
    with pytest.raises(ValueError):
        ss.seesaw(5, dim=2)


def test_trace_json():
    doc = ss.seesaw(5, restarts=2, max_iters=20, seed=0).to_json()
    assert doc["restarts"] == 2
    assert len(doc["final_values"]) == 2
    assert doc["best_value"] == max(doc["final_values"])
