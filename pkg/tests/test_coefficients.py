import math

import mpmath
import numpy as np
import pytest

from kcbs_sos import coefficients as co
from kcbs_sos.errors import BadK, BadN


def alpha_hp(n):
    mpmath.mp.dps = 40
    return float(mpmath.mpf(1) / 2 / mpmath.cos(mpmath.pi / n))


def c_by_linear_solve(n):
    """Solve the cancellation and normalisation equations for the c_{2^x} directly."""
    m = (n - 1).bit_length() - 1
    c = co.derive(n)
    b, ab = c.beta, c.alpha_bar
    ks = [2**x for x in range(m)]
    M = np.zeros((m, m))
    rhs = np.zeros(m)
    for row, x in enumerate(range(1, m)):
        k, prev = 2**x, 2 ** (x - 1)
        M[row, ks.index(k)] = 2 * b[k] * (1 - 2 * b[k])
        M[row, ks.index(prev)] = b[prev] ** 2
    top = 2 ** (m - 1)
    M[m - 1, 0] += 4 * b[1] * (1 - 2 * b[1])
    M[m - 1, ks.index(top)] += 2 * b[top] ** 2
    rhs[m - 1] = 1 / ab**2
    return dict(zip(ks, np.linalg.solve(M, rhs)))


@pytest.mark.parametrize("n", [5, 9, 17, 33])
def test_closed_form_weights_match_linear_solve(n):
    c = co.derive(n)
    oracle = c_by_linear_solve(n)
    assert set(c.c) == set(oracle)
    for k, v in oracle.items():
        assert c.c[k] == pytest.approx(v, rel=1e-10)


def test_alpha_values():
    assert co.derive(5).alpha == pytest.approx(0.6180339887, abs=1e-10)
    assert co.derive(9).alpha == pytest.approx(0.5320888862, abs=1e-10)
    for n in (5, 9, 17, 33):
        assert co.derive(n).alpha == pytest.approx(alpha_hp(n), abs=1e-15)


def test_pentagon_identities():
    c = co.derive(5)
    assert c.alpha**2 + c.alpha == pytest.approx(1.0, abs=1e-12)
    # gamma coincides with the alpha^2 weight of the pentagon expression
    assert c.gamma == pytest.approx(0.3819660113, abs=1e-10)
    assert c.gamma == pytest.approx(c.alpha**2, abs=1e-12)
    assert c.eta_q == pytest.approx(4.1458980338, abs=1e-9)
    assert c.eta_q == pytest.approx(3 * (1 + c.alpha**2), abs=1e-12)
    # the pentagon weights are alpha^5/5 and alpha^8/10, as used in its hand-built certificate
    assert c.c[1] == pytest.approx(c.alpha**5 / 5, rel=1e-12)
    assert c.c[2] == pytest.approx(c.alpha**8 / 10, rel=1e-12)
    assert c.d == pytest.approx(1 / (2 * c.alpha), rel=1e-12)


def test_invariants(coeffs):
    c = coeffs
    assert c.alpha > 0.5
    assert c.alpha_bar < 0
    assert c.gamma > 0 and c.d > 0
    assert all(v > 0 for v in c.c.values())
    assert set(c.c) == {2**x for x in range(c.m)}
    assert c.beta[1] == pytest.approx(c.alpha / (1 + 2 * c.alpha), abs=1e-12)
    assert c.cos_theta == pytest.approx(1 / math.sqrt(1 + 2 * c.alpha), abs=1e-15)


def test_normalisation_and_cancellation(coeffs):
    c = coeffs
    b, m = c.beta, c.m
    top = 2 ** (m - 1)
    norm = 4 * c.c[1] * b[1] * (1 - 2 * b[1]) + 2 * c.c[top] * b[top] ** 2
    assert norm == pytest.approx(1 / c.alpha_bar**2, abs=1e-10)
    for x in range(1, m):
        k, prev = 2**x, 2 ** (x - 1)
        assert abs(2 * c.c[k] * b[k] * (1 - 2 * b[k]) + c.c[prev] * b[prev] ** 2) <= 1e-10


def test_d_and_eta_closed_forms(coeffs):
    c = coeffs
    s = sum(ck * (1 + 6 * c.beta[k] ** 2 - 4 * c.beta[k]) for k, ck in c.c.items())
    assert c.d == pytest.approx(c.alpha_bar**2 * s, abs=1e-10)
    assert c.eta_q == pytest.approx(c.n * (sum(c.c.values()) + c.d), abs=1e-10)
    assert c.eta_q > c.eta_c


def test_angles_reduced():
    c = co.derive(17)
    for i, ph in enumerate(c.phi, start=1):
        assert -math.pi < ph <= math.pi
        assert math.cos(ph) == pytest.approx(math.cos(16 * math.pi * i / 17), abs=1e-12)
    assert c.phi[-1] == 0.0


def test_anticommutator_coefficients(coeffs):
    c = coeffs
    assert co.anticommutator_coefficient(c, 1) == pytest.approx(0.5, abs=1e-12)
    for k in range(2, c.half + 1):
        assert abs(co.anticommutator_coefficient(c, k)) <= 1e-10
    with pytest.raises(BadK):
        co.anticommutator_coefficient(c, 0)
    with pytest.raises(BadK):
        co.anticommutator_coefficient(c, c.half + 1)


def test_eta_classical():
    assert co.eta_classical(co.derive(5)) == pytest.approx(3.3819660, abs=1e-7)
    c9 = co.derive(9)
    assert co.eta_classical(c9) == pytest.approx(7 + c9.gamma, abs=1e-14)


def test_kcbs_reference():
    cl, q = co.kcbs_reference(5)
    assert cl == 3.0
    assert q == pytest.approx(3.9442719, abs=1e-7)
    assert q == pytest.approx(4 * math.sqrt(5) - 5, abs=1e-12)
    assert co.kcbs_reference(7)[0] == 5.0
    for bad in (4, 3, 6, 1):
        with pytest.raises(BadN):
            co.kcbs_reference(bad)


@pytest.mark.parametrize("bad", [3, 7, 11, 13, 15, 2, 0, -5, 5.0, True])
def test_derive_rejects_bad_n(bad):
    with pytest.raises(BadN):
        co.derive(bad)


def test_large_n_behind_flag():
    with pytest.raises(BadN):
        co.derive(65)
    with pytest.warns(RuntimeWarning):
        c = co.derive(65, allow_large=True)
    assert abs(co.anticommutator_coefficient(c, 2)) < 1e-10


def test_to_dict_is_explicit():
    d = co.derive(9).to_dict()
    for key in ("n", "m", "alpha", "phi", "beta", "alpha_bar", "c", "d", "gamma", "eta_q", "eta_c"):
        assert key in d
