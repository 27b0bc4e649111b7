"""Inequality operators and their sum-of-squares certificates.

A certificate is a list of matrices ``E_k`` with
``eta * 1 - B == sum_k E_k^dag E_k``; the residual of that identity is stored
so it can be checked for arbitrary (not just optimal) measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .coefficients import SosCoefficients, kcbs_alpha
from .errors import DimensionMismatch, EffectOutOfRange
from .realization import stabilizer_matrix

RANGE_TOL = 1e-8


@dataclass
class SosCertificate:
    n: int
    eta: float
    terms: list[np.ndarray]
    residual: float
    labels: list[str] = field(default_factory=list)

    def gram_sum(self) -> np.ndarray:
        return sum(nx.dagger(e) @ e for e in self.terms)

    def term_norms(self, psi) -> np.ndarray:
        """``||E_k psi||`` for every term; all vanish exactly when psi attains eta."""
        psi = nx.as_vector(psi)
        return np.array([np.linalg.norm(e @ psi) for e in self.terms])


def _observables(A, n: int | None = None) -> list[np.ndarray]:
    obs = [nx.check_hermitian(a, tol=1e-10) for a in A]
    if n is not None and len(obs) != n:
        raise DimensionMismatch(f"expected {n} observables, got {len(obs)}")
    shape = obs[0].shape
    if any(a.shape != shape for a in obs):
        raise DimensionMismatch("observables do not share one dimension")
    return obs


def _check_effects(F, n: int) -> list[np.ndarray]:
    eff = _observables(F, n)
    for j, f in enumerate(eff):
        w, _ = nx.hermitian_eig(f, tol=1e-10)
        if w[-1] < -RANGE_TOL or w[0] > 1.0 + RANGE_TOL:
            raise EffectOutOfRange(f"effect {j} has spectrum [{w[-1]:.3e}, {w[0]:.3e}]")
    return eff


def _check_squares(obs) -> None:
    for j, a in enumerate(obs):
        top = np.max(np.abs(np.linalg.eigvalsh(nx.hermitize(a))))
        if top**2 > 1.0 + RANGE_TOL:
            raise EffectOutOfRange(f"A_{j}^2 has eigenvalue {top**2:.6f} > 1")


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def _cycle_operator(obs, weight: float) -> np.ndarray:
    n = len(obs)
    out = np.zeros_like(obs[0])
    for i in range(n):
        out -= 0.5 * anticommutator(obs[i], obs[(i + 1) % n])
        out -= weight * obs[i]
    return out


def build_B5(A) -> np.ndarray:
    """-1/2 sum {A_i, A_{i+1}} - alpha^2 sum A_i for the pentagon."""
    obs = _observables(A, 5)
    return _cycle_operator(obs, kcbs_alpha(5) ** 2)


def build_Bn(coeffs: SosCoefficients, A) -> np.ndarray:
    obs = _observables(A, coeffs.n)
    return _cycle_operator(obs, coeffs.gamma)


def _residual(eta: float, B: np.ndarray, terms) -> float:
    eye = np.eye(B.shape[0])
    return nx.fro(eta * eye - B - sum(nx.dagger(e) @ e for e in terms))


def sos_certificate_B5(A) -> SosCertificate:
    """The pentagon certificate, built from its own hand-derived stabilizers."""
    obs = _observables(A, 5)
    _check_squares(obs)
    al = kcbs_alpha(5)
    eye = np.eye(obs[0].shape[0])
    terms, labels = [], []
    for i in range(5):
        m1 = -(obs[i] + al * obs[(i - 1) % 5] + al * obs[(i + 1) % 5]) / al**3
        terms.append(math.sqrt(al**5 / 5) * (eye - m1))
        labels.append(f"M[{i},1]")
    for i in range(5):
        m2 = -(-al * obs[i] + obs[(i - 2) % 5] + obs[(i + 2) % 5]) / al**4
        terms.append(math.sqrt(al**8 / 10) * (eye - m2))
        labels.append(f"M[{i},2]")
    for i in range(5):
        terms.append(nx.psd_sqrt((eye - obs[i] @ obs[i]) / (2 * al)))
        labels.append(f"square[{i}]")
    eta = 3.0 * (1.0 + al**2)
    B = _cycle_operator(obs, al**2)
    return SosCertificate(5, eta, terms, _residual(eta, B, terms), labels)


def _bn_terms(coeffs: SosCoefficients, obs):
    n = coeffs.n
    eye = np.eye(obs[0].shape[0])
    terms, labels = [], []
    for k in sorted(coeffs.c):
        w = math.sqrt(coeffs.c[k])
        for i in range(n):
            terms.append(w * (eye - stabilizer_matrix(coeffs, obs, i, k)))
            labels.append(f"M[{i},{k}]")
    for i in range(n):
        terms.append(nx.psd_sqrt(coeffs.d * (eye - obs[i] @ obs[i])))
        labels.append(f"square[{i}]")
    return terms, labels


def sos_certificate_Bn(coeffs: SosCoefficients, F) -> SosCertificate:
    eff = _check_effects(F, coeffs.n)
    eye = np.eye(eff[0].shape[0])
    obs = [2.0 * f - eye for f in eff]
    terms, labels = _bn_terms(coeffs, obs)
    B = _cycle_operator(obs, coeffs.gamma)
    return SosCertificate(coeffs.n, coeffs.eta_q, terms, _residual(coeffs.eta_q, B, terms), labels)


def _penalty_terms(eff):
    n = len(eff)
    kraus = [nx.psd_sqrt(f) for f in eff]
    terms, labels = [], []
    for i in range(n):
        terms.append(kraus[i] @ kraus[(i + 1) % n])
        labels.append(f"K[{i}]K[{(i + 1) % n}]")
    for i in range(n):
        terms.append(kraus[i] @ kraus[(i - 1) % n])
        labels.append(f"K[{i}]K[{(i - 1) % n}]")
    return terms, labels


def build_Btilde(coeffs: SosCoefficients, F) -> np.ndarray:
    """B_n minus the sequential ++ probabilities of every adjacent ordered pair."""
    eff = _check_effects(F, coeffs.n)
    eye = np.eye(eff[0].shape[0])
    B = _cycle_operator([2.0 * f - eye for f in eff], coeffs.gamma)
    terms, _ = _penalty_terms(eff)
    return B - sum(nx.dagger(t) @ t for t in terms)


def sos_certificate_Btilde(coeffs: SosCoefficients, F) -> SosCertificate:
    eff = _check_effects(F, coeffs.n)
    eye = np.eye(eff[0].shape[0])
    obs = [2.0 * f - eye for f in eff]
    terms, labels = _bn_terms(coeffs, obs)
    pen, pen_labels = _penalty_terms(eff)
    B = _cycle_operator(obs, coeffs.gamma) - sum(nx.dagger(t) @ t for t in pen)
    terms += pen
    labels += pen_labels
    return SosCertificate(coeffs.n, coeffs.eta_q, terms, _residual(coeffs.eta_q, B, terms), labels)
