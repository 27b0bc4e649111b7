"""See-saw lower bounds on the quantum value of B_n.

With the observables fixed the best state is the top eigenvector of B_n; with
the state and the other observables fixed, B_n is linear in A_i, so the best
A_i in [-1, 1] is the sign of its gradient. Alternating the two never lowers
the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .coefficients import SosCoefficients, derive
from .operators import build_Bn
from .realization import Realization

ZERO_TOL = 1e-12
CONVERGED = 1e-12


def optimal_state(B) -> tuple[np.ndarray, float]:
    w, v = nx.hermitian_eig(B, tol=1e-9)
    return v[:, 0], float(w[0])


def sign_operator(H) -> np.ndarray:
    """+1 on the non-negative eigenspace of H (rounding-level zeros count as +), -1 elsewhere."""
    w, v = nx.hermitian_eig(H, tol=1e-9)
    scale = max(1.0, float(np.max(np.abs(w))))
    signs = np.where(w >= -ZERO_TOL * scale, 1.0, -1.0)
    return nx.hermitize((v * signs) @ nx.dagger(v))


def optimal_observable(i: int, psi, A, coeffs: SosCoefficients) -> np.ndarray:
    """Best A_i for fixed state and neighbours; ``A[i]`` itself is ignored."""
    n = coeffs.n
    psi = nx.as_vector(psi)
    rho = np.outer(psi, np.conj(psi))
    C = A[(i - 1) % n] + A[(i + 1) % n]
    H = -0.5 * (C @ rho + rho @ C) - coeffs.gamma * rho
    return sign_operator(nx.hermitize(H))


def _value(coeffs, psi, A) -> float:
    return float(np.vdot(psi, build_Bn(coeffs, A) @ psi).real)


def _random_observable(dim: int, rng: np.random.Generator) -> np.ndarray:
    u = nx.random_unitary(dim, rng)
    signs = rng.choice([-1.0, 1.0], size=dim)
    return nx.hermitize((u * signs) @ nx.dagger(u))


@dataclass
class SeesawTrace:
    n: int
    dim: int
    restarts: int
    iterations: list[int] = field(default_factory=list)
    values: list[list[float]] = field(default_factory=list)
    best_value: float = -np.inf
    best_realization: Realization | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "dim": self.dim,
            "restarts": self.restarts,
            "iterations": self.iterations,
            "final_values": [v[-1] for v in self.values],
            "best_value": self.best_value,
        }


def run_restart(coeffs: SosCoefficients, dim: int, max_iters: int, rng: np.random.Generator):
    n = coeffs.n
    A = [_random_observable(dim, rng) for _ in range(n)]
    psi = nx.random_state(dim, rng)
    values = []
    for _ in range(max_iters):
        psi, _ = optimal_state(build_Bn(coeffs, A))
        for i in range(n):
            A[i] = optimal_observable(i, psi, A, coeffs)
        values.append(_value(coeffs, psi, A))
        if len(values) > 1 and abs(values[-1] - values[-2]) < CONVERGED:
            break
    return psi, A, values


def seesaw(n: int, dim: int = 3, restarts: int = 20, max_iters: int = 500, seed: int = 0,
           coeffs: SosCoefficients | None = None) -> SeesawTrace:
    if dim < 3:
        raise ValueError("dim must be at least 3")
    coeffs = coeffs or derive(n)
    trace = SeesawTrace(n, dim, restarts)
    for ss in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(ss)
        psi, A, values = run_restart(coeffs, dim, max_iters, rng)
        trace.iterations.append(len(values))
        trace.values.append(values)
        if values[-1] > trace.best_value:
            trace.best_value = values[-1]
            trace.best_realization = Realization.from_observables(psi, A)
    return trace
