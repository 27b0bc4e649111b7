"""Quantum realizations: a state plus n binary effects on C^D.

The canonical qutrit realization puts the state at (1, 0, 0) and uses rank-1
projectors onto real vectors spread around a cone so that neighbours in the
cycle are orthogonal. :func:`embed` hides any realization inside a larger space
behind junk effects and a global unitary, which is what the self-test has to
undo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .coefficients import SosCoefficients, cycle_angle, kcbs_alpha
from .errors import BadK, BadN, DimensionMismatch, EffectOutOfRange, Singular

EFFECT_TOL = 1e-10


@dataclass(frozen=True)
class Realization:
    """State ``psi`` and effects ``effects[j]`` (label j + 1) on a common space."""

    psi: np.ndarray
    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        psi = nx.as_vector(self.psi)
        effects = tuple(nx.as_matrix(f) for f in self.effects)
        for f in effects:
            if f.shape != (psi.size, psi.size):
                raise DimensionMismatch(f"effect of shape {f.shape} on a {psi.size}-dim state")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return int(self.psi.size)

    @property
    def n(self) -> int:
        return len(self.effects)

    @property
    def observables(self) -> list[np.ndarray]:
        eye = np.eye(self.dim)
        return [2.0 * f - eye for f in self.effects]

    @classmethod
    def from_observables(cls, psi, observables) -> "Realization":
        obs = [nx.as_matrix(a) for a in observables]
        eye = np.eye(len(psi))
        return cls(psi, tuple(0.5 * (a + eye) for a in obs))

    def validate(self, tol: float = EFFECT_TOL) -> "Realization":
        """Raise unless psi is a unit vector and every effect satisfies 0 <= F <= 1."""
        nrm = np.linalg.norm(self.psi)
        if abs(nrm - 1.0) > 1e-9:
            raise DimensionMismatch(f"state norm {nrm:.12f} is not 1")
        for j, f in enumerate(self.effects):
            w, _ = nx.hermitian_eig(f, tol=1e-9)
            if w[-1] < -tol or w[0] > 1.0 + tol:
                raise EffectOutOfRange(f"effect {j} has spectrum [{w[-1]:.3e}, {w[0]:.3e}]")
        return self

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "psi": nx.vector_to_json(self.psi),
            "effects": [nx.matrix_to_json(f) for f in self.effects],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Realization":
        psi = nx.vector_from_json(doc["psi"])
        if "dim" in doc and int(doc["dim"]) != psi.size:
            raise DimensionMismatch(f"dim {doc['dim']} does not match state of size {psi.size}")
        return cls(psi, tuple(nx.matrix_from_json(f) for f in doc["effects"]))


def _check_cycle_n(n) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 5 or n % 2 == 0:
        raise BadN(f"n={n!r} must be an odd integer >= 5")


def canonical_vectors(n: int) -> np.ndarray:
    """Rows are the real unit vectors of the canonical qutrit realization, labels 1..n."""
    _check_cycle_n(n)
    alpha = kcbs_alpha(n)
    cos_t = 1.0 / math.sqrt(1.0 + 2.0 * alpha)
    sin_t = math.sqrt(2.0 * alpha / (1.0 + 2.0 * alpha))
    rows = []
    for i in range(1, n + 1):
        ph = cycle_angle(n, i)
        rows.append((cos_t, sin_t * math.sin(ph), sin_t * math.cos(ph)))
    return np.array(rows)


def canonical(n: int) -> Realization:
    vecs = canonical_vectors(n)
    psi = np.array([1.0, 0.0, 0.0], dtype=complex)
    return Realization(psi, tuple(np.outer(v, v).astype(complex) for v in vecs))


def deterministic(assignment, dim: int = 3) -> Realization:
    """Commuting diagonal projectors reproducing a fixed +-1 value assignment."""
    eye = np.eye(dim, dtype=complex)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    effects = []
    for a in assignment:
        if a not in (1, -1):
            raise ValueError(f"assignment entries must be +-1, got {a!r}")
        effects.append(eye.copy() if a == 1 else np.zeros((dim, dim), dtype=complex))
    return Realization(psi, tuple(effects))


@dataclass(frozen=True)
class StabilizerCoefficients:
    a: float
    b: float
    b_prime: float
    k: int
    residual: float


def solve_stabilizer_coeffs(n: int, k: int) -> StabilizerCoefficients:
    """Find a, b, b' with (a A_i + b A_{i+k} + b' A_{i-k}) psi = psi for the canonical qutrit.

    The two transverse components give a 2x2 linear system for b/a and b'/a
    that no longer depends on i; the longitudinal component then fixes a.
    """
    _check_cycle_n(n)
    half = (n - 1) // 2
    if not isinstance(k, int) or not 1 <= k <= half:
        raise BadK(f"k={k!r} outside 1..{half}")
    ph = cycle_angle(n, k)
    if abs(math.sin(ph)) < 1e-12:
        raise Singular(f"sin(phi_{k}) vanishes for n={n}")
    system = np.array([[math.cos(ph), math.cos(ph)], [math.sin(ph), -math.sin(ph)]])
    rb, rb_prime = np.linalg.solve(system, np.array([-1.0, 0.0]))
    cos2t = 2.0 / (1.0 + 2.0 * kcbs_alpha(n)) - 1.0
    a = 1.0 / ((1.0 + rb + rb_prime) * cos2t)
    b, b_prime = a * rb, a * rb_prime

    can = canonical(n)
    obs = can.observables
    res = 0.0
    for i in range(n):
        m = a * obs[i] + b * obs[(i + k) % n] + b_prime * obs[(i - k) % n]
        res = max(res, float(np.linalg.norm(m @ can.psi - can.psi)))
    return StabilizerCoefficients(float(a), float(b), float(b_prime), k, res)


def stabilizer_matrix(coeffs: SosCoefficients, A, i: int, k: int) -> np.ndarray:
    """alpha_bar * [(1 - 2 beta_k) A_i + beta_k (A_{i+k} + A_{i-k})], indices mod n (0-based i)."""
    n = coeffs.n
    if len(A) != n:
        raise DimensionMismatch(f"expected {n} observables, got {len(A)}")
    if not isinstance(k, int) or not 1 <= k <= coeffs.half:
        raise BadK(f"k={k!r} outside 1..{coeffs.half}")
    shape = np.shape(A[0])
    if any(np.shape(a) != shape for a in A):
        raise DimensionMismatch("observables do not share one dimension")
    bk = coeffs.beta[k]
    return coeffs.alpha_bar * (
        (1.0 - 2.0 * bk) * A[i % n] + bk * (A[(i + k) % n] + A[(i - k) % n])
    )


def embed(r: Realization, extra: int, unitary=None, seed: int = 0) -> Realization:
    """Direct-sum ``r`` with ``extra`` junk dimensions, then rotate by a unitary.

    ``unitary`` is ``None`` (identity), ``"random"`` (Haar, from ``seed``) or an
    explicit matrix of size ``r.dim + extra``. Junk effects are Z^dag Z scaled
    to unit operator norm, Z complex Gaussian from ``seed``.
    """
    if extra < 0:
        raise ValueError("extra must be non-negative")
    rng = np.random.default_rng(seed)
    dim = r.dim + extra
    if unitary is None:
        u = np.eye(dim, dtype=complex)
    elif isinstance(unitary, str):
        if unitary != "random":
            raise ValueError(f"unknown unitary spec {unitary!r}")
        u = None
    else:
        u = nx.check_unitary(unitary)
        if u.shape[0] != dim:
            raise DimensionMismatch(f"unitary of size {u.shape[0]} for dimension {dim}")

    effects = []
    for f in r.effects:
        big = np.zeros((dim, dim), dtype=complex)
        big[: r.dim, : r.dim] = f
        if extra:
            z = rng.standard_normal((extra, extra)) + 1j * rng.standard_normal((extra, extra))
            junk = nx.dagger(z) @ z
            big[r.dim :, r.dim :] = nx.hermitize(junk / np.linalg.norm(junk, 2))
        effects.append(big)
    if u is None:
        u = nx.random_unitary(dim, rng)

    psi = np.zeros(dim, dtype=complex)
    psi[: r.dim] = r.psi
    return Realization(u @ psi, tuple(nx.hermitize(u @ f @ nx.dagger(u)) for f in effects))
