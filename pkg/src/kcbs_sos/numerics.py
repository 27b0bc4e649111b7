"""Dense complex linear algebra used throughout the package.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``. The
helpers here add the checks the rest of the code relies on (Hermiticity,
positivity) and a deterministic eigenvector phase convention so that outputs
are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD, NotUnitary

HERMITIAN_TOL = 1e-12
PSD_FAIL = 1e-8
PHASE_EPS = 1e-10
ROUNDING = 64 * np.finfo(float).eps


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    return m


def as_vector(v) -> np.ndarray:
    x = np.asarray(v, dtype=complex)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {x.shape}")
    return x


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conjugate(a).T


def fro(a) -> float:
    return float(np.linalg.norm(a))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return fro(m - dagger(m)) <= tol * max(1.0, fro(m))


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix of shape {m.shape} is not square")
    if not is_hermitian(m, tol):
        raise NotHermitian(f"asymmetry {fro(m - dagger(m)):.3e} exceeds tolerance")
    return m


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def fix_phase(v: np.ndarray, eps: float = PHASE_EPS) -> np.ndarray:
    """Rotate ``v`` so its first component with modulus above ``eps`` is real positive."""
    v = np.array(v, dtype=complex)
    for x in v:
        if abs(x) > eps:
            return v * (abs(x) / x)
    return v


def hermitian_eig(a, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in descending order.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns, matching ``eigenvalues``; each
        column carries the phase convention of :func:`fix_phase`.
    """
    m = check_hermitian(a, tol)
    try:
        w, v = np.linalg.eigh(hermitize(m))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(v.shape[1]):
        v[:, j] = fix_phase(v[:, j])
    return w, v


def psd_sqrt(f) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Negative eigenvalues down to ``-PSD_FAIL`` are clamped to zero, anything
    below raises :class:`NotPSD`. Eigenvalues at rounding level (relative to
    the spectral radius) are also set to zero, otherwise their square roots
    would surface as ~1e-8 noise on exact projectors.
    """
    w, v = hermitian_eig(f)
    if w.size and w[-1] < -PSD_FAIL:
        raise NotPSD(f"smallest eigenvalue {w[-1]:.3e} is negative")
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    w = np.where(w <= ROUNDING * scale, 0.0, w)
    root = np.sqrt(w)
    return hermitize((v * root) @ dagger(v))


def orthonormal_basis(vectors, tol: float = 1e-10) -> list[np.ndarray]:
    """Gram-Schmidt with one re-orthogonalisation pass.

    Vectors whose residual after projection falls below ``tol`` are dropped.
    """
    basis: list[np.ndarray] = []
    dim = None
    for v in vectors:
        x = as_vector(v).copy()
        if dim is None:
            dim = x.size
        elif x.size != dim:
            raise DimensionMismatch("vectors do not share one dimension")
        for _ in range(2):
            for b in basis:
                x = x - np.vdot(b, x) * b
        nrm = np.linalg.norm(x)
        if nrm >= tol:
            basis.append(x / nrm)
    return basis


def check_unitary(u, tol: float = 1e-10) -> np.ndarray:
    m = as_matrix(u)
    if m.shape[0] != m.shape[1]:
        raise NotUnitary(f"matrix of shape {m.shape} is not square")
    err = fro(dagger(m) @ m - np.eye(m.shape[0]))
    if err > tol * max(1.0, m.shape[0]):
        raise NotUnitary(f"U^dag U differs from identity by {err:.3e}")
    return m


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_effect(dim: int, rng: np.random.Generator) -> np.ndarray:
    """A generic effect 0 <= F <= 1 with spectrum spread over [0, 1]."""
    u = random_unitary(dim, rng)
    return hermitize((u * rng.uniform(0.0, 1.0, dim)) @ dagger(u))


# JSON wire format shared by every module: {"rows", "cols", "re", "im"} with
# row-major entries; vectors use {"dim", "re", "im"}.

def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    rows, cols = int(doc["rows"]), int(doc["cols"])
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc.get("im", [0.0] * len(re)), dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch(f"expected {rows * cols} entries, got {re.size}/{im.size}")
    return (re + 1j * im).reshape(rows, cols)


def vector_to_json(v) -> dict:
    x = as_vector(v)
    return {
        "dim": int(x.size),
        "re": [float(t) for t in x.real],
        "im": [float(t) for t in x.imag],
    }


def vector_from_json(doc: dict) -> np.ndarray:
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc.get("im", [0.0] * len(re)), dtype=float)
    if "dim" in doc and int(doc["dim"]) != re.size:
        raise DimensionMismatch(f"dim {doc['dim']} does not match {re.size} entries")
    return re + 1j * im
