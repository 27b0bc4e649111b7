"""Constructive self-test: certify a realization as the canonical qutrit one.

A realization attaining the quantum bound must satisfy three families of
relations on its state (stabilizer, squares, neighbour orthogonality). From
those the pipeline

1. builds the invariant subspace V = span{psi, A_1 psi, A_3 psi},
2. compresses state and effects onto V,
3. reads off the rank-1 projectors |v_i><v_i|,
4. rotates them into the canonical frame with an explicit 3x3 unitary,

and reports every residual along the way. Indices are 0-based: observable
``j`` carries cycle label ``j + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nx
from .coefficients import SosCoefficients, kcbs_alpha
from .errors import (
    ConditionViolation,
    DegenerateSubspace,
    DimensionMismatch,
    KcbsError,
    NotRankOne,
    OverlapMismatch,
    PhaseResidual,
)
from .realization import Realization, canonical_vectors

DEFAULT_TOL = 1e-7


def check_relations(r: Realization, coeffs: SosCoefficients) -> dict[str, float]:
    """Residual norms of the relations every optimal realization satisfies."""
    n = coeffs.n
    if r.n != n:
        raise DimensionMismatch(f"realization has {r.n} effects, coefficients are for n={n}")
    al = coeffs.alpha
    psi = r.psi
    A = r.observables
    F = r.effects
    out: dict[str, float] = {}
    for i in range(n):
        lhs = (A[i] + al * A[(i + 1) % n] + al * A[(i - 1) % n]) @ psi
        out[f"stabilizer[{i}]"] = float(np.linalg.norm(lhs - (1.0 - 2.0 * al) * psi))
    for i in range(n):
        out[f"squares[{i}]"] = float(np.linalg.norm(A[i] @ (A[i] @ psi) - psi))
    for i in range(n):
        out[f"orthogonality[{i},+]"] = float(np.linalg.norm(F[i] @ (F[(i + 1) % n] @ psi)))
        out[f"orthogonality[{i},-]"] = float(np.linalg.norm(F[i] @ (F[(i - 1) % n] @ psi)))
    return out


def _candidate_pairs(n: int):
    yield 0, 2
    for pair in itertools.combinations(range(n), 2):
        if pair != (0, 2):
            yield pair


def invariant_subspace(r: Realization, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Isometry onto span{psi, A_i psi, A_j psi} and its invariance residual.

    Returns ``P`` (3 x D, orthonormal rows, first row along psi) and
    ``max_i ||(1 - P^dag P) A_i P^dag||_F``. The pair (1, 3) is tried first;
    if it spans fewer than three dimensions every other pair is tried in
    lexicographic order.
    """
    A = r.observables
    span_tol = 10.0 * tol
    basis = None
    if r.dim >= 3:
        for i, j in _candidate_pairs(r.n):
            b = nx.orthonormal_basis([r.psi, A[i] @ r.psi, A[j] @ r.psi], tol=span_tol)
            if len(b) == 3:
                basis = b
                break
    if basis is None:
        raise DegenerateSubspace("no triple {psi, A_i psi, A_j psi} spans three dimensions")
    Q = np.column_stack(basis)
    P = nx.dagger(Q)
    outside = np.eye(r.dim) - Q @ P
    residual = max(nx.fro(outside @ a @ Q) for a in A)
    return P, float(residual)


def projection_residuals(projected: Realization) -> dict[str, float]:
    n = projected.n
    al = kcbs_alpha(n)
    F = projected.effects
    psi = projected.psi
    out = {}
    for i in range(n):
        out[f"orthogonality[{i},+]"] = float(np.linalg.norm(F[i] @ F[(i + 1) % n] @ psi))
        out[f"orthogonality[{i},-]"] = float(np.linalg.norm(F[i] @ F[(i - 1) % n] @ psi))
        lhs = (F[i] + al * F[(i - 1) % n] + al * F[(i + 1) % n]) @ psi
        out[f"stabilizer[{i}]"] = float(np.linalg.norm(lhs - psi))
        out[f"idempotence[{i}]"] = float(np.linalg.norm(F[i] @ (F[i] @ psi) - F[i] @ psi))
    return out


def project(r: Realization, P: np.ndarray, tol: float = DEFAULT_TOL) -> Realization:
    """Compress onto the subspace of ``P`` and check the compressed relations."""
    psi = P @ r.psi
    nrm = np.linalg.norm(psi)
    if nrm < tol:
        raise ConditionViolation("state has no weight on the subspace", residual=1.0)
    Pd = nx.dagger(P)
    projected = Realization(psi / nrm, tuple(nx.hermitize(P @ f @ Pd) for f in r.effects))
    res = projection_residuals(projected)
    worst = max(res, key=res.get)
    if res[worst] > tol:
        raise ConditionViolation(f"{worst} = {res[worst]:.3e} exceeds {tol:.1e}", residual=res[worst])
    return projected


def extract_vectors(projected: Realization, tol: float = DEFAULT_TOL) -> tuple[list[np.ndarray], list[float]]:
    """Unit vectors v_i with F_i = |v_i><v_i|, plus each effect's second eigenvalue.

    Besides rank one, checks the overlap pattern forced by the relations:
    neighbours orthogonal, |<v_{i-1}|v_{i+1}>| = (1 - alpha)/alpha and
    |<psi|v_i>| the same for every i.
    """
    n = projected.n
    al = kcbs_alpha(n)
    vectors, gaps = [], []
    for i, f in enumerate(projected.effects):
        w, v = nx.hermitian_eig(f, tol=1e-9)
        gaps.append(float(w[1]))
        if w[0] < 1.0 - tol or abs(w[1]) > tol or w[-1] < -tol:
            raise NotRankOne(f"effect {i} has spectrum {np.round(w, 12).tolist()}", index=i,
                             residual=float(max(1.0 - w[0], abs(w[1]))))
        vectors.append(v[:, 0])

    target = (1.0 - al) / al
    for i in range(n):
        nb = abs(np.vdot(vectors[i], vectors[(i + 1) % n]))
        if nb > tol:
            raise OverlapMismatch(f"<v_{i}|v_{(i + 1) % n}> = {nb:.3e}", index=i, residual=nb)
        far = abs(np.vdot(vectors[(i - 1) % n], vectors[(i + 1) % n]))
        if abs(far - target) > tol:
            raise OverlapMismatch(f"|<v_{(i - 1) % n}|v_{(i + 1) % n}>| = {far:.9f}, expected {target:.9f}",
                                  index=i, residual=abs(far - target))
    overlaps = np.array([abs(np.vdot(projected.psi, v)) for v in vectors])
    if overlaps.min() < tol:
        i = int(np.argmin(overlaps))
        raise OverlapMismatch(f"state orthogonal to v_{i}", index=i, residual=float(overlaps.min()))
    spread = float(overlaps.max() - overlaps.min())
    if spread > tol:
        raise OverlapMismatch(f"|<psi|v_i>| varies by {spread:.3e}", residual=spread)
    return vectors, gaps


def _frame_for(psi: np.ndarray) -> np.ndarray:
    # unitary whose first row is psi^dag, so it sends psi to (1, 0, 0)
    basis = nx.orthonormal_basis([psi, *np.eye(psi.size)], tol=1e-6)
    return nx.dagger(np.column_stack(basis))


def gauge_fix(psi_tilde, vectors, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, list[float]]:
    """Unitary U on C^3 taking the extracted data to the canonical frame.

    U = U2 U1 U0: U0 sends the state to (1, 0, 0); U1 acts on the last two
    coordinates and turns the last vector into (cos t, 0, sin t); U2 rephases
    the second coordinate so the first vector's middle entry is real and
    non-negative. Vectors are compared as projectors, so each is rephased to
    a positive first entry along the way.

    Returns U and the Frobenius distances ||U v_i v_i^dag U^dag - P_i|| to the
    canonical projectors P_i.
    """
    psi = nx.as_vector(psi_tilde)
    n = len(vectors)
    U0 = _frame_for(psi / np.linalg.norm(psi))

    def positive_first(x):
        if abs(x[0]) < tol:
            raise OverlapMismatch("vector orthogonal to the state", residual=float(abs(x[0])))
        return x * (np.conj(x[0]) / abs(x[0]))

    w = [positive_first(U0 @ v) for v in vectors]

    u = w[-1][1:]
    s = np.linalg.norm(u)
    if s < tol:
        raise OverlapMismatch("last vector is parallel to the state", index=n - 1, residual=float(s))
    U1 = np.eye(3, dtype=complex)
    U1[1:, 1:] = np.array([[u[1], -u[0]], [np.conj(u[0]), np.conj(u[1])]]) / s
    w = [U1 @ x for x in w]

    mid = w[0][1]
    if abs(mid) < tol:
        raise OverlapMismatch("first vector has no component out of the reference plane",
                              index=0, residual=float(abs(mid)))
    U2 = np.diag([1.0, np.conj(mid) / abs(mid), 1.0])
    w = [U2 @ x for x in w]

    worst_imag = max(float(np.max(np.abs(x.imag))) for x in w)
    if worst_imag > tol:
        raise PhaseResidual(f"imaginary parts up to {worst_imag:.3e} remain after gauge fixing",
                            residual=worst_imag)

    U = U2 @ U1 @ U0
    ref = canonical_vectors(n)
    deviations = [
        nx.fro(np.outer(x, np.conj(x)) - np.outer(r, r)) for x, r in zip(w, ref)
    ]
    return U, deviations


@dataclass
class SelfTestReport:
    n: int
    threshold: float
    relation_residuals: dict[str, float] = field(default_factory=dict)
    subspace_dim: int = 0
    invariance_residual: float | None = None
    condition_residual: float | None = None
    projection: np.ndarray | None = None
    projected_state: np.ndarray | None = None
    extracted_vectors: list[np.ndarray] = field(default_factory=list)
    rank_gaps: list[float] = field(default_factory=list)
    gauge_unitary: np.ndarray | None = None
    deviations: list[float] = field(default_factory=list)
    state_deviation: float | None = None
    verdict: str = "fail"
    failed_stage: str | None = None
    failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def max_deviation(self) -> float:
        return max(self.deviations) if self.deviations else float("inf")

    def to_json(self) -> dict:
        def mat(a):
            return None if a is None else nx.matrix_to_json(a)

        def vec(v):
            return None if v is None else nx.vector_to_json(v)

        return {
            "n": self.n,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "failed_stage": self.failed_stage,
            "failure": self.failure,
            "relation_residuals": self.relation_residuals,
            "subspace_dim": self.subspace_dim,
            "invariance_residual": self.invariance_residual,
            "condition_residual": self.condition_residual,
            "projection": mat(self.projection),
            "projected_state": vec(self.projected_state),
            "extracted_vectors": [vec(v) for v in self.extracted_vectors],
            "rank_gaps": self.rank_gaps,
            "gauge_unitary": mat(self.gauge_unitary),
            "deviations": self.deviations,
            "state_deviation": self.state_deviation,
        }


def self_test(r: Realization, coeffs: SosCoefficients, tol: float = DEFAULT_TOL) -> SelfTestReport:
    """Run the whole pipeline; failures end up in the report instead of raising."""
    report = SelfTestReport(n=coeffs.n, threshold=tol)
    stage = "relations"
    try:
        report.relation_residuals = check_relations(r, coeffs)
        worst = max(report.relation_residuals, key=report.relation_residuals.get)
        if report.relation_residuals[worst] > tol:
            raise ConditionViolation(f"{worst} = {report.relation_residuals[worst]:.3e}",
                                     residual=report.relation_residuals[worst])

        stage = "subspace"
        P, report.invariance_residual = invariant_subspace(r, tol)
        report.projection = P
        report.subspace_dim = P.shape[0]
        if report.invariance_residual > tol:
            raise DegenerateSubspace(f"subspace leaks by {report.invariance_residual:.3e}",
                                     residual=report.invariance_residual)

        stage = "projection"
        projected = project(r, P, tol)
        report.condition_residual = max(projection_residuals(projected).values())
        report.projected_state = projected.psi

        stage = "extraction"
        vectors, report.rank_gaps = extract_vectors(projected, tol)
        report.extracted_vectors = vectors

        stage = "gauge"
        U, report.deviations = gauge_fix(projected.psi, vectors, tol)
        report.gauge_unitary = U
        e0 = np.array([1.0, 0.0, 0.0])
        report.state_deviation = float(np.linalg.norm(U @ projected.psi - e0))

        stage = "certificate"
        checks = [report.max_deviation, report.state_deviation, *map(abs, report.rank_gaps)]
        if max(checks) > tol:
            raise ConditionViolation(f"deviation from canonical {max(checks):.3e} exceeds {tol:.1e}",
                                     residual=max(checks))
    except KcbsError as exc:
        report.failed_stage = stage
        report.failure = f"{type(exc).__name__}: {exc}"
        return report
    report.verdict = "pass"
    return report
