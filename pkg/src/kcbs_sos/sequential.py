"""Preparation followed by two sequential binary measurements.

The '+' outcome of setting i updates the state with the Hermitian Kraus operator
sqrt(F_i); the '-' outcome uses sqrt(1 - F_i), optionally twisted by a unitary
to probe how much the Hermitian choice matters. Contexts are ordered pairs
(first, second) of neighbouring settings, with 0-based indices.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .coefficients import SosCoefficients
from .errors import DimensionMismatch, EffectOutOfRange, MissingContext
from .operators import build_Bn, build_Btilde
from .realization import Realization

OUTCOMES = (1, -1)


def kraus(F, outcome: int, minus_unitary=None) -> np.ndarray:
    f = nx.check_hermitian(F, tol=1e-10)
    w = np.linalg.eigvalsh(nx.hermitize(f))
    if w[0] < -1e-8 or w[-1] > 1.0 + 1e-8:
        raise EffectOutOfRange(f"effect spectrum [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]")
    if outcome == 1:
        return nx.psd_sqrt(f)
    if outcome == -1:
        k = nx.psd_sqrt(np.eye(f.shape[0]) - f)
        if minus_unitary is not None:
            k = nx.check_unitary(minus_unitary) @ k
        return k
    raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")


def contexts(n: int):
    """Ordered neighbouring pairs (i, i+1) and (i, i-1), in a fixed order."""
    for i in range(n):
        yield i, (i + 1) % n
        yield i, (i - 1) % n


@dataclass
class SequentialStatistics:
    n: int
    joint: dict[tuple[int, int, int, int], float]
    marginal: dict[tuple[int, int], float]
    shots: int | str = "exact"

    def prob(self, first: int, second: int, a: int, b: int) -> float:
        try:
            return self.joint[(first, second, a, b)]
        except KeyError:
            raise MissingContext(f"no statistics for context ({first}, {second})") from None

    def correlator(self, first: int, second: int) -> float:
        return sum(a * b * self.prob(first, second, a, b) for a in OUTCOMES for b in OUTCOMES)

    def mean(self, i: int) -> float:
        try:
            return self.marginal[(i, 1)] - self.marginal[(i, -1)]
        except KeyError:
            raise MissingContext(f"no marginal for setting {i}") from None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "shots": self.shots,
            "joint": [
                {"first": i, "second": j, "a": a, "b": b, "p": p}
                for (i, j, a, b), p in sorted(self.joint.items())
            ],
            "marginal": [{"setting": i, "a": a, "p": p} for (i, a), p in sorted(self.marginal.items())],
        }

    def correlators_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["first", "second", "correlator", "p_pp", "p_pm", "p_mp", "p_mm"])
        for i, j in contexts(self.n):
            probs = [self.prob(i, j, a, b) for a in OUTCOMES for b in OUTCOMES]
            out.writerow([i, j, repr(self.correlator(i, j)), *map(repr, probs)])
        return buf.getvalue()


def _kraus_table(r: Realization, minus_unitary):
    return [{o: kraus(f, o, minus_unitary) for o in OUTCOMES} for f in r.effects]


def exact_statistics(r: Realization, minus_unitary=None) -> SequentialStatistics:
    table = _kraus_table(r, minus_unitary)
    joint, marginal = {}, {}
    for i, j in contexts(r.n):
        for a in OUTCOMES:
            post = table[i][a] @ r.psi
            for b in OUTCOMES:
                joint[(i, j, a, b)] = float(np.linalg.norm(table[j][b] @ post) ** 2)
    for i, f in enumerate(r.effects):
        p = float(np.vdot(r.psi, f @ r.psi).real)
        marginal[(i, 1)] = p
        marginal[(i, -1)] = 1.0 - p
    return SequentialStatistics(r.n, joint, marginal, "exact")


def sample_statistics(r: Realization, shots: int, seed: int, minus_unitary=None) -> SequentialStatistics:
    """Frequencies from ``shots`` runs of every context.

    Each context draws from its own Philox stream spawned from ``seed``, so
    tables are reproducible and independent of evaluation order. Marginals
    are the first-outcome frequencies of context (i, i+1).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    exact = exact_statistics(r, minus_unitary)
    streams = np.random.SeedSequence(seed).spawn(2 * r.n)
    joint, marginal = {}, {}
    for (i, j), ss in zip(contexts(r.n), streams):
        rng = np.random.Generator(np.random.Philox(ss))
        p_first = sum(exact.joint[(i, j, 1, b)] for b in OUTCOMES)
        n_plus = int(rng.binomial(shots, min(max(p_first, 0.0), 1.0)))
        counts = {1: n_plus, -1: shots - n_plus}
        for a in OUTCOMES:
            pa = sum(exact.joint[(i, j, a, b)] for b in OUTCOMES)
            p_second = exact.joint[(i, j, a, 1)] / pa if pa > 0 else 0.0
            k_plus = int(rng.binomial(counts[a], min(max(p_second, 0.0), 1.0)))
            joint[(i, j, a, 1)] = k_plus / shots
            joint[(i, j, a, -1)] = (counts[a] - k_plus) / shots
        if j == (i + 1) % r.n:
            marginal[(i, 1)] = counts[1] / shots
            marginal[(i, -1)] = counts[-1] / shots
    return SequentialStatistics(r.n, joint, marginal, shots)


def evaluate_expression(stats: SequentialStatistics, coeffs: SosCoefficients, penalized: bool = False) -> float:
    """Value of the modified cycle expression computed from outcome statistics."""
    n = coeffs.n
    if stats.n != n:
        raise DimensionMismatch(f"statistics for n={stats.n}, coefficients for n={n}")
    total = 0.0
    for i in range(n):
        nxt = (i + 1) % n
        total -= 0.5 * (stats.correlator(i, nxt) + stats.correlator(nxt, i))
        total -= coeffs.gamma * stats.mean(i)
    if penalized:
        for i in range(n):
            total -= stats.prob((i + 1) % n, i, 1, 1) + stats.prob((i - 1) % n, i, 1, 1)
    return total


def operator_value(r: Realization, coeffs: SosCoefficients, penalized: bool = False) -> float:
    """<psi|B_n|psi>, or the penalized operator when ``penalized``."""
    if penalized:
        B = build_Btilde(coeffs, r.effects)
    else:
        B = build_Bn(coeffs, r.observables)
    return float(np.vdot(r.psi, B @ r.psi).real)


def value_gap(r: Realization, coeffs: SosCoefficients, penalized: bool = False, minus_unitary=None) -> dict:
    """Statistics-based value, operator value and their difference.

    The two coincide for projective effects; for unsharp effects the
    sequential correlator under the sqrt(F) instrument is not the symmetrised
    product 1/2<{A_i, A_j}>, and the gap quantifies by how much.
    """
    stats_value = evaluate_expression(exact_statistics(r, minus_unitary), coeffs, penalized)
    op_value = operator_value(r, coeffs, penalized)
    return {"statistics": stats_value, "operator": op_value, "gap": stats_value - op_value}
