"""Exact classical values of cycle expressions by exhaustive +-1 assignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import SosCoefficients, eta_classical
from .errors import DimensionMismatch, TooLarge

MAX_N = 26
CHUNK_BITS = 18
TIE_TOL = 1e-12


@dataclass(frozen=True)
class CycleExpression:
    """sum_i pair_coeffs[i] a_i a_{i+1} + sum_i single_coeffs[i] a_i.

    ``pair_coeffs`` already merges both orders of each neighbouring pair, so it
    is twice the per-order weight of the operator form; ``penalized`` only
    records whether the sequential ++ penalties were attached (they vanish for
    every deterministic assignment without adjacent +1 pairs and never raise
    the value).
    """

    n: int
    pair_coeffs: tuple[float, ...]
    single_coeffs: tuple[float, ...]
    penalized: bool = False

    def __post_init__(self):
        if len(self.pair_coeffs) != self.n or len(self.single_coeffs) != self.n:
            raise DimensionMismatch("coefficient maps must cover i = 1..n")

    def value(self, assignment) -> float:
        a = np.asarray(assignment, dtype=float)
        return float(np.dot(self.pair_coeffs, a * np.roll(a, -1)) + np.dot(self.single_coeffs, a))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pair_coeffs": list(self.pair_coeffs),
            "single_coeffs": list(self.single_coeffs),
            "penalized": self.penalized,
            "pair_convention": "weight of a_i*a_{i+1} with both measurement orders merged",
        }


def modified_expression(coeffs: SosCoefficients, penalized: bool = False) -> CycleExpression:
    n = coeffs.n
    return CycleExpression(n, (-1.0,) * n, (-coeffs.gamma,) * n, penalized)


def kcbs_expression(n: int) -> CycleExpression:
    return CycleExpression(n, (-1.0,) * n, (0.0,) * n)


def decode(code: int, n: int) -> tuple[int, ...]:
    """Bit i set means a_i = -1."""
    return tuple(-1 if (code >> i) & 1 else 1 for i in range(n))


def brute_force(expr: CycleExpression) -> tuple[float, tuple[int, ...]]:
    """Maximum over all 2**n assignments and the smallest code attaining it.

    Assignments are enumerated in blocks of 2**CHUNK_BITS consecutive codes;
    within each block the value is computed for all codes at once.
    """
    n = expr.n
    if n > MAX_N:
        raise TooLarge(f"n={n} exceeds the enumeration budget n <= {MAX_N}")
    pair = np.asarray(expr.pair_coeffs, dtype=float)
    single = np.asarray(expr.single_coeffs, dtype=float)
    shifts = np.arange(n, dtype=np.int64)
    total = 1 << n
    step = min(total, 1 << CHUNK_BITS)

    best_val = -np.inf
    best_code = 0
    for start in range(0, total, step):
        codes = np.arange(start, min(start + step, total), dtype=np.int64)
        a = 1.0 - 2.0 * ((codes[:, None] >> shifts) & 1)
        vals = (a * np.roll(a, -1, axis=1)) @ pair + a @ single
        top = float(vals.max())
        if top > best_val + TIE_TOL:
            best_val = top
            best_code = int(codes[np.argmax(vals >= top - TIE_TOL)])
        elif top > best_val:
            best_val = top
    return best_val, decode(best_code, n)


def bound_formula_check(coeffs: SosCoefficients) -> tuple[float, float, int]:
    """(brute-force value, n + gamma - 2, number of -1 entries in the optimizer)."""
    brute, assignment = brute_force(modified_expression(coeffs))
    return brute, eta_classical(coeffs), sum(1 for a in assignment if a == -1)
