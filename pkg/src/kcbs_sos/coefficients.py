"""Closed-form scalars of the modified n-cycle construction, n = 2**m + 1.

Index conventions: cycle labels ``i`` and distances ``k`` are the 1-based
labels used in the literature (``phi(i)`` is the angle of the i-th canonical
vector, ``beta[k]`` belongs to the stabilizer that couples ``A_i`` to
``A_{i+-k}``). Python sequences indexed by measurement (effects, observables)
are 0-based, so ``effects[j]`` carries label ``j + 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import BadK, BadN

DEFAULT_MAX_M = 5


def cycle_angle(n: int, i: int) -> float:
    """Angle (n-1)*pi*i/n reduced exactly to (-pi, pi]."""
    t = ((n - 1) * i) % (2 * n)
    if t > n:
        t -= 2 * n
    return math.pi * t / n


def kcbs_alpha(n: int) -> float:
    return 0.5 / math.cos(math.pi / n)


def _product_desc(values) -> float:
    # largest magnitudes first
    out = 1.0
    for v in sorted(values, key=abs, reverse=True):
        out *= v
    return out


def _exponent(n: int) -> int | None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 3:
        return None
    p = n - 1
    if p & (p - 1):
        return None
    return p.bit_length() - 1


@dataclass(frozen=True)
class SosCoefficients:
    n: int
    m: int
    alpha: float
    phi: tuple[float, ...]
    beta: dict[int, float]
    alpha_bar: float
    c: dict[int, float]
    d: float
    gamma: float
    eta_q: float
    eta_c: float
    cos_theta: float

    def c_at(self, k: int) -> float:
        """Weight of the k-th stabilizer family; zero unless k is a power of two."""
        return self.c.get(k, 0.0)

    def angle(self, i: int) -> float:
        return cycle_angle(self.n, i)

    @property
    def half(self) -> int:
        return (self.n - 1) // 2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "alpha": self.alpha,
            "alpha_bar": self.alpha_bar,
            "cos_theta": self.cos_theta,
            "phi": list(self.phi),
            "beta": {str(k): v for k, v in sorted(self.beta.items())},
            "c": {str(k): v for k, v in sorted(self.c.items())},
            "d": self.d,
            "gamma": self.gamma,
            "eta_q": self.eta_q,
            "eta_c": self.eta_c,
        }


def derive(n: int, allow_large: bool = False) -> SosCoefficients:
    """All scalars of the construction for ``n = 2**m + 1`` with ``m >= 2``.

    ``m > 5`` is refused unless ``allow_large`` is set, in which case a
    conditioning warning is emitted: the weights ``c_k`` shrink roughly like
    ``4**-k`` and the secant products grow with ``m``.
    """
    m = _exponent(n)
    if m is None or m < 2:
        raise BadN(f"n={n!r} is not of the form 2**m + 1 with m >= 2")
    if m > DEFAULT_MAX_M:
        if not allow_large:
            raise BadN(f"n={n} (m={m}) is outside the default range m <= {DEFAULT_MAX_M}")
        warnings.warn(f"n={n}: coefficients are poorly conditioned for m={m}", RuntimeWarning)

    alpha = kcbs_alpha(n)
    half = (n - 1) // 2
    phi = tuple(cycle_angle(n, i) for i in range(1, n + 1))
    beta = {k: 1.0 / (2.0 * (1.0 - math.cos(cycle_angle(n, k)))) for k in range(1, half + 1)}
    alpha_bar = (1.0 + 2.0 * alpha) / (1.0 - 2.0 * alpha)

    sec = {j: 1.0 / math.cos(cycle_angle(n, 2**j)) for j in range(1, m)}
    b1 = beta[1]
    denom = 2 ** (2 * m - 1) * b1 * (1.0 - 2.0 * b1) + b1**2 * _product_desc(sec[j] for j in range(1, m))
    c1 = 2 ** (2 * m - 3) / alpha_bar**2 / denom

    c = {1: c1}
    for x in range(1, m):
        k = 2**x
        ratio = (b1 / (k * beta[k])) ** 2 * _product_desc(sec[j] for j in range(1, x + 1))
        c[k] = c1 * ratio

    d = alpha_bar**2 * sum(ck * (1.0 + 6.0 * beta[k] ** 2 - 4.0 * beta[k]) for k, ck in c.items())
    gamma = -2.0 * alpha_bar * sum(c.values())
    eta_q = n * alpha_bar**2 * sum(
        ck * (1.0 / alpha_bar**2 + 1.0 + 6.0 * beta[k] ** 2 - 4.0 * beta[k]) for k, ck in c.items()
    )
    return SosCoefficients(
        n=n,
        m=m,
        alpha=alpha,
        phi=phi,
        beta=beta,
        alpha_bar=alpha_bar,
        c=c,
        d=d,
        gamma=gamma,
        eta_q=eta_q,
        eta_c=n + gamma - 2.0,
        cos_theta=1.0 / math.sqrt(1.0 + 2.0 * alpha),
    )


def eta_classical(coeffs: SosCoefficients) -> float:
    return coeffs.n + coeffs.gamma - 2.0


def kcbs_reference(n: int) -> tuple[float, float]:
    """Classical and quantum bounds of the unmodified n-cycle KCBS inequality."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 5 or n % 2 == 0:
        raise BadN(f"n={n!r} must be an odd integer >= 5")
    cs = math.cos(math.pi / n)
    return float(n - 2), n * (3.0 * cs - 1.0) / (1.0 + cs)


def _pair_partner(n: int, k: int) -> int:
    # the distance k' whose (A_{i+k'}, A_{i-k'}) cross term lands at distance k
    return k // 2 if k % 2 == 0 else (n - k) // 2


def anticommutator_coefficient(coeffs: SosCoefficients, k: int) -> float:
    """Coefficient of ``{A_i, A_{i+k}}`` in the expanded sum of squares.

    Equals 1/2 at ``k = 1`` and vanishes for every other distance; this is
    what the choice of the weights ``c_k`` is engineered to achieve.
    """
    n = coeffs.n
    half = coeffs.half
    if not isinstance(k, int) or not 1 <= k <= half:
        raise BadK(f"k={k!r} outside 1..{half}")
    b = coeffs.beta
    cross = 2.0 * coeffs.c_at(k) * b[k] * (1.0 - 2.0 * b[k])
    partner = _pair_partner(n, k)
    return coeffs.alpha_bar**2 * (cross + coeffs.c_at(partner) * b[partner] ** 2)
