"""Modified n-cycle noncontextuality inequalities, their sum-of-squares
certificates, sequential-measurement simulation and qutrit self-testing."""

from .coefficients import SosCoefficients, derive, eta_classical, kcbs_reference
from .realization import Realization, canonical, embed
from .selftest import SelfTestReport, self_test

__all__ = [
    "Realization",
    "SelfTestReport",
    "SosCoefficients",
    "canonical",
    "derive",
    "embed",
    "eta_classical",
    "kcbs_reference",
    "self_test",
]

__version__ = "0.1.0"
