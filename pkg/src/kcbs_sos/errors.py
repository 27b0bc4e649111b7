"""Exception hierarchy.

Every error raised on purpose by this package derives from :class:`KcbsError`,
which itself is a :class:`ValueError` so callers validating user input can catch
either.
"""


class KcbsError(ValueError):
    pass


# numerics
class NotHermitian(KcbsError):
    pass


class NotPSD(KcbsError):
    pass


class NoConvergence(KcbsError):
    pass


class DimensionMismatch(KcbsError):
    pass


class NotUnitary(KcbsError):
    pass


# coefficients / realization
class BadN(KcbsError):
    pass


class BadK(KcbsError):
    pass


class Singular(KcbsError):
    pass


class EffectOutOfRange(KcbsError):
    pass


# classical
class TooLarge(KcbsError):
    pass


# sequential
class MissingContext(KcbsError):
    pass


# selftest
class SelfTestError(KcbsError):
    """Base for failures of the extraction pipeline; carries the offending index."""

    def __init__(self, message, index=None, residual=None):
        super().__init__(message)
        self.index = index
        self.residual = residual


class DegenerateSubspace(SelfTestError):
    pass


class ConditionViolation(SelfTestError):
    pass


class NotRankOne(SelfTestError):
    pass


class OverlapMismatch(SelfTestError):
    pass


class PhaseResidual(SelfTestError):
    pass
