"""Exception types shared across the package."""


class RankMinorsError(Exception):
    pass


class UnsupportedField(RankMinorsError, ValueError):
    pass


class DependentInput(RankMinorsError, ValueError):
    pass


class EmptyAxis(RankMinorsError, ValueError):
    pass


class NotSubset(RankMinorsError, ValueError):
    pass


class BadPoint(RankMinorsError, ValueError):
    pass


class AxisMismatch(RankMinorsError, ValueError):
    pass


class BadAxisSet(RankMinorsError, ValueError):
    pass


class AlreadyTensorRank(RankMinorsError, ValueError):
    pass


class ScaleExceeded(RankMinorsError):
    """The enumeration space is larger than the configured node budget."""


class Infeasible(RankMinorsError):
    pass


class RankTooLow(RankMinorsError):
    pass


class SliceBoundViolated(RankMinorsError):
    pass


class HypothesisUnverifiable(RankMinorsError):
    pass


class Obstructed(RankMinorsError):
    pass


class VerificationFailed(RankMinorsError):
    pass


class UnknownBudget(RankMinorsError, KeyError):
    pass


class ParameterOutOfRange(RankMinorsError, ValueError):
    pass


class UnknownKind(RankMinorsError, KeyError):
    pass
