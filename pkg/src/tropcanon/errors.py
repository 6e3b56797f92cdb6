"""Exception types shared across the package."""


class TropcanonError(Exception):
    pass


class InvalidCurve(TropcanonError):
    pass


class InvalidQuery(TropcanonError):
    pass


class SizeLimit(TropcanonError):
    pass


class SlopeBoundExceeded(TropcanonError):
    pass


class NonEffective(TropcanonError):
    pass


class InvalidEnhancement(TropcanonError):
    pass


class NotStable(TropcanonError):
    pass


class InvalidDepths(TropcanonError):
    pass


class WrongGraph(TropcanonError):
    pass


class SchemaError(TropcanonError):
    pass
