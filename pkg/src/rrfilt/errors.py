"""Exceptions raised by the analysis layers.

Each carries the partial data gathered before the failure so that reports can
say exactly what was checked.
"""


class RRFiltError(Exception):
    def __init__(self, message: str, **partial):
        super().__init__(message)
        self.partial = partial


class NotMPrimary(RRFiltError):
    pass


class UnstableClosure(RRFiltError):
    """The colon chain did not stabilize (with cross-check) before the cap."""


class SuperficialSearchFailed(RRFiltError):
    pass


class NotSuperficial(RRFiltError):
    """A certified element turned out not to behave superficially."""


class Undetermined(RRFiltError):
    """Not enough data to certify a polynomial; raise the relevant bound."""


class ReductionSearchFailed(RRFiltError):
    pass


class CriteriaDisagreement(RRFiltError):
    """Two independent criteria gave different answers: a bug or bad genericity."""


class PreconditionError(RRFiltError):
    pass
