"""Exception hierarchy shared by every hplab module."""


class HPLabError(Exception):
    """Base class for all errors raised by hplab."""


class RegimeMismatch(HPLabError):
    pass


class NonPolynomialTail(HPLabError):
    pass


class TruncationTooShort(HPLabError):
    pass


class ExponentSumNonzero(HPLabError):
    pass


class IntegerExponent(HPLabError):
    pass


class GridTooCoarse(HPLabError):
    pass


class StructureMismatch(HPLabError):
    """An ODE coefficient identity failed; ``identity`` names which one."""

    def __init__(self, identity, detail=""):
        self.identity = identity
        super().__init__(f"{identity}: {detail}" if detail else identity)


class OrderMismatch(HPLabError):
    pass


class NonConvergence(HPLabError):
    pass


class OnBranchCut(HPLabError):
    pass


class OutsideSupport(HPLabError):
    pass


class SupportMismatch(HPLabError):
    pass


class OnBoundary(HPLabError):
    pass


class PathCrossesCut(HPLabError):
    pass


class NewtonDivergence(HPLabError):
    pass


class QuadratureFailure(HPLabError):
    pass
