"""Exception hierarchy. Every domain failure derives from HomlabError."""


class HomlabError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class AsymmetricMatrix(HomlabError):
    pass


class DiagonalNotZero(HomlabError):
    pass


class OffDiagonalZero(HomlabError):
    pass


class TriangleViolation(HomlabError):
    pass


class PaletteNotStrictlyIncreasing(HomlabError):
    pass


class ToleranceMergeAmbiguous(HomlabError):
    pass


class EmptySpace(HomlabError):
    pass


class NoPalette(HomlabError):
    pass


class OrderCapExceeded(HomlabError):
    def __init__(self, cap):
        super().__init__(f"group order exceeds cap {cap}")
        self.cap = cap


class DegreeTooLarge(HomlabError):
    pass


class NotPartialIsometry(HomlabError):
    pass


class PreconditionFailed(HomlabError):
    pass


class NotHomogeneous(HomlabError):
    def __init__(self, k, msg=None):
        super().__init__(msg or f"space is not {k}-homogeneous")
        self.k = k


class NotTransitive(HomlabError):
    pass


class InternalInvariantViolation(HomlabError):
    pass


class NotPowerOfTwo(HomlabError):
    pass


class BasisSearchTooLarge(HomlabError):
    pass


class NormNotInjective(HomlabError):
    pass


class SumNotInjective(HomlabError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class DistancesNotDistinct(HomlabError):
    pass


class NotATriangle(HomlabError):
    pass


class SchemeInvalid(HomlabError):
    pass


class NotCoherent(HomlabError):
    def __init__(self, witness):
        super().__init__(f"scheme is not coherent, witness {witness}")
        self.witness = witness


# rainbow duplicate parameter violations
class RainbowParamError(HomlabError):
    pass


class NotAbelian(RainbowParamError):
    pass


class NotUniquelyTransitive(RainbowParamError):
    pass


class NotAutomorphism(RainbowParamError):
    pass


class NotInvolution(RainbowParamError):
    pass


class DoesNotInvert(RainbowParamError):
    pass


class RNotInjective(RainbowParamError):
    pass


class RMeetsDistances(RainbowParamError):
    pass
