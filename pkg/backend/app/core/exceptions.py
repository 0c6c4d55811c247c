# backend/app/core/exceptions.py
"""padiq 的异常层次。所有领域错误都继承 PadiqError (同时也是 ValueError)。"""


class PadiqError(ValueError):
    """Base class for every domain error raised by padiq."""


class ZeroValueError(PadiqError):
    """0 has no valuation or square class; callers must treat it separately."""


class NegativeValuationError(PadiqError):
    """A p-adic integer was required but the value has a denominator divisible by p."""


class SingularFormError(PadiqError):
    """The doubled Gram matrix is degenerate."""


class NonIntegralLatticeError(PadiqError):
    """The norm ideal is not contained in Z_p."""


class FormFormatError(PadiqError):
    """A form description could not be parsed."""

    def __init__(self, message: str, field: str = "$"):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class NotPositiveDefiniteError(PadiqError):
    """Global scans need a positive definite form."""


class OutOfScopeError(PadiqError):
    """Input outside what the analyzer decides (rank too small, determinant too large...)."""


class GapUndefinedError(PadiqError):
    """anisotropic_gap was asked about an isotropic lattice."""


class RepresentedTargetError(PadiqError):
    """progression_witness was asked about a value that is represented."""


class CertificateError(PadiqError):
    """A witness failed its congruence or lifting check. Indicates a bug."""


class NotPrimeError(PadiqError):
    """The modulus passed as p is not a prime."""
