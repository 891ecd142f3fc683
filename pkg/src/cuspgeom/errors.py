"""Exception hierarchy for cuspgeom.

Every error raised on purpose by the library derives from CuspGeomError,
so callers (CLI, service) can map them to structured error payloads.
"""


class CuspGeomError(Exception):
    """Base class for all cuspgeom errors."""

    @property
    def kind(self):
        return type(self).__name__


# projective layer
class ZeroImage(CuspGeomError):
    """A projective map sent a point to (numerically) zero."""


class AtInfinity(CuspGeomError):
    """A projective point has no affine representative (last coordinate ~ 0)."""


class Singular(CuspGeomError):
    """A matrix required to be invertible is singular within tolerance."""


class NonPositiveDiagonal(CuspGeomError):
    """Matrix logarithm requested for a matrix without positive real spectrum."""


class DimensionMismatch(CuspGeomError):
    """Inputs with incompatible dimensions."""


# weights / domain layer
class UnsortedWeyl(CuspGeomError):
    """Weight vector is not sorted in non-increasing order."""


class NegativeWeyl(CuspGeomError):
    """Weight vector has a negative entry."""


class OutsideChart(CuspGeomError):
    """Point lies outside the open cone on which the horofunction is defined."""


class DegenerateDirection(CuspGeomError):
    """Zero (or numerically zero) direction vector."""


class NotOnBoundary(CuspGeomError):
    """Point expected on the boundary hypersurface is not on it."""


class NotInterior(CuspGeomError):
    """Point expected strictly inside the domain is on/outside the boundary."""


# group layer
class KernelViolation(CuspGeomError):
    """Hyperbolic parameters violate the linear kernel constraint."""


class NotInGroup(CuspGeomError):
    """Matrix does not factor through the cusp group within tolerance."""


class UnsupportedGroupShape(CuspGeomError):
    """Generators are not in a shape the recovery routine handles."""


# metric layer
class NonPositiveScale(CuspGeomError):
    """Scaling factor must be strictly positive."""


class UnsupportedPsi(CuspGeomError):
    """Operation not available for this weight vector (documented restriction)."""


class ZeroPsi(CuspGeomError):
    """Operation undefined for the zero weight vector."""


# classification layer
class RotationalPartOutsidePsi(CuspGeomError):
    """Conjugated rotational part does not lie in the isotropy group."""


class DegenerateLattice(CuspGeomError):
    """Generator set does not span a full-rank lattice."""


class MixedSigns(CuspGeomError):
    """Real spectrum with mixed signs where a positive spectrum is required."""


class ComplexSpectrum(CuspGeomError):
    """Matrix has non-real eigenvalues where a real spectrum is required."""


class UnsupportedDimension(CuspGeomError):
    """Operation only implemented for specific ambient dimensions."""


class DegeneratePatch(CuspGeomError):
    """Patch basis is singular or not full-dimensional."""
