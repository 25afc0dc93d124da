"""Exception and warning types shared across the package."""


class GeometryError(Exception):
    """Base class for all errors raised by confgeo."""


class OutOfDomainError(GeometryError):
    """A point lies outside a non-periodic chart axis."""


class OrderUnsupportedError(GeometryError):
    """A derivative order beyond the field's declared smoothness was requested."""


class DomainMismatchError(GeometryError):
    """Two objects live on incompatible chart domains."""


class NotSPDError(GeometryError):
    """A metric matrix failed a symmetric-positive-definite check."""


class DerivativeFailureError(GeometryError):
    """Differentiation produced non-finite values."""


class DegreeOverflowError(GeometryError):
    """A form operation would exceed degree n."""


class DegreeUnderflowError(GeometryError):
    """A form operation would drop below degree 0."""


class RankMismatchError(GeometryError):
    """A distribution projector is inconsistent with its declared rank."""


class NotParallelError(GeometryError):
    """A field claimed to be parallel moved under transport beyond tolerance."""


class NotOrthogonalError(GeometryError):
    """Two distributions that must be orthogonal are not."""


class NotConformalError(GeometryError):
    """Two metrics claimed conformally related fail the pointwise relation."""


class DimensionMismatchError(GeometryError):
    """Factor dimensions or array shapes are inconsistent."""


class ConstantWarpingError(GeometryError):
    """The warping function of a triple warped product is constant."""


class PathEscapesChartError(GeometryError):
    """An integration path left the chart through a non-periodic face."""


class StepSizeUnderflowError(GeometryError):
    """Adaptive transport refinement hit its subdivision cap."""


class LogBranchFailureError(GeometryError):
    """A transport matrix is too far from the identity for a principal log."""


class CommutantDegenerateError(GeometryError):
    """Random commutant elements kept producing clustered eigenvalues."""


class ConfigParseError(GeometryError):
    """A scenario configuration or field expression could not be parsed."""


class InternalCheckError(GeometryError):
    """A check runner failed for reasons other than a residual exceeding tolerance."""


class NonPeriodicDomainWarning(UserWarning):
    """Quadrature ran on a chart with non-periodic axes; result is not certified."""
