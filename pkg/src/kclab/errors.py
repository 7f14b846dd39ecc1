"""Exception types shared across the package."""


class KclabError(Exception):
    """Base class for all package errors."""


class NonFiniteEvaluation(KclabError):
    """A function or weight returned NaN/inf at a quadrature node."""


class InsufficientSamples(KclabError):
    """Not enough samples for a fit or classification."""


class UnsupportedDomain(KclabError):
    """Operator applied outside the domain it is defined on."""


class OrderViolation(KclabError):
    """Parameter pair violates a required strict ordering."""


class SingularGram(KclabError):
    """Gram matrix is numerically rank deficient."""


class GapViolation(KclabError):
    """Grid touches the spectral gap or is empty."""


class PoleHit(KclabError):
    """Resolvent evaluated too close to a spectral point."""


class EndpointOnSpectrum(KclabError):
    """Interval endpoint cannot be separated from the discrete spectrum."""


class DomainViolation(KclabError):
    """Point evaluation outside the function's domain."""


class MeshTooCoarse(KclabError):
    """A mesh cell spans a coefficient sign change away from the origin."""


class ConvergenceFailure(KclabError):
    """Iterative eigenvalue computation failed to converge."""


class ScheduleExceedsSpectrum(KclabError):
    """Requested cutoff schedule outruns the computed eigenvalues."""


class ConfigError(KclabError):
    """Invalid run configuration."""
