"""Exception taxonomy shared across the toolkit."""


class BmxError(Exception):
    """Base class for all toolkit errors."""


class BadParameters(BmxError):
    """Domain or map constructed with parameters outside their valid range."""


class PointOutsideDomain(BmxError):
    """A query point that must lie inside the domain does not."""


class NotNearBoundary(BmxError):
    """Boundary classification requested for a point too far from the boundary."""


class OnBranchCut(BmxError):
    """Analytic map evaluated on a branch cut where no side has been chosen."""


class AtPole(BmxError):
    """Analytic map evaluated at a pole or other non-removable singularity."""


class BadStart(BmxError):
    """Simulation started from an invalid point (e.g. outside the half-plane)."""


class MaxStepsExceeded(BmxError):
    """A simulated path did not terminate within the configured step budget."""


class QuadratureFailure(BmxError):
    """Adaptive quadrature exceeded its refinement depth cap."""


class TooFewTailSamples(BmxError):
    """Not enough order statistics above the cutoff for tail-index estimation."""


class TargetUnreachable(BmxError):
    """No grid path connects the source to the target in the metric graph."""


class NestingViolation(BmxError):
    """A claimed domain inclusion failed a containment check."""


class DomainNotDeltaStarlike(BmxError):
    """Starlike precondition failed; carries the witness point."""

    def __init__(self, witness, message="domain failed the leftward-ray check"):
        super().__init__(f"{message} (witness {witness})")
        self.witness = witness


class ConfigError(BmxError):
    """Scenario configuration is malformed or references unknown entities."""
