"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies outside the open polydisc (some |z_j| >= 1)."""


class NonIntegrable(ArithmeticError):
    """An integral diverges under refinement of the quadrature."""


class PreconditionFailed(ValueError):
    """A check was asked to run on inputs outside its hypotheses."""


class NonIntegrableWeight(NonIntegrable, PreconditionFailed):
    """Radial-mode weight with divergent int_0^1 w(u)/u du."""


class ToleranceNotMet(ArithmeticError):
    """Refinement disagreement exceeded the requested tolerance."""


class NoConvergence(ArithmeticError):
    """A radial-limit schedule did not contract."""


class NonZeroMean(ValueError):
    """Input to the Haar decomposition has a nonzero global mean."""


class PatternUnsupported(ValueError):
    """Closed-form gradient requested for a non-checkerboard atom."""
