"""Exception types shared across the package."""


class AttnOptError(Exception):
    """Base class for all library errors."""


class NonPDError(AttnOptError):
    """A matrix that must be symmetric positive-definite is not."""


class WrongDimensionError(AttnOptError):
    """Operation requires a specific number of sources."""


class AssumptionViolatedError(AttnOptError):
    """A closed form was requested for a prior that fails its assumption."""


class UnsupportedPriorError(AttnOptError):
    """No sufficiency condition licenses the stage solver for this prior."""


class NoConvergenceError(AttnOptError):
    """An iterative routine exhausted its budget without converging."""


class InfeasibleFloorError(AttnOptError):
    """Lower bounds exceed the attention budget."""


class DomainError(AttnOptError, ValueError):
    """Argument outside the mathematical domain of the function."""


class GridTooCoarseError(AttnOptError):
    """A numerical grid cannot resolve the requested quantity."""


class InvalidConfigError(AttnOptError, ValueError):
    """Malformed simulation or grid configuration."""


class InvalidParamError(AttnOptError, ValueError):
    """Malformed model parameter."""


class ExistenceNotGuaranteedWarning(UserWarning):
    """Equilibrium formula evaluated outside its guaranteed-existence range."""
