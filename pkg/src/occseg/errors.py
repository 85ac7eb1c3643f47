"""Exception types shared across the package."""


class OccsegError(Exception):
    """Base class for model-level failures."""


class SingularSupplyError(OccsegError):
    """A marginal-product wage was requested with zero effective labor supply."""


class NoRootError(OccsegError):
    """A bracketing solver found no sign change on its search interval."""


class MultipleRootsError(OccsegError):
    """A solver expected a unique root but the pre-scan bracketed several.

    The candidate roots are carried in ``roots`` so callers can inspect them.
    """

    def __init__(self, message: str, roots: list[float]):
        super().__init__(message)
        self.roots = roots


class RelabelRequiredError(OccsegError):
    """Occupation B pays more at equal supply; swap the occupation labels."""


class InfeasibleTargetError(OccsegError):
    """Calibration targets are mutually inconsistent."""


class InvalidSplitError(OccsegError):
    """Tie parameters are not genuine probabilities (p + kappa + lambda > 1)."""


class ConsistencyError(OccsegError):
    """Two formulations of the same quantity disagreed beyond tolerance."""


class ConfigError(OccsegError):
    """Malformed run configuration (unknown key, bad value, missing file)."""
