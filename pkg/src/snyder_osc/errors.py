"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): :class:`ConfigError`
for inputs that are invalid before any computation starts, and
:class:`ComputationError` for failures raised while computing.
"""


class SnyderError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SnyderError, ValueError):
    """Invalid parameters or settings (CLI exit code 2)."""


class ComputationError(SnyderError):
    """A computation could not produce a meaningful result (CLI exit code 1)."""


class NonPositiveOmega(ConfigError):
    pass


class NonPositiveMass(ConfigError):
    pass


class NegativeL(ConfigError):
    pass


class StepTooLarge(ConfigError):
    pass


class DimTooSmall(ConfigError):
    pass


class GridTooCoarse(ConfigError):
    pass


class InvalidGrid(ConfigError):
    pass


class DomainTooSmall(ConfigError):
    pass


class CutoffRegime(ComputationError):
    """Closed-form classical results do not exist once l*omega >= 1."""


class IncompleteOrbit(ComputationError):
    pass


class NonUniformSampling(ComputationError):
    pass


class NotSymmetric(ComputationError):
    pass


class ConvergenceFailure(ComputationError):
    pass
