"""Exception hierarchy shared by the shelltrap modules."""


class ShellTrapError(Exception):
    """Base class for all errors raised by shelltrap."""


class DomainError(ShellTrapError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(ShellTrapError, ValueError):
    """A configuration document could not be parsed or validated."""


class SingularityError(DomainError):
    """Evaluation requested at a point where the model is singular."""


class NotTrappableError(ShellTrapError):
    """The manifold is a high-field seeker (m_F g_F <= 0)."""


class NoTrapError(ShellTrapError):
    """Gravity wins over the magnetic force (gamma >= 1)."""


class RadiallyUntrappedError(NoTrapError):
    """The radial curvature at the trap bottom is negative."""


class CharacterizationError(ShellTrapError):
    """The numeric trap characterization failed."""


class DifferentiationError(ShellTrapError):
    """A finite-difference derivative could not be evaluated."""
