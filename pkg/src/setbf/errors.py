"""Exception hierarchy shared by all setbf modules."""


class SetBFError(Exception):
    """Base class for every error raised by setbf."""


class ConfigError(SetBFError, ValueError):
    """Invalid user input (configuration, hypothesis geometry, data)."""


class IntervalOutOfSpace(ConfigError):
    pass


class OutOfSpace(ConfigError):
    pass


class HypothesisOverlap(ConfigError):
    """Hypotheses share parameter values of positive measure."""


class MassOutsideHypotheses(ConfigError):
    pass


class InvalidObservation(ConfigError):
    pass


class ModelMismatch(ConfigError):
    pass


class WrongRegime(ConfigError):
    pass


class CompositionError(ConfigError):
    """A mixture cannot be collapsed into a single density (e.g. it has an atom)."""


class StateFormatError(ConfigError):
    """A persisted analysis state is malformed or has an unknown version."""


class NumericalError(SetBFError, ArithmeticError):
    """Base class for failures of the numerical machinery."""


class ZeroMassRestriction(NumericalError):
    pass


class QuadratureNonConvergence(NumericalError):
    pass
