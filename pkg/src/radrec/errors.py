"""Exception hierarchy shared by every radrec module."""


class RadrecError(Exception):
    """Base class for all radrec failures."""


class InvalidModel(RadrecError, ValueError):
    pass


class InvalidInput(RadrecError, ValueError):
    pass


class InvalidParameter(RadrecError, ValueError):
    pass


class InvalidTerm(RadrecError, ValueError):
    pass


class SingularResolvent(RadrecError, ZeroDivisionError):
    """A resolvent denominator vanished; ``ids`` lists the offending states."""

    def __init__(self, ids, energy=None, position=None):
        self.ids = list(ids)
        self.energy = energy
        self.position = position
        msg = f"singular resolvent at E={energy!r} for states {self.ids}"
        if position is not None:
            msg += f" (ladder position {position})"
        super().__init__(msg)


class QuasiDegenerate(RadrecError, ZeroDivisionError):
    """Projected resolvent requested at its own pole; route through the MSC path."""


class ResidualSingularity(RadrecError, ArithmeticError):
    def __init__(self, message, position=None):
        self.position = position
        super().__init__(message)


class PoleOutsideGrid(RadrecError, ValueError):
    pass


class InsufficientGrid(RadrecError, ValueError):
    pass


class DerivativeInconsistent(RadrecError, ArithmeticError):
    def __init__(self, message, deviation=None, tolerance=None):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(message)


class DomainError(RadrecError, ValueError):
    pass


class ExtrapolationFailed(RadrecError, ArithmeticError):
    pass


class ConfigError(RadrecError, ValueError):
    """Schema violation in a model config; ``path`` is the JSON field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class IoError(RadrecError, OSError):
    pass


class NonPhysicalCrossSection(UserWarning):
    """Total 2 Im(-H_eff) coefficient came out negative."""
