"""Exception types raised by floqamp."""


class FloqampError(Exception):
    """Base class for all library errors."""


class ParameterError(FloqampError, ValueError):
    """Invalid or degenerate model/numerics parameters."""


class UnsupportedPhaseError(ParameterError):
    """Closed-form result requested away from phi = +-pi/2."""


class NoTopologyError(ParameterError):
    """Quantity only defined inside the topological window 0 < beta < 2."""


class SingularSystemError(FloqampError, ArithmeticError):
    """omega_bar sits (numerically) on an eigenvalue of the Sambe matrix."""

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class GapClosingError(FloqampError, ArithmeticError):
    """The Bloch symbol touches zero, so the winding number is undefined."""


class DivergenceError(FloqampError, ArithmeticError):
    """Time integration blew up or the step size underflowed."""

    def __init__(self, message, t_last, trajectory=None):
        super().__init__(message)
        self.t_last = t_last
        self.trajectory = trajectory


class QuadratureError(FloqampError, ArithmeticError):
    """Frequency quadrature did not converge under refinement."""
