"""Exception hierarchy shared by all relshock modules."""


class RelshockError(Exception):
    """Base class for every error raised by relshock."""


class DomainError(RelshockError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class NumericError(RelshockError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance or produced NaN."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not converge.

    Attributes
    ----------
    achieved : float
        Error estimate reported by the integrator.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class InvariantViolation(RelshockError):
    """A state left the admissible cone (e.g. negative density, |u| >= c)."""


class SolverError(InvariantViolation):
    """Invariant violation detected during a time integration.

    Attributes
    ----------
    cell : int
        Index of the offending cell.
    t : float
        Time level at which the violation was found.
    """

    def __init__(self, message, cell=-1, t=float("nan")):
        super().__init__(f"{message} at cell {cell}, t={t:.6g}")
        self.cell = cell
        self.t = t


class SingularityError(RelshockError, ArithmeticError):
    """A matrix became singular at or beyond a predicted blowup time."""


class ConfigError(RelshockError):
    """Scenario configuration is invalid.

    ``exit_code`` follows the CLI convention: 2 missing file, 3 schema
    violation, 4 inadmissible physics.
    """

    def __init__(self, message, exit_code=3):
        super().__init__(message)
        self.exit_code = exit_code
