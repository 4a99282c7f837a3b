"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the supported domain of an evaluation routine."""


class AccuracyError(ArithmeticError):
    """The evaluation path cannot reach the requested tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative routine (quadrature, root search) did not converge."""


class StepUnderflowError(RuntimeError):
    """ODE step size collapsed below the floating point resolution of t."""


class MaxStepsError(RuntimeError):
    """ODE integration exceeded its step budget."""


class BracketError(ValueError):
    """A 1-D minimization bracket has no interior minimum."""


class DegeneracyError(ArithmeticError):
    """Coinciding eigenvalues with a defective eigenspace."""
