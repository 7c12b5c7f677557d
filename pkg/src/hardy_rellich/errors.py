"""Exception types shared across the toolkit."""


class AssemblyError(RuntimeError):
    """Quadrature failed to converge while assembling a form matrix."""


class SolverError(RuntimeError):
    """A banded factorization or linear solve broke down."""


class ConvergenceError(SolverError):
    """An eigenvalue iteration hit its iteration cap before the residual target."""


class IdentityViolationError(RuntimeError):
    """Two algebraically equal quadratic-form evaluations disagreed.

    Raised when the defining combination of a truncated form and its
    carre-du-champ evaluation differ beyond tolerance, which signals an
    assembly bug rather than a mathematical failure.
    """


class UnsupportedConfigurationError(ValueError):
    """A configuration is outside the exactly supported parameter regime."""


class ConfigError(ValueError):
    """A run-configuration file is malformed or uses unknown keys."""
