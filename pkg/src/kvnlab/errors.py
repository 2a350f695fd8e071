"""Exception and warning types raised across kvnlab."""


class KvnError(Exception):
    """Base class for kvnlab errors."""


class DomainCoverageError(KvnError, ValueError):
    """Grid extents cannot hold the requested state."""


class DomainError(KvnError, ValueError):
    """Arguments fall outside the operation's domain."""


class EvaluationError(KvnError, ValueError):
    """An observable produced non-finite values on the grid."""


class RepresentationError(KvnError, TypeError):
    """A wave function carries the wrong representation tag."""


class SelfAdjointnessError(KvnError, ArithmeticError):
    """An expectation value of a self-adjoint operator came out complex."""


class ResolutionError(KvnError, ArithmeticError):
    """An oscillatory integrand cannot be resolved within the node budget."""


class MassLossWarning(UserWarning):
    """Probability mass left the grid during evolution."""


class GeometryWarning(UserWarning):
    """The slit geometry receives too little flux for a meaningful curve."""
