"""Exception hierarchy shared by all modules.

The CLI maps :class:`ValidationError` to exit code 2 and
:class:`SolverError` to exit code 3.
"""


class ValidationError(ValueError):
    """Input violates a model, table or configuration invariant."""


class NormalizationError(ValidationError):
    """A density or a context mass does not sum to one."""


class DegenerateContextError(ValidationError):
    """A retro model assigns zero effective mass to a setting context."""


class SolverError(RuntimeError):
    """The linear-programming solver could not produce a verified answer."""


class VerificationError(SolverError):
    """An optimum or certificate failed independent re-evaluation."""
