"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap."""


class RunawayError(RuntimeError):
    """A simulated replication exceeded the observation safety cap."""


class DegenerateWindowError(RuntimeError):
    """An acceptance window collapsed to zero length."""
