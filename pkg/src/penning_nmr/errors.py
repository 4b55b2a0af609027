"""Exception hierarchy shared by all modules."""


class PenningError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PenningError, ValueError):
    """An argument lies outside the domain where a formula applies."""


class NoTrapError(PenningError):
    """No confining stationary point exists in the search interval."""


class InfeasibleError(PenningError):
    """No admissible configuration satisfies the constraints."""


class UnstableTrapError(PenningError):
    """The Penning stability condition omega_c^2 > 2 omega_z^2 is violated."""


class ExpansionValidityError(DomainError):
    """Small-amplitude (dipole) expansion of the Coulomb term is not valid."""


class ConvergenceError(PenningError):
    """A truncated computation did not converge.

    ``result`` carries the last (unconverged) result when one exists.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CompilationError(PenningError):
    """A gate request cannot be compiled into a pulse schedule."""


class UncoupledPairError(CompilationError):
    """Two-qubit gate requested on a pair with no usable J coupling."""


class ConfigError(PenningError):
    """Invalid or inconsistent device configuration."""
