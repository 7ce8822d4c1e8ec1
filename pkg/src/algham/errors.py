"""Exception types shared across the engine."""


class AlghamError(Exception):
    """Base class for all engine errors."""


class NumericalDomainError(AlghamError):
    """A field evaluation produced a non-finite number."""


class ShapeError(AlghamError):
    """An array or point has the wrong dimensions for the model."""


class SingularMorphismError(AlghamError):
    """A fibre morphism (g, a frame change, ...) is not invertible at a point."""


class SingularHessianError(AlghamError):
    """The momentum Hessian of a Hamiltonian is singular off the zero section."""


class DegenerateSymplecticError(AlghamError):
    """The phase two-form is degenerate where it was required to be invertible."""


class IntegrationBlowupError(AlghamError):
    """A trajectory left the finite / bounded region the integrator tolerates."""


class ConfigError(AlghamError):
    """A run configuration is malformed or inconsistent."""
