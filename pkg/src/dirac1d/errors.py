"""Exception types shared across the package."""


class Dirac1dError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(Dirac1dError):
    """A declared invariant of an input object does not hold."""


class ConfigError(Dirac1dError):
    """Invalid scenario or solver configuration."""


class SchemaError(ConfigError):
    """Config document violates the JSON schema.

    ``pointer`` is a JSON-pointer-style path to the offending entry.
    """

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class QuadratureError(Dirac1dError):
    """Adaptive quadrature failed to reach tolerance within its budget."""


class GridMismatchError(Dirac1dError):
    """Two fields that must share a grid do not."""


class LinearSolveError(Dirac1dError):
    """Direct linear solve produced a residual above tolerance."""


class PeriodicityWarning(UserWarning):
    """Sampled potentials differ at the two domain edges.

    The spectral solver assumes periodic fields; runs whose wave packets
    stay away from the edges are still meaningful.
    """
