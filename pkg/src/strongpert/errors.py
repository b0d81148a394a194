"""Exception hierarchy shared by all modules."""


class StrongPertError(Exception):
    """Base class for library errors."""


class NumericalError(StrongPertError):
    """A numerical precondition failed during a computation."""


class NotHermitianError(NumericalError, ValueError):
    pass


class DegeneracyError(NumericalError):
    """The perturbation spectrum is degenerate where the adiabatic basis needs it not to be."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class LevelMatchingError(NumericalError):
    """Eigenvectors at adjacent grid points could not be matched unambiguously."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class TruncationError(StrongPertError, ValueError):
    pass


class ConfigError(StrongPertError, ValueError):
    """Invalid run configuration.

    ``key`` and ``line`` locate the offending entry when known.
    """

    def __init__(self, message, key=None, line=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if key is not None:
            loc.append(f"key '{key}'")
        prefix = f"{', '.join(loc)}: " if loc else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
