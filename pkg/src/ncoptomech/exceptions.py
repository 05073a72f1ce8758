"""Exception types.  Each maps to one documented CLI exit code."""


class NCOptomechError(Exception):
    exit_code = 1


class ConfigError(NCOptomechError, ValueError):
    """One or more parameter invariants are violated.

    ``errors`` holds one human readable line per violation, each naming the
    offending field and the constraint it breaks.
    """

    exit_code = 3

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class DomainError(NCOptomechError, ValueError):
    exit_code = 3


class ToleranceError(NCOptomechError):
    exit_code = 4


class LoopClosureError(ToleranceError):
    """The brute-force loop operator is not a multiple of the identity."""


class TruncationError(NCOptomechError):
    exit_code = 5

    def __init__(self, message, required_dim=None):
        self.required_dim = required_dim
        super().__init__(message)


class OracleInfeasibleError(TruncationError):
    """Photon-number sum would need an unreasonable cutoff."""


class SensitivityUnreachable(NCOptomechError):
    exit_code = 4

    def __init__(self, message, boundary_signal=None):
        self.boundary_signal = boundary_signal
        super().__init__(message)


class RangeWarning(UserWarning):
    """A phase argument left the interval where the signal is monotone."""
