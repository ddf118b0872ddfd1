"""Exception hierarchy shared across the package.

CLI exit codes: 0 success, 2 configuration / scenario error, 3 solver abort,
4 oracle invalid.
"""


class WavefloatError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(WavefloatError):
    """Invalid configuration, scenario or grid specification."""

    exit_code = 2


class PhysicalStateError(WavefloatError):
    """Non-physical state: vanishing depth, grounding, singular coupling."""

    exit_code = 3


class SolverAbort(WavefloatError):
    """Time stepping aborted; carries the step index and time."""

    exit_code = 3

    def __init__(self, message, step=None, t=None, snapshot_path=None):
        super().__init__(message)
        self.step = step
        self.t = t
        self.snapshot_path = snapshot_path


class OracleInvalidError(WavefloatError):
    """An exact-solution oracle failed its own self-check."""

    exit_code = 4
