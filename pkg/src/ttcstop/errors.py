"""Exception types shared across the package.

The CLI maps these onto its stable exit-code contract: usage/config
problems exit 2, schema/parse problems exit 3, numerical failures exit 4.
"""


class TtcStopError(Exception):
    """Base class for package errors."""

    exit_code = 1


class ConfigError(TtcStopError):
    """Invalid configuration file, section, or option value."""

    exit_code = 2


class SpecError(ConfigError):
    """Invalid simulation spec."""


class InvalidQuery(TtcStopError):
    """Break-even query outside its domain (e.g. lambda_ttc <= lambda_base)."""

    exit_code = 2


class SchemaError(TtcStopError):
    """Malformed or empty log/matrix file.

    ``line`` carries the 1-based offending line number when known.
    """

    exit_code = 3

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyDataset(TtcStopError):
    """Correctness matrix has no rows."""

    exit_code = 3


class KExceedsSamples(TtcStopError):
    """Requested K larger than the number of samples available."""

    exit_code = 3


class OutOfOrderCheckpoint(TtcStopError):
    """Checkpoint observed with non-increasing cumulative training FLOPs."""

    exit_code = 3


class TooFewPoints(TtcStopError):
    """Not enough points to fit a curve."""

    exit_code = 4


class DegenerateInput(TtcStopError):
    """Fit input with no usable variation (e.g. all x equal)."""

    exit_code = 4


class NonConvergence(TtcStopError):
    """Optimizer hit its iteration cap with the gradient still large."""

    exit_code = 4


class NonMonotoneInput(TtcStopError):
    """Sigmoid fit input not nondecreasing in K; caller should fall back
    to measured values."""

    exit_code = 4
