"""Exception types shared across the toolkit.

Each class carries the process exit code the CLI maps it to.
"""


class FFMLPError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ParameterError(FFMLPError):
    """An argument, flag, or shape is invalid."""

    exit_code = 2


class DataError(FFMLPError):
    """A dataset is empty, inconsistent, or unusable."""

    exit_code = 3


class NumericError(FFMLPError):
    """A numerical procedure failed (singularity, divergence)."""

    exit_code = 4


class FormatError(DataError):
    """A CSV or model file violates the expected format."""


class DegeneratePairError(NumericError):
    """Two blobs are statistically indistinguishable; no separating plane exists."""
