"""Custom exception classes."""

from typing import Any


class EntStructError(Exception):
    """Base exception for entstruct errors."""

    def __init__(
        self,
        message: str,
        code: str,
        context: dict[str, Any] | None = None
    ):
        self.message = message
        self.code = code
        self.context = context or {}
        super().__init__(self.message)


class DomainError(EntStructError):
    """A parameter lies outside the domain of an operation."""
    pass


class OracleScaleError(EntStructError):
    """The dense oracle was asked for more qubits than its cap allows."""
    pass


class NumericIntegrityError(EntStructError):
    """Non-finite values, non-Hermitian operators or imaginary residues."""
    pass


class SamplingError(EntStructError):
    """Rejection sampling exhausted its attempt budget."""
    pass


class DatasetFormatError(EntStructError):
    """Malformed dataset or model file. ``context["line"]`` holds the line number."""
    pass


class CompatibilityError(EntStructError):
    """A file was written for a different class table or qubit count."""
    pass


class IngestionError(EntStructError):
    """Measurement records violate the ingestion schema."""
    pass


class TrainingDivergenceError(EntStructError):
    """Training produced a non-finite loss."""
    pass


class UsageError(EntStructError):
    """Invalid command-line input (bad flag values, missing input files)."""
    pass
