"""Shared exception types."""


class MatvocError(ValueError):
    """Base class for all validation and format errors raised by this package."""


class DecodeError(MatvocError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, message: str, *, byte_offset: int | None = None, doc_id: str | None = None):
        super().__init__(message)
        self.byte_offset = byte_offset
        self.doc_id = doc_id


class FormatError(MatvocError):
    """A structured input file (TSV, config, vocab) violates its format."""

    def __init__(self, message: str, *, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class ConfigError(MatvocError):
    """A configuration value is out of range or inconsistent."""


class ContractError(MatvocError):
    """A caller violated an operation precondition."""
