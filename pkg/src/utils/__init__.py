# File: s3rec/src/utils/__init__.py
"""
Utility modules for the S3Rec toolkit
"""

from .error_handling import (
    format_error_record,
    exit_code_for,
    S3RecError,
    UsageError,
    ConfigError,
    RangeError,
    ShapeError,
    ParseError,
    ValidationError,
    TransportError,
    ProtocolError,
    TripleExhaustedError,
    UnsupportedError,
    TrainingError
)

__all__ = [
    "format_error_record",
    "exit_code_for",
    "S3RecError",
    "UsageError",
    "ConfigError",
    "RangeError",
    "ShapeError",
    "ParseError",
    "ValidationError",
    "TransportError",
    "ProtocolError",
    "TripleExhaustedError",
    "UnsupportedError",
    "TrainingError"
]
