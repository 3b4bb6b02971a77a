# File: s3rec/src/utils/error_handling.py
"""
Standard error handling utilities for consistent error management
throughout the toolkit.

Every error carries a stable numeric code which the CLI uses as its
process exit code.
"""

import logging
from typing import Any, Dict, Optional

logger = logging.getLogger("s3rec.error_handling")


class S3RecError(Exception):
    """Base class for toolkit errors"""
    def __init__(self, message: str, code: int = 1, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(message)


class UsageError(S3RecError):
    """Error for API misuse (scale mismatch, triple reuse, empty input)"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=2, details=details)


class ConfigError(S3RecError):
    """Error for invalid or inconsistent configuration"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=3, details=details)


class RangeError(S3RecError):
    """Error for values outside an encodable or valid range"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=4, details=details)


class ShapeError(S3RecError):
    """Error for non-conforming matrix shapes"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=5, details=details)


class ParseError(S3RecError):
    """Error for malformed input files"""
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        details = {}
        if line is not None:
            details["line"] = line
            message = f"{message} (line {line})"
        if path is not None:
            details["path"] = path
        self.line = line
        super().__init__(message, code=6, details=details)


class ValidationError(S3RecError):
    """Error for well-formed but invalid data"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=7, details=details)


class TransportError(S3RecError):
    """Error for closed or unreachable channels"""
    def __init__(self, message: str, phase: Optional[str] = None, partial: int = 0):
        details: Dict[str, Any] = {"phase": phase} if phase else {}
        if partial:
            details["partial"] = partial
        self.phase = phase
        self.partial = partial
        super().__init__(message, code=8, details=details)


class ProtocolError(S3RecError):
    """Error for malformed frames or parties that disagree on public data"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=9, details=details)


class TripleExhaustedError(S3RecError):
    """Error raised when a triple store cannot serve a request"""
    def __init__(self, requested: int, remaining: int):
        message = f"Triple store exhausted: requested {requested}, remaining {remaining}"
        super().__init__(message, code=10, details={"requested": requested, "remaining": remaining})


class UnsupportedError(S3RecError):
    """Error for recognised but unimplemented options"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, code=11, details=details)


class TrainingError(S3RecError):
    """Error for diverging or aborted training runs"""
    def __init__(self, message: str, epoch: Optional[int] = None):
        details = {"epoch": epoch} if epoch is not None else {}
        self.epoch = epoch
        if epoch is not None:
            message = f"{message} at epoch {epoch}"
        super().__init__(message, code=12, details=details)


def format_error_record(error: Exception) -> Dict[str, Any]:
    """Format error as a standardized error record

    Args:
        error: The exception to format

    Returns:
        Standardized error record dictionary
    """
    if isinstance(error, S3RecError):
        record = {
            "status": "error",
            "error": {
                "message": error.message,
                "code": error.code
            }
        }

        if error.details:
            record["error"]["details"] = error.details

        return record
    else:
        logger.debug(f"Formatting foreign exception {type(error).__name__}")
        return {
            "status": "error",
            "error": {
                "message": str(error),
                "code": 1
            }
        }


def exit_code_for(error: Exception) -> int:
    """Map an exception to a process exit code"""
    if isinstance(error, S3RecError):
        return error.code
    return 1
