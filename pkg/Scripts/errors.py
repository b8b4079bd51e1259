# errors.py
# Error categories raised across the toolkit. All are ValueErrors so callers that
# only know about bad input keep working; the CLI turns them into JSON diagnostics.

from __future__ import annotations
from typing import Any, Dict, Optional


# Base class carrying a machine-readable kind and optional structured detail
class ToolkitError(ValueError):
    kind = "toolkit"

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = dict(detail or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": self.message, "detail": self.detail}


# Unsupported root type/rank or a malformed configuration file
class ConfigurationError(ToolkitError):
    kind = "configuration"


# Mathematically invalid input (zero divisor, non-root, real tau, level 0, ...)
class DomainError(ToolkitError):
    kind = "domain"


# Request exceeds the sizes the enumerators are built for
class CapacityError(ToolkitError):
    kind = "capacity"


# An internal normalization produced something it never should
class ConsistencyError(ToolkitError):
    kind = "consistency"


# Pairing that must be integral was not; signals a wrong form normalization
class NormalizationError(ConsistencyError):
    kind = "normalization"


# The requested q-order cannot decide the question or bound the tail
class InsufficientTruncation(ToolkitError):
    kind = "insufficient_truncation"


# Input outside the decidable (rational) regime
class UnsupportedInput(ToolkitError):
    kind = "unsupported_input"


# A displayed identity failed; carries both sides for inspection
class FactorizationMismatch(ToolkitError):
    kind = "factorization_mismatch"
