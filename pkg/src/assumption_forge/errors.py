"""Exception types shared across the toolkit."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all toolkit errors."""

    code = "error"

    def payload(self) -> dict:
        return {"error": self.code, "message": str(self)}


# --- harvesting ---------------------------------------------------------

class AuthError(ForgeError):
    code = "auth"


class NotFound(ForgeError):
    code = "not_found"


class RateLimited(ForgeError):
    """Request budget exhausted; retry after ``reset_at`` (epoch seconds)."""

    code = "rate_limited"

    def __init__(self, message: str = "rate limit exhausted", reset_at: float | None = None):
        super().__init__(message)
        self.reset_at = reset_at


class NodeCapExceeded(ForgeError):
    code = "node_cap"


class TransportError(ForgeError):
    code = "transport"


# --- dataset management --------------------------------------------------

class DuplicateName(ForgeError):
    code = "duplicate_name"


class DuplicateValue(ForgeError):
    code = "duplicate_value"


class UnknownSentence(ForgeError):
    code = "unknown_sentence"


class UnknownLabel(ForgeError):
    code = "unknown_label"


class InsufficientClass(ForgeError):
    code = "insufficient_class"

    def __init__(self, label_name: str, have: int, need: int):
        super().__init__(
            f"class {label_name!r} has {have} examples, need at least {need}"
        )
        self.label_name = label_name
        self.have = have
        self.need = need


class MalformedRow(ForgeError):
    code = "malformed_row"

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownLabelValue(ForgeError):
    code = "unknown_label_value"


# --- vocabulary ----------------------------------------------------------

class EmptyFile(ForgeError):
    code = "empty_file"


class MalformedLine(ForgeError):
    code = "malformed_line"

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateToken(ForgeError):
    code = "duplicate_token"


# --- models --------------------------------------------------------------

class DegenerateData(ForgeError):
    code = "degenerate_data"


class DimensionMismatch(ForgeError):
    code = "dimension_mismatch"


class VersionMismatch(ForgeError):
    code = "version_mismatch"


class CorruptFile(ForgeError):
    code = "corrupt_file"


# --- metrics -------------------------------------------------------------

class LengthMismatch(ForgeError):
    code = "length_mismatch"


class InvalidLabel(ForgeError):
    code = "invalid_label"


# --- chat adapter --------------------------------------------------------

class NoLabelFound(ForgeError):
    code = "no_label"


class UnparseableResponse(ForgeError):
    code = "unparseable_response"


# --- configuration -------------------------------------------------------

class ConfigError(ForgeError):
    code = "config"

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
