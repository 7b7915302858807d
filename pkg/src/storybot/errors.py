"""Exception types shared across the studio modules."""

from __future__ import annotations


class StorybotError(Exception):
    """Base class for all studio errors."""


class MalformedProgram(StorybotError):
    """Raised when program bytes cannot be decoded into a block tree.

    Distinct from validation: decode failures mean the document shape is
    wrong, while validation violations are data about a decodable program.
    """

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class LoweringError(StorybotError):
    """Raised when lowering hits an invalid block; carries the block path."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{message} at {path}")
        self.path = path


class RangeError(StorybotError):
    """Raised when an action targets values outside the catalog ranges."""


class GatewayError(StorybotError):
    """Transport-level failure talking to the language-model provider."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(f"{kind}: {message}")
        self.kind = kind  # transport | timeout | auth


class SchemaError(StorybotError):
    """Model output never satisfied the response schema within budget."""

    def __init__(self, attempts: int, last_failure: str) -> None:
        super().__init__(f"schema validation failed after {attempts} attempts: {last_failure}")
        self.attempts = attempts
        self.last_failure = last_failure


class EmptyNarrative(StorybotError):
    """Goal generation requires a non-empty story summary."""


class NotConnected(StorybotError):
    """Robot deployment requires an established connection."""


class TransportError(StorybotError):
    """Network failure while streaming commands to the robot."""


class BindError(StorybotError):
    """Could not bind the requested server port."""


class StorageError(StorybotError):
    """Session storage directory is unusable."""
