"""Exception types shared across the package.

Every error raised by the library maps onto exactly one service error code;
the mapping lives in :mod:`guiscout.service`.
"""


class GuiScoutError(Exception):
    """Base class for all library errors."""


class ConfigError(GuiScoutError):
    """Invalid configuration value or unknown rule/option name."""


class CorpusSourceError(GuiScoutError):
    """Corpus source missing or unreadable (fatal, not per-record)."""


class QueryError(GuiScoutError):
    """Query text empty after normalization; the caller should re-prompt."""


class SelectionError(GuiScoutError):
    """Referenced GUI or aspect is not part of the current ranking."""


class NotFoundError(GuiScoutError):
    """Unknown session, slot, feature, or GUI id."""


class StateConflictError(GuiScoutError):
    """Session operation invoked in a phase where it is not allowed."""

    def __init__(self, operation: str, phase: str, detail: str = ""):
        self.operation = operation
        self.phase = phase
        msg = f"operation '{operation}' not allowed in phase '{phase}'"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ProviderTransportError(GuiScoutError):
    """Remote provider unreachable or returned a transport-level failure.

    Retryable: the request may be repeated unchanged.
    """

    retryable = True


class ProviderFormatError(GuiScoutError):
    """Provider responded, but the payload violates the documented contract.

    Carries the raw response text for logging and repair.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw
