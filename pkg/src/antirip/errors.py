"""Exception hierarchy shared across the pipeline stages."""


class AntiRipError(Exception):
    pass


class EmptyLexicon(AntiRipError, ValueError):
    pass


# platform
class PlatformError(AntiRipError):
    pass


class RateLimited(PlatformError):
    def __init__(self, retry_after: float | None = None):
        super().__init__(f"rate limited (retry_after={retry_after})")
        self.retry_after = retry_after


class TransportFailure(PlatformError):
    pass


class TransportExhausted(TransportFailure):
    """Raised once the retry budget for transport failures is spent."""


class ChannelGone(PlatformError):
    def __init__(self, channel_id: str):
        super().__init__(f"channel {channel_id} is gone")
        self.channel_id = channel_id


class InvalidSpec(AntiRipError, ValueError):
    pass


# taxonomy
class NoLabelMatch(AntiRipError):
    pass


class LengthMismatch(AntiRipError, ValueError):
    pass


# catalog
class ParseError(AntiRipError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# graph
class EmptyGraph(AntiRipError, ValueError):
    pass


# loss
class MissingFxRate(AntiRipError, KeyError):
    def __init__(self, currency: str):
        super().__init__(currency)
        self.currency = currency

    def __str__(self) -> str:
        return f"no exchange rate for {self.currency}"


# reports
class NoEvidence(AntiRipError):
    pass


class OutsideWindow(AntiRipError, ValueError):
    pass


# pipeline
class MissingInput(AntiRipError, FileNotFoundError):
    pass


class StageFailure(AntiRipError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
