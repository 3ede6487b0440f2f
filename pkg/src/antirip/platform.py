"""Platform entities and the narrow client contract the crawler talks to.

Anything that can resolve a public handle and page through a channel's
recent posts satisfies :class:`PlatformClient`. The deterministic simulator
in :mod:`antirip.sim` is the reference implementation used by the tests.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Protocol, TypeVar, runtime_checkable

from .errors import RateLimited, TransportExhausted, TransportFailure
from .handles import handle_ok

log = logging.getLogger(__name__)

MAX_FILE_SIZE = 2 * 1024**3
LINK_KINDS = ("channel", "bot", "invite")

T = TypeVar("T")


class InternalLink(NamedTuple):
    kind: str
    target: str


@dataclass(frozen=True)
class ChannelRecord:
    id: str
    handle: str | None
    title: str
    subscriber_count: int
    earliest_post_time: int
    is_bot: bool = False

    def __post_init__(self):
        if self.handle is not None and not handle_ok(self.handle):
            raise ValueError(f"invalid handle {self.handle!r}")
        if self.subscriber_count < 0:
            raise ValueError("subscriber_count must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelRecord":
        return cls(
            id=d["id"],
            handle=d.get("handle"),
            title=d.get("title", ""),
            subscriber_count=int(d.get("subscriber_count", 0)),
            earliest_post_time=int(d["earliest_post_time"]),
            is_bot=bool(d.get("is_bot", False)),
        )


# Bots share the channel record shape; is_bot distinguishes them.
BotRecord = ChannelRecord


@dataclass(frozen=True)
class PostRecord:
    channel_id: str
    post_id: int
    time: int
    text: str = ""
    view_count: int = 0
    internal_links: tuple[InternalLink, ...] = ()
    external_links: tuple[str, ...] = ()
    attachment: tuple[str, int] | None = None
    language_tag: str | None = None
    screenshot_ref: str | None = None
    # set by the platform when a post was taken down for copyright
    removed: bool = False

    def __post_init__(self):
        if self.view_count < 0:
            raise ValueError("view_count must be >= 0")
        if self.attachment is not None and self.attachment[1] > MAX_FILE_SIZE:
            raise ValueError("attachment exceeds 2 GiB")
        for link in self.internal_links:
            if link[0] not in LINK_KINDS:
                raise ValueError(f"unknown link kind {link[0]!r}")

    @property
    def key(self) -> tuple[str, int]:
        return (self.channel_id, self.post_id)

    def to_dict(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "post_id": self.post_id,
            "time": self.time,
            "text": self.text,
            "view_count": self.view_count,
            "internal_links": [list(link) for link in self.internal_links],
            "external_links": list(self.external_links),
            "attachment": list(self.attachment) if self.attachment else None,
            "language_tag": self.language_tag,
            "screenshot_ref": self.screenshot_ref,
            "removed": self.removed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PostRecord":
        att = d.get("attachment")
        return cls(
            channel_id=d["channel_id"],
            post_id=int(d["post_id"]),
            time=int(d["time"]),
            text=d.get("text", ""),
            view_count=int(d.get("view_count", 0)),
            internal_links=tuple(InternalLink(k, t) for k, t in d.get("internal_links", ())),
            external_links=tuple(d.get("external_links", ())),
            attachment=(att[0], int(att[1])) if att else None,
            language_tag=d.get("language_tag"),
            screenshot_ref=d.get("screenshot_ref"),
            removed=bool(d.get("removed", False)),
        )


@runtime_checkable
class PlatformClient(Protocol):
    def resolve_handle(self, handle: str) -> ChannelRecord | None: ...

    def fetch_posts(self, channel_id: str, limit: int) -> list[PostRecord]: ...

    def channel_meta(self, channel_id: str) -> ChannelRecord: ...


class Clock(Protocol):
    def now(self) -> int: ...


@dataclass
class FixedClock:
    """Manually advanced clock; integer UTC seconds."""

    t: int

    def now(self) -> int:
        return self.t

    def advance(self, seconds: int) -> int:
        self.t += int(seconds)
        return self.t


class SystemClock:
    def now(self) -> int:
        return int(time.time())


@dataclass
class RetryPolicy:
    """Exponential backoff for RateLimited plus a transport retry budget."""

    base: float = 1.0
    factor: float = 2.0
    cap: float = 60.0
    transport_retries: int = 3
    max_rate_limit_waits: int = 20
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def delay(self, attempt: int) -> float:
        return min(self.cap, self.base * self.factor**attempt)

    def call(self, fn: Callable[..., T], *args, **kwargs) -> T:
        waits = 0
        failures = 0
        while True:
            try:
                return fn(*args, **kwargs)
            except RateLimited as exc:
                if waits >= self.max_rate_limit_waits:
                    raise
                d = self.delay(waits)
                if exc.retry_after is not None:
                    d = min(self.cap, max(d, exc.retry_after))
                waits += 1
                log.debug("rate limited, sleeping %.1fs", d)
                self.sleep(d)
            except TransportExhausted:
                raise
            except TransportFailure as exc:
                failures += 1
                if failures > self.transport_retries:
                    raise TransportExhausted(str(exc)) from exc
                self.sleep(self.delay(failures - 1))


def resolve_handle(
    client: PlatformClient, handle: str, retry: RetryPolicy | None = None
) -> ChannelRecord | None:
    if not handle_ok(handle):
        raise ValueError(f"invalid handle {handle!r}")
    retry = retry or RetryPolicy()
    return retry.call(client.resolve_handle, handle)


def fetch_posts(
    client: PlatformClient, channel_id: str, limit: int, retry: RetryPolicy | None = None
) -> list[PostRecord]:
    if limit < 1:
        raise ValueError("limit must be >= 1")
    retry = retry or RetryPolicy()
    posts = retry.call(client.fetch_posts, channel_id, limit)
    return posts[:limit]
