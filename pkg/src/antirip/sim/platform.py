"""In-memory platform client backed by a generated ecosystem."""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import replace

from ..errors import ChannelGone, RateLimited, TransportFailure
from ..platform import ChannelRecord, Clock, FixedClock, PostRecord
from .ecosystem import EcosystemState


class SimulatedPlatform:
    """Thread-safe :class:`~antirip.platform.PlatformClient` over an ecosystem.

    Takedowns and post removals scripted in the ecosystem take effect once
    the injected clock passes their time. ``rate_limit_every`` and
    ``fail_every`` inject a RateLimited or TransportFailure on every n-th
    call, which the caller's retry policy is expected to absorb.
    """

    def __init__(
        self,
        state: EcosystemState,
        clock: Clock | None = None,
        rate_limit_every: int = 0,
        fail_every: int = 0,
    ):
        self.state = state
        self.clock = clock or FixedClock(state.now)
        self.rate_limit_every = rate_limit_every
        self.fail_every = fail_every
        self._lock = threading.Lock()
        self._handles = state.by_handle()
        self._calls = 0
        self.fetch_counts: Counter[str] = Counter()
        self.resolve_counts: Counter[str] = Counter()

    def _tick(self) -> None:
        with self._lock:
            self._calls += 1
            n = self._calls
        if self.rate_limit_every and n % self.rate_limit_every == 0:
            raise RateLimited(retry_after=0.0)
        if self.fail_every and n % self.fail_every == 0:
            raise TransportFailure(f"injected failure on call {n}")

    def _gone(self, channel_id: str) -> bool:
        t = self.state.takedowns.get(channel_id)
        return t is not None and t <= self.clock.now()

    def resolve_handle(self, handle: str) -> ChannelRecord | None:
        self._tick()
        with self._lock:
            self.resolve_counts[handle.lower()] += 1
        rec = self._handles.get(handle.lower())
        if rec is None or self._gone(rec.id):
            return None
        return rec

    def channel_meta(self, channel_id: str) -> ChannelRecord:
        self._tick()
        rec = self.state.channels.get(channel_id)
        if rec is None or self._gone(channel_id):
            raise ChannelGone(channel_id)
        return rec

    def fetch_posts(self, channel_id: str, limit: int) -> list[PostRecord]:
        self._tick()
        if channel_id not in self.state.channels or self._gone(channel_id):
            raise ChannelGone(channel_id)
        with self._lock:
            self.fetch_counts[channel_id] += 1
        now = self.clock.now()
        out = []
        for p in reversed(self.state.posts[channel_id]):
            if p.time > now:
                continue
            t = self.state.post_removals.get(p.key)
            if t is not None and t <= now:
                p = replace(p, removed=True)
            out.append(p)
            if len(out) >= limit:
                break
        return out
