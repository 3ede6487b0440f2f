"""Probe synthesized handles, gate seeds on recency, and expand by bounded BFS."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

from .handles import handle_ok
from .links import post_internal_links
from .platform import (
    ChannelRecord,
    InternalLink,
    PlatformClient,
    PostRecord,
    RetryPolicy,
    fetch_posts,
    resolve_handle,
)

log = logging.getLogger(__name__)

DAY = 86400
DEFAULT_WINDOW_DAYS = 7
DEFAULT_PROBE_POSTS = 10
DEFAULT_MAX_DEPTH = 2

T = TypeVar("T")
R = TypeVar("R")


def _pmap(fn: Callable[[T], R], items: Sequence[T], parallelism: int) -> list[R]:
    if parallelism <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class Discovered:
    record: ChannelRecord
    depth: int
    origin: str  # handle-synthesis | link

    def to_dict(self) -> dict:
        return {**self.record.to_dict(), "depth": self.depth, "origin": self.origin}

    @classmethod
    def from_dict(cls, d: dict) -> "Discovered":
        return cls(ChannelRecord.from_dict(d), int(d["depth"]), d.get("origin", "link"))


@dataclass
class CrawlFrontier:
    """Level-ordered queue with a single visited set; nothing is enqueued twice."""

    max_depth: int = DEFAULT_MAX_DEPTH
    entries: list[Discovered] = field(default_factory=list)
    visited: set[str] = field(default_factory=set)

    def push(self, record: ChannelRecord, depth: int, origin: str) -> bool:
        if depth > self.max_depth or record.id in self.visited:
            return False
        self.visited.add(record.id)
        self.entries.append(Discovered(record, depth, origin))
        return True

    def level(self, depth: int) -> list[Discovered]:
        return sorted((e for e in self.entries if e.depth == depth), key=lambda e: e.record.id)


@dataclass
class DiscoveryResult:
    channels: list[Discovered]
    bots: list[Discovered]
    dead_links: int = 0
    invites: list[tuple[str, str]] = field(default_factory=list)
    dead_handles: list[str] = field(default_factory=list)

    @property
    def entities(self) -> list[Discovered]:
        return sorted(self.channels + self.bots, key=lambda e: (e.depth, e.record.id))

    def ids(self) -> set[str]:
        return {e.record.id for e in self.channels + self.bots}

    def depth_of(self) -> dict[str, int]:
        return {e.record.id: e.depth for e in self.channels + self.bots}


@dataclass
class ProbeOutcome:
    found: list[ChannelRecord]
    unresolved: int = 0
    rejected: int = 0


def probe_detailed(
    client: PlatformClient,
    candidates: Iterable[str],
    retry: RetryPolicy | None = None,
    parallelism: int = 1,
) -> ProbeOutcome:
    cands = list(candidates)
    valid = [c for c in cands if handle_ok(c)]
    rejected = len(cands) - len(valid)
    retry = retry or RetryPolicy()
    results = _pmap(lambda h: resolve_handle(client, h, retry), valid, parallelism)
    found: dict[str, ChannelRecord] = {}
    unresolved = 0
    for rec in results:
        if rec is None:
            unresolved += 1
        else:
            found.setdefault(rec.id, rec)
    log.info("probed %d candidates: %d resolved, %d unresolved, %d rejected",
             len(cands), len(found), unresolved, rejected)
    return ProbeOutcome(sorted(found.values(), key=lambda r: r.id), unresolved, rejected)


def probe(
    client: PlatformClient,
    candidates: Iterable[str],
    retry: RetryPolicy | None = None,
    parallelism: int = 1,
) -> list[ChannelRecord]:
    """Resolve candidates; malformed handles are rejected before any call."""
    return probe_detailed(client, candidates, retry, parallelism).found


def recency_gate(channel: ChannelRecord, now: int, window_days: int = DEFAULT_WINDOW_DAYS) -> bool:
    # inclusive boundary
    return now - channel.earliest_post_time <= window_days * DAY


def extract_internal_links(posts: Iterable[PostRecord], mentions: bool = True) -> list[InternalLink]:
    seen: dict[InternalLink, None] = {}
    malformed = 0
    for p in posts:
        ext = post_internal_links(p, mentions=mentions)
        malformed += ext.malformed
        for link in ext.links:
            seen.setdefault(link, None)
    if malformed:
        log.debug("skipped %d malformed links", malformed)
    return list(seen)


def expand(
    client: PlatformClient,
    seeds: Iterable[ChannelRecord],
    probe_posts: int = DEFAULT_PROBE_POSTS,
    max_depth: int = DEFAULT_MAX_DEPTH,
    retry: RetryPolicy | None = None,
    parallelism: int = 1,
    mentions: bool = True,
) -> DiscoveryResult:
    """Level-synchronous BFS from depth-0 seeds.

    Each non-bot entity above ``max_depth`` has its newest ``probe_posts``
    fetched exactly once. Invite links are recorded, never followed; bots are
    terminal. Work inside a level runs concurrently, but results are merged in
    sorted order so the outcome is independent of scheduling.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    retry = retry or RetryPolicy()
    frontier = CrawlFrontier(max_depth)
    for s in sorted(seeds, key=lambda r: r.id):
        frontier.push(s, 0, "handle-synthesis")
    resolved: dict[str, ChannelRecord | None] = {}
    invites: set[tuple[str, str]] = set()
    for depth in range(max_depth):
        level = [e for e in frontier.level(depth) if not e.record.is_bot]
        if not level:
            break
        feeds = _pmap(
            lambda e: fetch_posts(client, e.record.id, probe_posts, retry), level, parallelism
        )
        wanted: dict[str, None] = {}
        per_entity: list[list[InternalLink]] = []
        for e, posts in zip(level, feeds):
            links = extract_internal_links(posts, mentions=mentions)
            per_entity.append(links)
            for kind, target in links:
                if kind == "invite":
                    invites.add((e.record.id, target))
                elif target not in resolved and handle_ok(target):
                    wanted.setdefault(target, None)
        handles = sorted(wanted)
        recs = _pmap(lambda h: resolve_handle(client, h, retry), handles, parallelism)
        resolved.update(zip(handles, recs))
        for links in per_entity:
            for kind, target in links:
                rec = resolved.get(target) if kind != "invite" else None
                if rec is not None:
                    frontier.push(rec, depth + 1, "link")
    dead = sorted(h for h, r in resolved.items() if r is None)
    entries = sorted(frontier.entries, key=lambda e: (e.depth, e.record.id))
    return DiscoveryResult(
        channels=[e for e in entries if not e.record.is_bot],
        bots=[e for e in entries if e.record.is_bot],
        dead_links=len(dead),
        invites=sorted(invites),
        dead_handles=dead,
    )


def discover(
    client: PlatformClient,
    candidates: Iterable[str],
    now: int,
    window_days: int = DEFAULT_WINDOW_DAYS,
    probe_posts: int = DEFAULT_PROBE_POSTS,
    max_depth: int = DEFAULT_MAX_DEPTH,
    retry: RetryPolicy | None = None,
    parallelism: int = 1,
    mentions: bool = True,
) -> DiscoveryResult:
    """probe, recency gate, expand."""
    found = probe(client, candidates, retry, parallelism)
    seeds = [r for r in found if recency_gate(r, now, window_days)]
    log.info("%d of %d resolved handles passed the %d-day gate", len(seeds), len(found), window_days)
    return expand(client, seeds, probe_posts, max_depth, retry, parallelism, mentions)
