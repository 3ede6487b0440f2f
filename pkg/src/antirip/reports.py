"""Evidence-backed abuse reports, outbox rendering and takedown tracking."""

from __future__ import annotations

import hashlib
import json
import logging
import re
import statistics
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .catalog import TitleMatch
from .errors import ChannelGone, NoEvidence, OutsideWindow, TransportFailure
from .links import post_external_links, post_internal_links
from .platform import ChannelRecord, PlatformClient, PostRecord, RetryPolicy
from .taxonomy import PostVerdict

log = logging.getLogger(__name__)

DAY = 86400
BATCH_WINDOW = DAY
TRACKING_WINDOW_DAYS = 14
PLATFORM = "platform"
MODES = ("event", "batched")


@dataclass(frozen=True)
class EvidenceItem:
    channel_id: str
    post_id: int
    time: int
    post_url: str
    titles: tuple[str, ...] = ()
    title_ids: tuple[str, ...] = ()
    screenshot_ref: str | None = None
    internal_links: tuple[tuple[str, str], ...] = ()
    external_links: tuple[str, ...] = ()
    labels: tuple[dict, ...] = ()

    @property
    def key(self) -> tuple[str, int]:
        return (self.channel_id, self.post_id)

    def as_dict(self, url_only: bool = False) -> dict:
        if url_only:
            return {
                "channel_id": self.channel_id,
                "post_id": self.post_id,
                "post_url": self.post_url,
                "external_links": list(self.external_links),
            }
        return {
            "channel_id": self.channel_id,
            "post_id": self.post_id,
            "time": self.time,
            "post_url": self.post_url,
            "titles": list(self.titles),
            "title_ids": list(self.title_ids),
            "screenshot_ref": self.screenshot_ref,
            "internal_links": [list(x) for x in self.internal_links],
            "external_links": list(self.external_links),
            "labels": list(self.labels),
        }


@dataclass(frozen=True)
class AbuseReport:
    report_id: str
    recipient: str
    recipient_kind: str  # platform | rights_holder
    channels: tuple[tuple[ChannelRecord, tuple[EvidenceItem, ...]], ...]
    created_at: int
    mode: str
    url_only: bool = False
    contact: str | None = None

    @property
    def items(self) -> list[EvidenceItem]:
        return [it for _, items in self.channels for it in items]

    @property
    def window(self) -> tuple[int, int]:
        ts = [it.time for it in self.items]
        return (min(ts), max(ts))

    def as_dict(self) -> dict:
        return {
            "report_id": self.report_id,
            "recipient": self.recipient,
            "recipient_kind": self.recipient_kind,
            "contact": self.contact,
            "created_at": self.created_at,
            "mode": self.mode,
            "url_only": self.url_only,
            "detection_window": list(self.window),
            "channels": [
                {
                    "channel": ch.to_dict(),
                    "posts": [it.as_dict(self.url_only) for it in items],
                }
                for ch, items in self.channels
            ],
        }


def post_url(channel: ChannelRecord, post_id: int) -> str:
    return f"https://t.me/{channel.handle or 'c/' + channel.id}/{post_id}"


def screenshot_path(channel_id: str, post_id: int) -> str:
    return f"screenshots/{channel_id}/{post_id}.txt"


def render_screenshot(channel: ChannelRecord, post: PostRecord) -> str:
    """Plain-text stand-in for a post screenshot."""
    lines = [
        f"{channel.title} (@{channel.handle})" if channel.handle else channel.title,
        f"post {post.post_id} at {post.time} | {post.view_count} views",
        "-" * 40,
        post.text,
    ]
    if post.attachment:
        lines.append(f"[attachment] {post.attachment[0]} ({post.attachment[1]} bytes)")
    return "\n".join(lines) + "\n"


def evidence_item(
    channel: ChannelRecord,
    post: PostRecord,
    verdict: PostVerdict,
    matches: Sequence[TitleMatch] = (),
    screenshot_ref: str | None = None,
) -> EvidenceItem:
    return EvidenceItem(
        channel_id=post.channel_id,
        post_id=post.post_id,
        time=post.time,
        post_url=post_url(channel, post.post_id),
        titles=tuple(m.entry.title for m in matches),
        title_ids=tuple(m.entry.id for m in matches),
        screenshot_ref=screenshot_ref or post.screenshot_ref or screenshot_path(*post.key),
        internal_links=tuple(tuple(x) for x in post_internal_links(post).links),
        external_links=tuple(post_external_links(post)),
        labels=tuple(
            {"group": a.label.group, "leaf": a.label.leaf, "justification": a.justification}
            for a in verdict.labels
        ),
    )


def _report_id(recipient: str, mode: str, keys: Iterable[tuple[str, int]]) -> str:
    h = hashlib.sha256(f"{recipient}|{mode}|".encode())
    for c, p in sorted(keys):
        h.update(f"{c}/{p};".encode())
    return h.hexdigest()[:16]


def _windows(items: list[EvidenceItem], mode: str) -> list[list[EvidenceItem]]:
    items = sorted(items, key=lambda it: (it.time, it.channel_id, it.post_id))
    if mode == "event":
        return [[it] for it in items]
    out: list[list[EvidenceItem]] = []
    start = None
    for it in items:
        if start is None or it.time >= start + BATCH_WINDOW:
            start = it.time
            out.append([])
        out[-1].append(it)
    return out


def build_reports(
    verdicts: Iterable[PostVerdict],
    matches: Iterable[TitleMatch],
    rights_holder_map: Mapping[str, str],
    mode: str,
    channels: Mapping[str, ChannelRecord],
    posts: Mapping[tuple[str, int], PostRecord],
    created_at: int,
    url_only: bool = False,
    requested: Iterable[str] | None = None,
) -> list[AbuseReport]:
    """Platform report over every piracy post, plus one stream per mapped rights holder.

    Rights holders are the production companies of unambiguous title
    matches; companies absent from ``rights_holder_map`` get no report.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    by_post: dict[tuple[str, int], list[TitleMatch]] = {}
    for m in matches:
        by_post.setdefault(m.post, []).append(m)
    piracy = sorted((v for v in verdicts if v.is_piracy), key=lambda v: v.key)
    if requested is not None:
        have = {v.channel_id for v in piracy}
        for cid in sorted(set(requested) - have):
            log.warning("skipping report: %s", NoEvidence(f"channel {cid} has no piracy posts"))
        wanted = set(requested)
        piracy = [v for v in piracy if v.channel_id in wanted]

    streams: dict[str, list[EvidenceItem]] = {}
    for v in piracy:
        post = posts.get(v.key)
        ch = channels.get(v.channel_id)
        if post is None or ch is None:
            log.warning("verdict %s/%s has no stored post; skipped", *v.key)
            continue
        ms = sorted(by_post.get(v.key, ()), key=lambda m: m.entry.id)
        unambiguous = [m for m in ms if not m.ambiguous]
        item = evidence_item(ch, post, v, unambiguous)
        streams.setdefault(PLATFORM, []).append(item)
        companies = sorted({c for m in unambiguous for c in m.entry.companies})
        for company in companies:
            if company in rights_holder_map:
                holder_items = [m for m in unambiguous if company in m.entry.companies]
                streams.setdefault(company, []).append(evidence_item(ch, post, v, holder_items))

    reports = []
    for recipient in sorted(streams, key=lambda r: (r != PLATFORM, r)):
        for window in _windows(streams[recipient], mode):
            grouped: dict[str, list[EvidenceItem]] = {}
            for it in window:
                grouped.setdefault(it.channel_id, []).append(it)
            reports.append(
                AbuseReport(
                    report_id=_report_id(recipient, mode, (it.key for it in window)),
                    recipient=recipient,
                    recipient_kind="platform" if recipient == PLATFORM else "rights_holder",
                    channels=tuple((channels[c], tuple(grouped[c])) for c in sorted(grouped)),
                    created_at=created_at,
                    mode=mode,
                    url_only=url_only,
                    contact=rights_holder_map.get(recipient),
                )
            )
    return reports


def recipient_slug(recipient: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", recipient.lower()).strip("_") or "unknown"


def render_text(report: AbuseReport) -> str:
    lines = [
        f"Report {report.report_id} to {report.recipient}"
        + (f" <{report.contact}>" if report.contact else ""),
        f"mode: {report.mode}{' (url only)' if report.url_only else ''}; created {report.created_at}",
        f"detections {report.window[0]}..{report.window[1]}; {len(report.items)} posts "
        f"across {len(report.channels)} channels",
        "",
    ]
    for ch, items in report.channels:
        lines.append(f"== {ch.title} (@{ch.handle}) [{ch.id}] subscribers={ch.subscriber_count}")
        for it in items:
            lines.append(f"  - {it.post_url}")
            if report.url_only:
                continue
            if it.titles:
                lines.append(f"    title: {', '.join(it.titles)}")
            for lb in it.labels:
                lines.append(f"    {lb['group']}/{lb['leaf']}: {lb['justification']}")
            for kind, target in it.internal_links:
                lines.append(f"    internal {kind}: {target}")
            for url in it.external_links:
                lines.append(f"    external: {url}")
            lines.append(f"    screenshot: {it.screenshot_ref}")
    return "\n".join(lines) + "\n"


def write_outbox(reports: Iterable[AbuseReport], outdir: str | Path, header: dict | None = None) -> list[Path]:
    """outbox/<recipient>/<report_id>.json and .txt; returns written paths."""
    root = Path(outdir)
    written = []
    for r in reports:
        d = root / recipient_slug(r.recipient)
        d.mkdir(parents=True, exist_ok=True)
        body = r.as_dict()
        if header:
            body = {"_header": header, **body}
        jp = d / f"{r.report_id}.json"
        jp.write_text(json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        tp = d / f"{r.report_id}.txt"
        head = ""
        if header:
            head = "# " + " ".join(f"{k}={v}" for k, v in header.items()) + "\n"
        tp.write_text(head + render_text(r), encoding="utf-8")
        written += [jp, tp]
    return written


# ------------------------------------------------------------------ tracking


@dataclass(frozen=True)
class Check:
    time: int
    status: str  # alive | gone | skipped
    post_removed: int = 0
    posts_checked: int = 0
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "time": self.time,
            "status": self.status,
            "post_removed": self.post_removed,
            "posts_checked": self.posts_checked,
            "note": self.note,
        }


@dataclass(frozen=True)
class TrackingRecord:
    entity_id: str
    kind: str  # channel | bot
    reported_at: int
    recipients: tuple[str, ...]
    post_ids: tuple[int, ...]
    checks: tuple[Check, ...] = ()
    window_days: int = TRACKING_WINDOW_DAYS
    enforcement_feedback: str | None = None

    @property
    def deadline(self) -> int:
        return self.reported_at + self.window_days * DAY

    def in_window(self, t: int) -> bool:
        return self.reported_at <= t <= self.deadline

    @property
    def latest(self) -> Check | None:
        real = [c for c in self.checks if c.status != "skipped"]
        return real[-1] if real else None

    @property
    def gone(self) -> bool:
        return any(c.status == "gone" for c in self.checks)

    def with_check(self, check: Check) -> "TrackingRecord":
        if self.checks and check.time < self.checks[-1].time:
            raise ValueError("checks are append-only in time order")
        return replace(self, checks=self.checks + (check,))


def tracking_records(
    reports: Iterable[AbuseReport], reported_at: int, window_days: int = TRACKING_WINDOW_DAYS
) -> list[TrackingRecord]:
    """One record per reported entity, listing every recipient and reported post."""
    ents: dict[str, dict] = {}
    for r in reports:
        for ch, items in r.channels:
            e = ents.setdefault(ch.id, {"kind": "bot" if ch.is_bot else "channel", "rcpt": set(), "posts": set()})
            e["rcpt"].add(r.recipient)
            e["posts"].update(it.post_id for it in items)
    return [
        TrackingRecord(
            entity_id=eid,
            kind=e["kind"],
            reported_at=reported_at,
            recipients=tuple(sorted(e["rcpt"])),
            post_ids=tuple(sorted(e["posts"])),
            window_days=window_days,
        )
        for eid, e in sorted(ents.items())
    ]


def check_entity(
    client: PlatformClient, record: TrackingRecord, now: int, retry: RetryPolicy | None = None
) -> Check:
    if not record.in_window(now):
        raise OutsideWindow(
            f"{record.entity_id}: {now} outside [{record.reported_at}, {record.deadline}]"
        )
    retry = retry or RetryPolicy()
    try:
        retry.call(client.channel_meta, record.entity_id)
        limit = max(500, len(record.post_ids))
        feed = {p.post_id: p for p in retry.call(client.fetch_posts, record.entity_id, limit)}
    except ChannelGone:
        return Check(now, "gone")
    except TransportFailure as exc:
        return Check(now, "skipped", note=str(exc))
    oldest = min(feed) if feed else None
    removed = 0
    for pid in record.post_ids:
        p = feed.get(pid)
        if p is not None and p.removed:
            removed += 1
        elif p is None and oldest is not None and pid > oldest:
            # missing from inside the fetched range: deleted
            removed += 1
    return Check(now, "alive", removed, len(record.post_ids))


def track(
    client: PlatformClient,
    records: Iterable[TrackingRecord],
    now: int,
    retry: RetryPolicy | None = None,
) -> list[TrackingRecord]:
    out = []
    for r in records:
        if not r.in_window(now):
            log.info("%s: check at %d outside tracking window, skipped", r.entity_id, now)
            out.append(r)
            continue
        out.append(r.with_check(check_entity(client, r, now, retry)))
    return out


def _rate(num: int, den: int) -> float | None:
    return num / den if den else None


def outcome_summary(records: Sequence[TrackingRecord]) -> dict:
    """Removal rates overall, per recipient and per entity kind; post-removal medians."""
    records = list(records)
    if not records:
        return {"entities": 0, "removed": 0, "removal_rate": None, "by_recipient": {}, "by_kind": {},
                "post_removal": {"median_removed": None, "median_fraction": None, "entities": 0}}

    def block(rs: list[TrackingRecord]) -> dict:
        gone = sum(1 for r in rs if r.gone)
        return {"entities": len(rs), "removed": gone, "removal_rate": _rate(gone, len(rs))}

    recipients = sorted({x for r in records for x in r.recipients})
    kinds = sorted({r.kind for r in records})
    alive = [r for r in records if not r.gone and r.latest is not None]
    removed_counts = [r.latest.post_removed for r in alive]
    fractions = [r.latest.post_removed / len(r.post_ids) for r in alive if r.post_ids]
    return {
        **block(records),
        "by_recipient": {x: block([r for r in records if x in r.recipients]) for x in recipients},
        "by_kind": {k: block([r for r in records if r.kind == k]) for k in kinds},
        "post_removal": {
            "entities": len(alive),
            "median_removed": statistics.median(removed_counts) if removed_counts else None,
            "median_fraction": statistics.median(fractions) if fractions else None,
        },
        "unchecked": sum(1 for r in records if r.latest is None),
    }


def record_to_dict(r: TrackingRecord) -> dict:
    return {
        "entity_id": r.entity_id,
        "kind": r.kind,
        "reported_at": r.reported_at,
        "recipients": list(r.recipients),
        "post_ids": list(r.post_ids),
        "window_days": r.window_days,
        "enforcement_feedback": r.enforcement_feedback,
        "checks": [c.as_dict() for c in r.checks],
    }


def record_from_dict(d: dict) -> TrackingRecord:
    return TrackingRecord(
        entity_id=d["entity_id"],
        kind=d["kind"],
        reported_at=int(d["reported_at"]),
        recipients=tuple(d["recipients"]),
        post_ids=tuple(int(x) for x in d["post_ids"]),
        checks=tuple(Check(**c) for c in d.get("checks", ())),
        window_days=int(d.get("window_days", TRACKING_WINDOW_DAYS)),
        enforcement_feedback=d.get("enforcement_feedback"),
    )
