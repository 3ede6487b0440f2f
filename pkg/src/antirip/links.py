"""Parsing of platform-internal references and external URLs out of post text."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable
from urllib.parse import urlsplit

from .handles import handle_ok
from .platform import InternalLink, PostRecord

# t.me/<handle>, t.me/s/<handle>, t.me/+<invite>, t.me/joinchat/<invite>
_TME = re.compile(
    r"(?:https?://)?(?:www\.)?(?:t|telegram)\.me/(?P<path>[^\s<>\"')\]]*)",
    re.IGNORECASE,
)
_MENTION = re.compile(r"(?<![\w@./])@(?P<handle>[A-Za-z0-9_]{1,40})")
_URL = re.compile(r"\b(?:https?://|magnet:\?)[^\s<>\"')\]]+", re.IGNORECASE)
_INVITE = re.compile(r"[A-Za-z0-9_-]{4,64}")
_RESERVED = {"s", "joinchat", "share", "addstickers", "proxy", "socks", "c", "iv"}


@dataclass
class LinkExtraction:
    links: list[InternalLink]
    malformed: int = 0


def link_kind(handle: str) -> str:
    return "bot" if handle.lower().endswith("bot") else "channel"


def _parse_tme_path(path: str) -> InternalLink | None:
    path = path.split("?", 1)[0].split("#", 1)[0].strip("/")
    if not path:
        return None
    if path.startswith("+"):
        code = path[1:].split("/", 1)[0]
        return InternalLink("invite", code) if _INVITE.fullmatch(code) else None
    parts = path.split("/")
    if parts[0].lower() == "joinchat" and len(parts) > 1:
        return InternalLink("invite", parts[1]) if _INVITE.fullmatch(parts[1]) else None
    if parts[0].lower() == "s" and len(parts) > 1:
        parts = parts[1:]
    elif parts[0].lower() in _RESERVED:
        return None
    handle = parts[0]
    if not handle_ok(handle):
        return None
    return InternalLink(link_kind(handle), handle.lower())


def parse_internal_links(text: str, mentions: bool = True) -> LinkExtraction:
    links: list[InternalLink] = []
    malformed = 0
    for m in _TME.finditer(text):
        link = _parse_tme_path(m.group("path"))
        if link is None:
            malformed += 1
        else:
            links.append(link)
    if mentions:
        for m in _MENTION.finditer(text):
            handle = m.group("handle")
            if handle_ok(handle):
                links.append(InternalLink(link_kind(handle), handle.lower()))
            else:
                malformed += 1
    return LinkExtraction(links, malformed)


def external_urls(text: str) -> list[str]:
    out = []
    for m in _URL.finditer(text):
        url = m.group(0).rstrip(".,;:!")
        if _TME.match(url):
            continue
        out.append(url)
    return out


def url_host(url: str) -> str:
    if url.lower().startswith("magnet:"):
        return "magnet"
    if "://" not in url:
        url = "http://" + url
    try:
        host = urlsplit(url).hostname or ""
    except ValueError:
        return ""
    return host.lower().removeprefix("www.")


def post_internal_links(post: PostRecord, mentions: bool = True) -> LinkExtraction:
    """Structured links plus links parsed from text, deduplicated in first-seen order."""
    found = parse_internal_links(post.text, mentions=mentions)
    seen: set[InternalLink] = set()
    out: list[InternalLink] = []
    for link in list(post.internal_links) + found.links:
        kind, target = link
        if kind != "invite":
            target = target.lower()
        link = InternalLink(kind, target)
        if link not in seen:
            seen.add(link)
            out.append(link)
    return LinkExtraction(out, found.malformed)


def post_external_links(post: PostRecord) -> list[str]:
    seen: dict[str, None] = {}
    for url in list(post.external_links) + external_urls(post.text):
        seen.setdefault(url, None)
    return list(seen)


def host_matches(host: str, patterns: Iterable[str]) -> str | None:
    """Return the first pattern matching ``host``.

    Dotted patterns match the host or any subdomain of it; bare keywords
    match as a substring of the host.
    """
    for p in patterns:
        if "." in p:
            if host == p or host.endswith("." + p):
                return p
        elif p in host:
            return p
    return None
