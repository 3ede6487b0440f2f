"""Rule-based reference classifier for the two-stage detect/categorize contract.

Every taxonomy leaf has one rule that inspects the post text, its links and
its attachment. ``detect`` fires on any strong signature (a file upload,
a known cloud or streaming host, credential or modded-app markers, routing
through bots or backup channels, paid access, ...). Weak presentation and
community signals only count when they co-occur with an access affordance
(a link or file together with download vocabulary or a file size).

Routing to a bot is labelled ``channel_bot_routing``; routing to another
channel for the files is ``intermediary_routing``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Sequence

from .errors import NoLabelMatch
from .links import host_matches, post_external_links, post_internal_links, url_host
from .platform import PostRecord
from .taxonomy import (
    DEFAULT_PRIORITY,
    MAX_LABELS,
    AssignedLabel,
    PostVerdict,
    TaxonomyLabel,
    priority_key,
)

log = logging.getLogger(__name__)

VIDEO_EXT = (".mkv", ".mp4", ".avi", ".mov", ".m4v", ".ts", ".webm", ".wmv", ".flv")
ARCHIVE_EXT = (".zip", ".rar", ".7z")
_MB = 1024**2


def _rx(pattern: str) -> re.Pattern:
    return re.compile(pattern, re.IGNORECASE)


RESOLUTION = _rx(
    r"\b(?:240p|360p|480p|576p|720p|1080p|1440p|2160p|4k|uhd|x264|x265|h\.?26[45]|hevc|10bit|"
    r"hdr|web-?dl|webrip|blu-?ray|brrip|hdrip|dvdrip|hdtv|hdcam)\b"
)
SIZE = _rx(r"\b\d+(?:\.\d+)?\s?(?:gb|mb|gib|mib)\b")
ACCESS_WORDS = _rx(
    r"\b(?:download|dl|watch (?:free|online|now|here)|get it|links? (?:below|here|inside)|"
    r"full movie|full episode|s\d{1,2}\s?e\d{1,3}|ep(?:isode)? ?\d+)\b"
)
BUNDLED = _rx(
    r"\b(?:complete (?:series|season|collection)|all (?:seasons|episodes|parts)|box ?set|"
    r"collection|trilogy|s\d{2}\s?-\s?s\d{2}|episodes? \d+\s?-\s?\d+|full pack)\b"
)
SUBTITLES = _rx(r"\b(?:subtitles?|subs|softsub|hardsub|dubbed|dub|dual audio|multi audio)\b")
BACKUP = _rx(r"\bback-?\s?up\b|\bin case (?:this|our|the) (?:channel|main)\b.{0,30}(?:deleted|removed|banned)")
DEDICATED = _rx(
    r"\b(?:dedicated|exclusive) channel\b|\bthis channel (?:only|exclusively) (?:posts|uploads|shares)\b"
)
DIRECTORY = _rx(r"\b(?:index|directory|channel list|list of (?:our )?channels|all our channels)\b")
ROUTING = _rx(
    r"\b(?:download|watch|links?|files?|get (?:it|the file)|episodes?)\b.{0,40}"
    r"\b(?:in|at|from|via|on|inside)\b.{0,25}(?:t\.me/|telegram\.me/|@)"
)
VPN = _rx(
    r"\b(?:vpn|proxy|proxies|mtproto|v2ray|shadowsocks|mirror (?:site|link|domain)s?|"
    r"geo-?block(?:ed)?|unblock(?:ed)?)\b"
)
MODDED = _rx(r"\b(?:mod(?:ded)? apk|apk|premium unlocked|mod version|cracked app)\b")
CREDENTIALS = _rx(
    r"\b(?:netflix|hulu|disney\+?|crunchyroll|hbo|max|prime video|paramount\+?)\b.{0,40}"
    r"\b(?:accounts?|logins?|cookies?|passwords?)\b"
)
COMBO = re.compile(r"[\w.+-]+@[\w-]+\.[\w.]+:\S+")
TUTORIAL = _rx(
    r"\b(?:tutorial|step ?1|how to (?:install|watch|download|use|unlock|set ?up)|setup guide|guide:)"
)
REQUEST = _rx(
    r"\b(?:requests? (?:are )?open|request (?:any|your)|comment (?:the|your) (?:title|name|request)|"
    r"drop your requests?|#request)"
)
JOIN = _rx(r"\b(?:join|subscribe|follow)\b")
FORCED = _rx(
    r"\b(?:must|have to|need to|required to) (?:join|subscribe)\b|"
    r"\bjoin (?:all )?(?:these|the following|the listed) channels\b.{0,40}\b(?:to|before|then)\b|"
    r"\bafter joining\b"
)
CREDITS = _rx(r"\b(?:buy|purchase|top ?up) (?:\w+ )?credits?\b|\bcredits? (?:per|for each) download\b")
PREMIUM = _rx(
    r"\b(?:premium|vip)\b.{0,40}\b(?:4k|2160p|members?|access|plan|subscription|fee)\b|"
    r"\bpaid (?:tier|members|access)\b|\bpay (?:to|for) (?:access|unlock|4k)\b"
)
INCENTIVE = _rx(
    r"\b(?:upload|share|contribute)\b.{0,40}\b(?:earn|rewards?|get paid|bonus)\b|"
    r"\b(?:earn|rewards?)\b.{0,30}\buploads?\b"
)
BOT_DELIVERY = _rx(r"\b(?:here is your file|your (?:download|file) is ready|file delivered)\b")
BOT_RETRIEVAL = _rx(
    r"\b(?:send (?:me )?(?:the )?(?:name|title)|search (?:for )?any (?:movie|series|title)|"
    r"type the (?:name|title)|/search)"
)
BOT_PROMOTION = _rx(r"\b(?:join (?:these|the following|all) channels|to unlock\b.{0,40}\bjoin)")
BOT_INGESTION = _rx(
    r"\b(?:upload (?:your )?(?:files?|movies|videos)|send (?:us|me) (?:your )?(?:files?|videos|movies)|"
    r"submit (?:your )?(?:files?|content))\b"
)

# Leaves that need an access affordance to count as piracy on their own.
WEAK_LEAVES = frozenset(
    {
        "resolution_encoding",
        "bundled_collection",
        "subtitles_dubs",
        "content_request",
        "channel_referral",
        "access_tutorial",
    }
)


def _load_list(name: str) -> tuple[str, ...]:
    text = resources.files("antirip.data").joinpath(name).read_text(encoding="utf-8")
    return tuple(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    )


def default_cloud_hosts() -> tuple[str, ...]:
    return _load_list("cloud_hosts.txt")


def default_streaming_hosts() -> tuple[str, ...]:
    return _load_list("streaming_hosts.txt")


def _fmt_size(n: int) -> str:
    return f"{n / 1024**3:.2f} GB" if n >= 1024**3 else f"{n / _MB:.0f} MB"


@dataclass
class RuleClassifier:
    """Deterministic, pure-per-post reference implementation of the classifier contract."""

    cloud_hosts: Sequence[str] = field(default_factory=default_cloud_hosts)
    streaming_hosts: Sequence[str] = field(default_factory=default_streaming_hosts)
    priority: Sequence[str] = DEFAULT_PRIORITY
    bot_ids: frozenset[str] = frozenset()
    mentions: bool = True
    # optional hook: True when the text names a catalog title
    title_detector: Callable[[str], bool] | None = None

    def features(self, post: PostRecord) -> dict[str, str]:
        """Every matching leaf mapped to a justification naming its trigger."""
        text = post.text or ""
        low = text.lower()
        links = post_internal_links(post, mentions=self.mentions).links
        channels = [t for k, t in links if k == "channel"]
        bots = [t for k, t in links if k == "bot"]
        urls = post_external_links(post)
        hosts = [url_host(u) for u in urls]
        att = post.attachment
        found: dict[str, str] = {}

        if att:
            name, size = att[0].lower(), att[1]
            if name.endswith(VIDEO_EXT) or (name.endswith(ARCHIVE_EXT) and size >= 100 * _MB):
                found["direct_download"] = f"uploaded file {att[0]} ({_fmt_size(size)})"
        if bots and ACCESS_WORDS.search(low) or (bots and ROUTING.search(text)):
            found["channel_bot_routing"] = f"access routed through bot @{bots[0]}"
        for h in hosts:
            p = host_matches(h, self.cloud_hosts)
            if p:
                found["cloud_storage"] = f"cloud file host {h}"
                break
        for u, h in zip(urls, hosts):
            p = host_matches(h, self.streaming_hosts)
            if p or ".torrent" in u.lower():
                found["streaming_magnet"] = (
                    "magnet link" if h == "magnet" else f"streaming/torrent host {h or u}"
                )
                break
        if "streaming_magnet" not in found and "magnet:?xt=" in low:
            found["streaming_magnet"] = "magnet link"

        if DEDICATED.search(text):
            found["dedicated_content_channel"] = "declares a dedicated content channel"
        targets = set(channels) | set(bots)
        if len(targets) >= 3:
            found["directory_index_channel"] = f"lists {len(targets)} internal destinations"
        elif targets and DIRECTORY.search(text):
            found["directory_index_channel"] = "channel directory/index wording"
        if BACKUP.search(text):
            found["backup_channel"] = "points to a backup channel"
        if channels and not bots and ROUTING.search(text):
            found["intermediary_routing"] = f"files routed through channel @{channels[0]}"

        if VPN.search(text):
            found["vpn_proxy_mirror"] = f"circumvention tool: {VPN.search(text).group(0)}"
        if MODDED.search(text) or (att and att[0].lower().endswith(".apk")):
            found["modded_app"] = "modified streaming app"
        if CREDENTIALS.search(text) or COMBO.search(text):
            found["streaming_credentials"] = "shares streaming-service credentials"
        if TUTORIAL.search(text):
            found["access_tutorial"] = "step-by-step access tutorial"

        if post.channel_id in self.bot_ids:
            if BOT_DELIVERY.search(text) or (att and "direct_download" in found):
                found["content_delivery"] = "bot delivers files"
            if BOT_RETRIEVAL.search(text):
                found["dynamic_retrieval"] = "bot answers title queries"
            if BOT_PROMOTION.search(text):
                found["channel_promotion"] = "bot requires joining channels"
            if BOT_INGESTION.search(text):
                found["content_ingestion"] = "bot accepts user uploads"

        if REQUEST.search(text):
            found["content_request"] = "solicits content requests"
        if targets and JOIN.search(text):
            found["channel_referral"] = f"asks users to join @{(channels or bots)[0]}"
        if FORCED.search(text):
            found["forced_join"] = "access conditional on joining channels"
        if CREDITS.search(text):
            found["credit_purchase"] = "sells download credits"
        if PREMIUM.search(text):
            found["premium_tier"] = "paid premium quality tier"
        if INCENTIVE.search(text):
            found["incentivized_upload"] = "rewards user uploads"

        m = RESOLUTION.search(text)
        if m:
            found["resolution_encoding"] = f"quality marker {m.group(0)}"
        if BUNDLED.search(text):
            found["bundled_collection"] = "bundled collection"
        if SUBTITLES.search(text):
            found["subtitles_dubs"] = "subtitles or dubbed audio"
        return found

    def _affordance(self, post: PostRecord) -> bool:
        has_vehicle = bool(
            post.attachment
            or post_external_links(post)
            or post_internal_links(post, mentions=self.mentions).links
        )
        return has_vehicle and bool(ACCESS_WORDS.search(post.text) or SIZE.search(post.text))

    def detect(self, post: PostRecord) -> bool:
        found = self.features(post)
        if any(leaf not in WEAK_LEAVES for leaf in found):
            return True
        if found and self._affordance(post):
            return True
        if self.title_detector is not None and self._affordance(post):
            return bool(self.title_detector(post.text))
        return False

    def categorize(self, post: PostRecord) -> PostVerdict:
        found = self.features(post)
        if not found:
            raise NoLabelMatch(f"no taxonomy rule matched {post.channel_id}/{post.post_id}")
        key = priority_key(self.priority)
        labels = sorted((TaxonomyLabel.of(leaf) for leaf in found), key=key)[:MAX_LABELS]
        return PostVerdict(
            post.channel_id,
            post.post_id,
            True,
            tuple(AssignedLabel(lb, found[lb.leaf]) for lb in labels),
        )

    def classify(self, post: PostRecord) -> PostVerdict:
        return classify_post(self, post)


def classify_post(adapter, post: PostRecord) -> PostVerdict:
    """Run detect, then categorize only on positives."""
    if not adapter.detect(post):
        return PostVerdict(post.channel_id, post.post_id, False)
    try:
        return adapter.categorize(post)
    except NoLabelMatch as exc:
        log.warning("detector/categorizer disagreement: %s", exc)
        return PostVerdict(post.channel_id, post.post_id, True)


def classify_posts(adapter, posts: Iterable[PostRecord]) -> list[PostVerdict]:
    return [classify_post(adapter, p) for p in posts]
