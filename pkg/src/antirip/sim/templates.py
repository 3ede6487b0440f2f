"""Post templates instantiating each taxonomy behaviour, plus benign chatter.

Each fragment knows which leaves its wording exhibits, so a composed post
carries its own ground-truth label set.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from ..platform import InternalLink
from ..taxonomy import GROUP_OF, MAX_LABELS, order_labels, TaxonomyLabel

CLOUD_HOSTS = (
    "terabox.com",
    "1024terabox.com",
    "gofile.io",
    "cloud.189.cn",
    "alipan.com",
    "pan.quark.cn",
    "mediafire.com",
    "pixeldrain.com",
)
STREAM_HOSTS = ("fmovies-hd.net", "123movies.to", "soap2day.ac", "hdtoday.cc", "myflixer.is")
RESOLUTIONS = ("480p", "720p", "1080p", "2160p")
CODECS = ("x264", "x265", "HEVC", "WEB-DL", "BluRay", "HDRip")
SUB_LANGS = ("English", "Persian", "Arabic", "Hindi", "Spanish", "Burmese", "Chinese")


@dataclass
class Fragment:
    text: str
    leaves: tuple[str, ...]
    internal: list[InternalLink] = field(default_factory=list)
    external: list[str] = field(default_factory=list)
    attachment: tuple[str, int] | None = None


@dataclass
class Title:
    name: str
    year: int
    entry_id: str | None = None


def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", ".", name.lower()).strip(".")


def _code(rng: random.Random, n: int = 10) -> str:
    return "".join(rng.choice("abcdefghijkmnpqrstuvwxyzABCDEFGHJKLMNPQRSTUVWXYZ23456789") for _ in range(n))


def _size(rng: random.Random, lo_mb: int, hi_mb: int) -> int:
    return rng.randint(lo_mb, hi_mb) * 1024**2


def _t(title: Title) -> str:
    return f"{title.name} ({title.year})"


# ---------------------------------------------------------------- content


def direct_download(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            f"🎬 {_t(title)}\nFull movie uploaded below 👇",
            f"New upload: {_t(title)}",
            f"{title.name} is here, grab the file",
        )
    )
    res = rng.choice(RESOLUTIONS)
    size = _size(rng, 300, 2048)
    return Fragment(text, ("direct_download",), attachment=(f"{_slug(title.name)}.{res}.mkv", size))


def cloud_storage(rng, title: Title) -> Fragment:
    url = f"https://{rng.choice(CLOUD_HOSTS)}/s/{_code(rng)}"
    text = rng.choice(
        (
            f"{_t(title)} download link: {url}",
            f"{title.name} 👉 {url}",
            f"Get {title.name} from the cloud: {url}",
        )
    )
    return Fragment(text, ("cloud_storage",))


def streaming_magnet(rng, title: Title) -> Fragment:
    if rng.random() < 0.4:
        magnet = f"magnet:?xt=urn:btih:{_code(rng, 32)}"
        text = f"{title.name} magnet: {magnet}"
    else:
        url = f"https://{rng.choice(STREAM_HOSTS)}/watch/{_slug(title.name)}"
        text = rng.choice((f"Stream {_t(title)} online: {url}", f"{title.name} on our site {url}"))
    return Fragment(text, ("streaming_magnet",))


def dedicated_content_channel(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            f"This channel only posts {title.name} episodes.",
            f"Dedicated channel for {title.name}: every new part lands here first.",
        )
    )
    return Fragment(text, ("dedicated_content_channel",))


def vpn_proxy_mirror(rng, title: Title) -> Fragment:
    ip = ".".join(str(rng.randint(11, 223)) for _ in range(4))
    text = rng.choice(
        (
            f"Site blocked in your country? Use this proxy: {ip}:{rng.randint(1024, 65000)}",
            "Free VPN configs to unblock region-locked catalogs, updated daily",
            f"New mirror site for our streams: https://{_code(rng, 6).lower()}.mirror-zone.net",
        )
    )
    return Fragment(text, ("vpn_proxy_mirror",))


def modded_app(rng, title: Title) -> Fragment:
    app = rng.choice(("Netflix", "Prime Video", "Disney+", "Crunchyroll"))
    text = rng.choice(
        (
            f"{app} MOD APK v{rng.randint(5, 9)}.{rng.randint(0, 40)}: premium unlocked, no ads",
            "Modded player app with everything unlocked, Android only",
        )
    )
    return Fragment(text, ("modded_app",), attachment=(f"{_slug(app)}_mod.apk", _size(rng, 20, 120)))


def streaming_credentials(rng, title: Title) -> Fragment:
    app = rng.choice(("Netflix", "Hulu", "Crunchyroll", "Disney+"))
    if rng.random() < 0.5:
        user = _code(rng, 7).lower()
        text = f"Free {app} accounts 🔑\n{user}@mail.com:{_code(rng, 9)}"
    else:
        text = f"Fresh {app} cookies and logins, first come first served"
    return Fragment(text, ("streaming_credentials",))


def credit_purchase(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            "Each file costs 5 credits. Top up credits in your account before downloading.",
            "Buy credits to unlock the cloud files, 10 credits per download",
        )
    )
    return Fragment(text, ("credit_purchase",))


def premium_tier(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            "VIP access: early episodes for a small monthly fee",
            "Premium members get every release a week early",
        )
    )
    return Fragment(text, ("premium_tier",))


def incentivized_upload(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            "Upload new movies to our drive and earn rewards!",
            "Share your rips with us and get a bonus for every upload",
        )
    )
    return Fragment(text, ("incentivized_upload",))


# ---------------------------------------------------------------- secondary


def resolution_encoding(rng, title: Title) -> Fragment:
    if rng.random() < 0.5:
        text = f"Quality: {rng.choice(RESOLUTIONS)} {rng.choice(CODECS)}"
    else:
        text = "Available in 480p | 720p | 1080p"
    return Fragment(text, ("resolution_encoding",))


def bundled_collection(rng, title: Title) -> Fragment:
    text = rng.choice(
        (f"Complete season {rng.randint(1, 6)}", "All episodes in one place", "Full collection inside")
    )
    return Fragment(text, ("bundled_collection",))


def subtitles_dubs(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            f"{rng.choice(SUB_LANGS)} subtitles included",
            "Dual audio (Hindi/English)",
            f"Dubbed in {rng.choice(SUB_LANGS)}",
        )
    )
    return Fragment(text, ("subtitles_dubs",))


def access_tutorial(rng, title: Title) -> Fragment:
    text = rng.choice(
        (
            "Tutorial: step 1 install the app, step 2 log in, step 3 enjoy",
            "How to install: open settings, allow unknown sources, then run the file",
        )
    )
    return Fragment(text, ("access_tutorial",))


def content_request(rng, title: Title) -> Fragment:
    text = rng.choice(("Requests are open! Comment the title you want", "Drop your requests below 👇"))
    return Fragment(text, ("content_request",))


CONTENT_PRIMARY = {
    "direct_download": direct_download,
    "cloud_storage": cloud_storage,
    "streaming_magnet": streaming_magnet,
    "dedicated_content_channel": dedicated_content_channel,
    "vpn_proxy_mirror": vpn_proxy_mirror,
    "modded_app": modded_app,
    "streaming_credentials": streaming_credentials,
    "credit_purchase": credit_purchase,
    "premium_tier": premium_tier,
    "incentivized_upload": incentivized_upload,
}

DEFAULT_CONTENT_WEIGHTS = {
    "direct_download": 0.32,
    "cloud_storage": 0.18,
    "streaming_magnet": 0.10,
    "dedicated_content_channel": 0.05,
    "vpn_proxy_mirror": 0.06,
    "modded_app": 0.06,
    "streaming_credentials": 0.06,
    "credit_purchase": 0.06,
    "premium_tier": 0.05,
    "incentivized_upload": 0.06,
}

SECONDARY = {
    "resolution_encoding": resolution_encoding,
    "bundled_collection": bundled_collection,
    "subtitles_dubs": subtitles_dubs,
    "access_tutorial": access_tutorial,
    "content_request": content_request,
}

# Secondary fragments that read naturally after a given primary.
SECONDARY_FOR = {
    "direct_download": ("resolution_encoding", "bundled_collection", "subtitles_dubs"),
    "cloud_storage": ("resolution_encoding", "bundled_collection", "subtitles_dubs"),
    "streaming_magnet": ("resolution_encoding", "subtitles_dubs", "bundled_collection"),
    "dedicated_content_channel": ("subtitles_dubs", "content_request"),
    "vpn_proxy_mirror": ("access_tutorial",),
    "modded_app": ("access_tutorial",),
    "streaming_credentials": ("access_tutorial",),
    "credit_purchase": ("content_request",),
    "premium_tier": ("resolution_encoding",),
    "incentivized_upload": ("content_request",),
}


# ---------------------------------------------------------------- link posts


def _tme(rng, handle: str) -> str:
    return rng.choice((f"https://t.me/{handle}", f"t.me/{handle}", f"https://t.me/s/{handle}"))


def backup_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    h = targets[0].target
    if rng.random() < 0.7:
        text = rng.choice(
            (
                f"Join our backup channel {_tme(rng, h)}",
                f"Backup channel in case this one gets removed: {_tme(rng, h)} join now",
            )
        )
        leaves = ("backup_channel", "channel_referral")
    else:
        text = f"backup: {_tme(rng, h)}"
        leaves = ("backup_channel",)
    return Fragment(text, leaves, internal=list(targets[:1]))


def referral_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    h = targets[0].target
    text = rng.choice(
        (
            f"Join {_tme(rng, h)} to download new movies daily",
            f"Subscribe to @{h} to download {title.name} and more",
        )
    )
    return Fragment(text, ("channel_referral",), internal=list(targets[:1]))


def routing_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    h = targets[0].target
    text = rng.choice(
        (
            f"{title.name} episode files are in {_tme(rng, h)}",
            f"Links for {title.name} posted at {_tme(rng, h)}",
        )
    )
    return Fragment(text, ("intermediary_routing",), internal=list(targets[:1]))


def bot_routing_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    h = targets[0].target
    text = rng.choice(
        (
            f"Download {title.name} via @{h}",
            f"Get {title.name} from our bot @{h}, press start to download",
        )
    )
    return Fragment(text, ("channel_bot_routing",), internal=list(targets[:1]))


def forced_join_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    hs = [t.target for t in targets[:2]]
    links = " ".join(_tme(rng, h) for h in hs)
    text = rng.choice(
        (
            f"You must join {links} to get the files",
            f"Join the following channels then press the button: {links}",
        )
    )
    return Fragment(text, ("forced_join", "channel_referral"), internal=list(targets[:2]))


def directory_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    lines = [rng.choice(("📂 Channel index", "📚 Our directory", "🗂 Index of channels"))]
    for t in targets:
        lines.append(f"• {_tme(rng, t.target)}" if t.kind != "bot" else f"• @{t.target}")
    return Fragment("\n".join(lines), ("directory_index_channel",), internal=list(targets))


def benign_referral_post(rng, targets: list[InternalLink], title: Title) -> Fragment:
    h = targets[0].target
    text = rng.choice(
        (
            f"Join our movie discussion group {_tme(rng, h)}",
            f"Follow @{h} for film news and reviews",
        )
    )
    return Fragment(text, (), internal=list(targets[:1]))


def invite_post(rng, codes: list[str]) -> Fragment:
    text = "Private group, limited seats: " + " ".join(f"https://t.me/+{c}" for c in codes)
    # private invites cannot be attributed, so they carry no label on their own
    return Fragment(text, (), internal=[InternalLink("invite", c) for c in codes])


# ---------------------------------------------------------------- bots


def bot_content_delivery(rng, targets, title: Title) -> Fragment:
    size = _size(rng, 300, 2000)
    return Fragment(
        f"Here is your file: {title.name}",
        ("content_delivery", "direct_download"),
        attachment=(f"{_slug(title.name)}.{rng.choice(RESOLUTIONS)}.mp4", size),
    )


def bot_dynamic_retrieval(rng, targets, title: Title) -> Fragment:
    text = rng.choice(
        (
            "Send me the name of any movie or series and I will find it",
            "Type the title you are looking for, results come in pages",
        )
    )
    return Fragment(text, ("dynamic_retrieval",))


def bot_channel_promotion(rng, targets, title: Title) -> Fragment:
    hs = [t.target for t in targets[:2]]
    links = " ".join(_tme(rng, h) for h in hs)
    text = f"Join these channels first, then tap Check: {links}"
    return Fragment(
        text, ("channel_promotion", "channel_referral", "forced_join"), internal=list(targets[:2])
    )


def bot_content_ingestion(rng, targets, title: Title) -> Fragment:
    return Fragment("Send us your files: upload your movies here and we publish them", ("content_ingestion",))


BOT_TEMPLATES = {
    "content_delivery": bot_content_delivery,
    "dynamic_retrieval": bot_dynamic_retrieval,
    "channel_promotion": bot_channel_promotion,
    "content_ingestion": bot_content_ingestion,
}


# ---------------------------------------------------------------- benign


def benign(rng, title: Title) -> Fragment:
    vid = _code(rng, 11)
    text = rng.choice(
        (
            f"Official trailer for {_t(title)} is out now: https://www.youtube.com/watch?v={vid}",
            f"{_t(title)} review: {rng.randint(4, 9)}/10, a slow burn but worth it",
            f"Box office: {title.name} crossed ${rng.randint(5, 400)}M this weekend",
            "What should we watch tonight? Vote in the poll",
            "Happy new year to everyone in this community!",
            f"{title.name} is now streaming on Netflix, check it out with your subscription",
            f"Behind the scenes photos from {title.name}",
            f"{title.name} trailer in 4K: https://youtu.be/{vid}",
            f"Casting news: a sequel to {title.name} is in the works",
        )
    )
    return Fragment(text, ())


# ---------------------------------------------------------------- composition


def ordered_leaves(leaves) -> list[str]:
    return [lb.leaf for lb in order_labels(TaxonomyLabel(GROUP_OF[x], x) for x in leaves)]



def compose(fragments: list[Fragment], title: Title, with_header: bool) -> Fragment:
    """Join fragments into one post; the label set is the union, capped at three."""
    leaves: list[str] = []
    parts: list[str] = []
    internal: list[InternalLink] = []
    external: list[str] = []
    attachment = None
    for f in fragments:
        merged = set(leaves) | set(f.leaves)
        if len(merged) > MAX_LABELS:
            continue
        leaves = list(merged)
        parts.append(f.text)
        internal += f.internal
        external += f.external
        attachment = attachment or f.attachment
    if with_header and fragments and title.name not in parts[0]:
        parts.insert(0, f"🎞 {_t(title)}")
    ordered = tuple(lb.leaf for lb in order_labels(TaxonomyLabel(GROUP_OF[x], x) for x in leaves))
    return Fragment("\n".join(parts), ordered, internal, external, attachment)


def content_post(rng, primary: str, title: Title, n_secondary: int) -> Fragment:
    frags = [CONTENT_PRIMARY[primary](rng, title)]
    options = list(SECONDARY_FOR.get(primary, ()))
    rng.shuffle(options)
    for leaf in options[:n_secondary]:
        frags.append(SECONDARY[leaf](rng, title))
    return compose(frags, title, with_header=primary in ("direct_download", "cloud_storage", "streaming_magnet"))
