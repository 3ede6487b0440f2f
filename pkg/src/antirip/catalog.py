"""Movie/TV catalog ingest and fuzzy title matching against post text.

Titles are matched as in-order token runs inside the post, allowing one
edit per token for titles of two or more tokens. Same-name entries (for
example two national versions of a show) are returned together and marked
ambiguous unless a year, country or company token in the post singles one
out.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError
from .platform import PostRecord

log = logging.getLogger(__name__)

MIN_YEAR = 1980
DEFAULT_THRESHOLD = 0.8
YEAR_BONUS = 0.1
QUALITY_BONUS = 0.05
# fuzzy token comparison only for tokens longer than this
FUZZY_MIN_LEN = 3

_TOKEN = re.compile(r"[a-z0-9]+")
_QUALITY = frozenset(
    "480p 720p 1080p 2160p 4k hdrip webrip bluray x264 x265 hevc complete season".split()
)

COUNTRY_ALIASES: dict[str, tuple[str, ...]] = {
    "US": ("us", "usa", "american"),
    "GB": ("uk", "gb", "british"),
    "JP": ("jp", "japan", "japanese"),
    "KR": ("kr", "korea", "korean"),
    "FR": ("fr", "france", "french"),
    "IN": ("in", "india", "indian"),
    "CN": ("cn", "china", "chinese"),
    "ES": ("es", "spain", "spanish"),
    "DE": ("de", "germany", "german"),
}


def _deletion_variants(token: str) -> set[str]:
    return {token} | {token[:i] + token[i + 1 :] for i in range(len(token))}


def tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def normalize_title(text: str) -> str:
    return " ".join(tokens(text))


def within_one_edit(a: str, b: str) -> bool:
    """True when ``a`` and ``b`` differ by at most one insert, delete or substitution."""
    if a == b:
        return True
    la, lb = len(a), len(b)
    if abs(la - lb) > 1:
        return False
    if la > lb:
        a, b, la, lb = b, a, lb, la
    i = 0
    while i < la and a[i] == b[i]:
        i += 1
    if la == lb:
        return a[i + 1 :] == b[i + 1 :]
    return a[i:] == b[i + 1 :]


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    title: str
    year: int
    kind: str = "movie"
    alt_titles: tuple[str, ...] = ()
    companies: tuple[str, ...] = ()
    countries: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.title.strip():
            raise ValueError("title must be nonempty")
        if self.kind not in ("movie", "tv"):
            raise ValueError(f"kind must be movie or tv, got {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "alt_titles": list(self.alt_titles),
            "year": self.year,
            "kind": self.kind,
            "companies": list(self.companies),
            "countries": list(self.countries),
        }

    @classmethod
    def from_dict(cls, d: dict, default_id: str | None = None) -> "CatalogEntry":
        return cls(
            id=str(d.get("id", default_id)),
            title=d["title"],
            year=int(d["year"]),
            kind=d.get("kind", "movie"),
            alt_titles=tuple(d.get("alt_titles", ())),
            companies=tuple(d.get("companies", ())),
            countries=tuple(c.upper() for c in d.get("countries", ())),
        )


@dataclass(frozen=True)
class TitleMatch:
    entry: CatalogEntry
    post: tuple[str, int]
    confidence: float
    ambiguous: bool = False
    span: tuple[int, int] = (0, 0)
    matched_tokens: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "channel_id": self.post[0],
            "post_id": self.post[1],
            "entry_id": self.entry.id,
            "title": self.entry.title,
            "kind": self.entry.kind,
            "companies": list(self.entry.companies),
            "countries": list(self.entry.countries),
            "confidence": round(self.confidence, 6),
            "ambiguous": self.ambiguous,
            "matched_tokens": list(self.matched_tokens),
            "span": list(self.span),
        }

    @classmethod
    def from_dict(cls, d: dict, catalog: "Catalog") -> "TitleMatch":
        return cls(
            entry=catalog.get(d["entry_id"]),
            post=(d["channel_id"], int(d["post_id"])),
            confidence=float(d["confidence"]),
            ambiguous=bool(d.get("ambiguous", False)),
            span=tuple(d.get("span", (0, 0))),
            matched_tokens=tuple(d.get("matched_tokens", ())),
        )


def load_stop_phrases(path: str | Path | None = None) -> frozenset[str]:
    if path is None:
        text = resources.files("antirip.data").joinpath("stop_phrases.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    out = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.update(tokens(line))
    return frozenset(out)


@dataclass
class Catalog:
    entries: list[CatalogEntry]
    threshold: float = DEFAULT_THRESHOLD
    # (entry index, token tuple) for each title and alt title
    _names: list[tuple[int, tuple[str, ...]]] = field(default_factory=list, repr=False)
    _index: dict[str, set[int]] = field(default_factory=dict, repr=False)
    # one-deletion variants of tokens of multi-token titles -> tokens
    _deletions: dict[str, set[str]] = field(default_factory=dict, repr=False)
    _by_id: dict[str, CatalogEntry] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._build()

    def _build(self) -> None:
        self._names.clear()
        self._index.clear()
        self._deletions.clear()
        self._by_id = {e.id: e for e in self.entries}
        for ei, e in enumerate(self.entries):
            for name in (e.title, *e.alt_titles):
                toks = tuple(tokens(name))
                if not toks:
                    continue
                ni = len(self._names)
                self._names.append((ei, toks))
                for t in set(toks):
                    self._index.setdefault(t, set()).add(ni)
                    if len(toks) >= 2 and len(t) > FUZZY_MIN_LEN:
                        for v in _deletion_variants(t):
                            self._deletions.setdefault(v, set()).add(t)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, entry_id: str) -> CatalogEntry:
        return self._by_id[entry_id]

    def _candidates(self, post_tokens: Sequence[str]) -> tuple[set[int], set[str]]:
        """Names sharing a token with the post, plus every title token the post can match."""
        out: set[int] = set()
        reach = set(post_tokens)
        for t in set(post_tokens):
            out |= self._index.get(t, set())
            if len(t) < FUZZY_MIN_LEN:
                continue
            near: set[str] = set()
            for v in _deletion_variants(t):
                near |= self._deletions.get(v, set())
            for key in near:
                if key != t and within_one_edit(key, t):
                    reach.add(key)
                    out |= {n for n in self._index[key] if len(self._names[n][1]) >= 2}
        return out, reach

    def match(self, post: PostRecord | str, key: tuple[str, int] | None = None) -> list[TitleMatch]:
        """All catalog titles found in the post text, best first."""
        if isinstance(post, PostRecord):
            text, key = post.text, post.key
        else:
            text, key = post, key or ("", 0)
        ptoks = tokens(text)
        if not ptoks:
            return []
        raw: list[tuple[int, float, tuple[int, int], tuple[str, ...]]] = []
        cands, reach = self._candidates(ptoks)
        for ni in sorted(cands):
            ei, ttoks = self._names[ni]
            # the alignment ratio cannot exceed the share of reachable title tokens
            bound = sum(t in reach for t in ttoks) / len(ttoks)
            if self._adjust(bound, self.entries[ei], ptoks) < self.threshold:
                continue
            best = _best_alignment(ttoks, ptoks)
            if best is None:
                continue
            ratio, span, matched = best
            conf = self._adjust(ratio, self.entries[ei], ptoks)
            if conf >= self.threshold:
                raw.append((ei, conf, span, matched))

        # one row per entry: keep its best alignment
        per_entry: dict[int, tuple[float, tuple[int, int], tuple[str, ...]]] = {}
        for ei, conf, span, matched in raw:
            cur = per_entry.get(ei)
            if cur is None or (conf, span[1] - span[0]) > (cur[0], cur[1][1] - cur[1][0]):
                per_entry[ei] = (conf, span, matched)

        # drop matches whose span sits strictly inside a longer match
        spans = {ei: v[1] for ei, v in per_entry.items()}
        kept = {
            ei: v
            for ei, v in per_entry.items()
            if not any(
                o[0] <= v[1][0] and v[1][1] <= o[1] and (o[1] - o[0]) > (v[1][1] - v[1][0])
                for oi, o in spans.items()
                if oi != ei
            )
        }

        groups: dict[str, list[int]] = {}
        for ei in kept:
            groups.setdefault(normalize_title(self.entries[ei].title), []).append(ei)

        out: list[TitleMatch] = []
        for members in groups.values():
            ambiguous = False
            if len(members) > 1:
                chosen = self._disambiguate(members, ptoks, kept)
                if chosen is None:
                    ambiguous = True
                else:
                    members = [chosen]
            for ei in members:
                conf, span, matched = kept[ei]
                out.append(TitleMatch(self.entries[ei], key, conf, ambiguous, span, matched))
        out.sort(key=lambda m: (-m.confidence, m.entry.id))
        return out

    def _adjust(self, ratio: float, entry: CatalogEntry, ptoks: Sequence[str]) -> float:
        conf = ratio
        if str(entry.year) in ptoks:
            conf += YEAR_BONUS
        if _QUALITY.intersection(ptoks):
            conf += QUALITY_BONUS
        return min(conf, 1.0)

    def _disambiguate(self, members, ptoks, kept) -> int | None:
        scores = []
        for ei in members:
            e = self.entries[ei]
            lo, hi = kept[ei][1]
            outside = set(ptoks[:lo]) | set(ptoks[hi:])
            context = {str(e.year)}
            for c in e.countries:
                context |= set(COUNTRY_ALIASES.get(c, (c.lower(),)))
            for comp in e.companies:
                context |= set(tokens(comp))
            scores.append((len(context & outside), ei))
        scores.sort(reverse=True)
        if scores[0][0] > 0 and scores[0][0] > scores[1][0]:
            return scores[0][1]
        return None


def _best_alignment(
    title: Sequence[str], post: Sequence[str]
) -> tuple[float, tuple[int, int], tuple[str, ...]] | None:
    """Best in-order match of title tokens within a window of the post.

    The window starts at a post token matching a title token and spans at
    most ``len(title) + 1`` post tokens, which tolerates one stray word.
    Single-token titles require an exact token.
    """
    n = len(title)
    fuzzy = n >= 2

    def same(a: str, b: str) -> bool:
        return a == b or (fuzzy and len(a) > FUZZY_MIN_LEN and within_one_edit(a, b))

    best = None
    width = n + 1 if n >= 2 else 1
    for start in range(len(post)):
        if not any(same(t, post[start]) for t in title):
            continue
        window = post[start : start + width]
        # longest common subsequence under `same`, tracking the last used index
        m = len(window)
        dp = [[0] * (m + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                if same(title[i - 1], window[j - 1]):
                    dp[i][j] = dp[i - 1][j - 1] + 1
                else:
                    dp[i][j] = max(dp[i - 1][j], dp[i][j - 1])
        k = dp[n][m]
        if k == 0:
            continue
        # recover matched tokens and the last window index used
        i, j, matched, last = n, m, [], 0
        while i > 0 and j > 0:
            if same(title[i - 1], window[j - 1]) and dp[i][j] == dp[i - 1][j - 1] + 1:
                matched.append(window[j - 1])
                last = max(last, j)
                i -= 1
                j -= 1
            elif dp[i - 1][j] >= dp[i][j - 1]:
                i -= 1
            else:
                j -= 1
        ratio = k / n
        cand = (ratio, (start, start + last), tuple(reversed(matched)))
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def ingest_catalog(
    source: str | Path | Iterable[str],
    stop_phrases: Iterable[str] | None = None,
    min_year: int = MIN_YEAR,
    threshold: float = DEFAULT_THRESHOLD,
) -> Catalog:
    """Parse a JSON Lines catalog, dropping pre-``min_year`` and stop-phrase-only titles."""
    if isinstance(source, (str, Path)):
        lines: Iterable[str] = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = source
    stop = frozenset(stop_phrases) if stop_phrases is not None else load_stop_phrases()
    entries = []
    dropped_year = dropped_stop = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            d = json.loads(line)
            if "_header" in d:
                continue
            entry = CatalogEntry.from_dict(d, default_id=f"L{lineno}")
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(str(exc), lineno) from exc
        if entry.year < min_year:
            dropped_year += 1
            continue
        toks = tokens(entry.title)
        if toks and all(t in stop for t in toks):
            dropped_stop += 1
            continue
        entries.append(entry)
    log.info("catalog: kept %d, dropped %d by year, %d by stoplist", len(entries), dropped_year, dropped_stop)
    return Catalog(entries, threshold=threshold)


def fixture_catalog_path() -> Path:
    return Path(str(resources.files("antirip.data").joinpath("catalog_fixture.jsonl")))


def match_posts(catalog: Catalog, posts: Iterable[PostRecord]) -> list[TitleMatch]:
    out = []
    for p in posts:
        out.extend(catalog.match(p))
    return out
