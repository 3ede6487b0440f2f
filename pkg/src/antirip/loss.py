"""Lower-bound loss estimate from matched titles, post views and static pricing.

One percent of views count as consumptions, floored. Titles available on a
streaming service are pooled per (service, region) and charged one month of
that service's cheapest plan per consumption; everything else is priced per
title at its rental price, falling back to the physical-media price.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .catalog import Catalog, TitleMatch
from .errors import MissingFxRate
from .platform import PostRecord

log = logging.getLogger(__name__)

CONSUMPTION_RATE_PERCENT = 1  # consumptions per 100 views
UNKNOWN_REGION = "ZZ"
ANY_REGION = "*"


def consumptions(views: int) -> int:
    """Complete hundreds of views; integer arithmetic, no float rounding."""
    if views < 0:
        raise ValueError("views must be >= 0")
    return views * CONSUMPTION_RATE_PERCENT // 100


@dataclass(frozen=True)
class PricingEntry:
    title_id: str
    region: str
    streaming: tuple[str, float, str] | None = None  # service, monthly cost, currency
    rental: tuple[float, str] | None = None
    physical: tuple[float, str] | None = None

    def __post_init__(self):
        if not (self.streaming or self.rental or self.physical):
            raise ValueError(f"pricing for {self.title_id}/{self.region} has no access mode")
        costs = [self.streaming[1]] if self.streaming else []
        costs += [m[0] for m in (self.rental, self.physical) if m]
        if any(c <= 0 for c in costs):
            raise ValueError("costs must be > 0")

    @classmethod
    def from_dict(cls, d: dict) -> "PricingEntry":
        s, r, p = d.get("streaming"), d.get("rental"), d.get("physical")
        return cls(
            title_id=d["title_id"],
            region=d.get("region", ANY_REGION),
            streaming=(s[0], float(s[1]), s[2]) if s else None,
            rental=(float(r[0]), r[1]) if r else None,
            physical=(float(p[0]), p[1]) if p else None,
        )

    def to_dict(self) -> dict:
        d: dict = {"title_id": self.title_id, "region": self.region}
        for k in ("streaming", "rental", "physical"):
            v = getattr(self, k)
            if v:
                d[k] = list(v)
        return d


class PricingTable:
    """Static pricing oracle keyed by (title, region); region ``*`` is a wildcard."""

    def __init__(self, entries: Iterable[PricingEntry] = ()):
        self._rows: dict[tuple[str, str], PricingEntry] = {}
        for e in entries:
            self._rows[(e.title_id, e.region)] = e

    def lookup(self, title_id: str, region: str) -> PricingEntry | None:
        return self._rows.get((title_id, region)) or self._rows.get((title_id, ANY_REGION))

    def __len__(self) -> int:
        return len(self._rows)

    @classmethod
    def load(cls, path: str | Path) -> "PricingTable":
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    d = json.loads(line)
                    if "_header" not in d:
                        rows.append(PricingEntry.from_dict(d))
        return cls(rows)


@dataclass(frozen=True)
class ExchangeTable:
    rates: Mapping[str, float]  # USD per unit
    as_of: str = ""

    def __post_init__(self):
        if any(r <= 0 for r in self.rates.values()):
            raise ValueError("exchange rates must be > 0")
        if "USD" in self.rates and self.rates["USD"] != 1:
            raise ValueError("USD rate must be 1")

    def to_usd(self, amount: float, currency: str) -> float:
        if currency == "USD":
            return amount
        try:
            return amount * self.rates[currency]
        except KeyError:
            raise MissingFxRate(currency) from None

    @classmethod
    def load(cls, path: str | Path) -> "ExchangeTable":
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        rates = {k: float(v) for k, v in d["rates"].items()}
        rates.setdefault("USD", 1.0)
        return cls(rates, d.get("as_of", ""))


def load_language_map(path: str | Path | None = None) -> dict[str, str]:
    if path is None:
        text = resources.files("antirip.data").joinpath("language_regions.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return {k.lower(): v for k, v in json.loads(text).items() if not k.startswith("_")}


def infer_region(post: PostRecord, language_map: Mapping[str, str]) -> str:
    tag = (post.language_tag or "").strip().lower()
    if not tag:
        return UNKNOWN_REGION
    return language_map.get(tag) or language_map.get(tag.split("-")[0], UNKNOWN_REGION)


@dataclass(frozen=True)
class MatchedView:
    """One title seen in one post, with that post's views and inferred region."""

    title_id: str
    post: tuple[str, int]
    views: int
    region: str


def matched_views(
    matches: Iterable[TitleMatch],
    posts: Mapping[tuple[str, int], PostRecord],
    language_map: Mapping[str, str],
) -> tuple[list[MatchedView], list[dict]]:
    """Unambiguous matches become priced views; ambiguous ones go to the side ledger."""
    out: dict[tuple[str, tuple[str, int]], MatchedView] = {}
    skipped = []
    for m in matches:
        post = posts.get(m.post)
        if post is None:
            continue
        if m.ambiguous:
            skipped.append({"key": f"{m.entry.id}@{m.post[0]}/{m.post[1]}", "reason": "ambiguous_match",
                            "views": post.view_count})
            continue
        mv = MatchedView(m.entry.id, m.post, post.view_count, infer_region(post, language_map))
        out.setdefault((mv.title_id, mv.post), mv)
    return [out[k] for k in sorted(out)], skipped


@dataclass
class LossGroup:
    key: str
    mode: str  # subscription | rental | physical
    region: str
    title_ids: tuple[str, ...]
    views_total: int
    consumptions: int
    unit_cost_usd: float
    loss_usd: float
    title_views: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "mode": self.mode,
            "region": self.region,
            "title_ids": list(self.title_ids),
            "views_total": self.views_total,
            "consumptions": self.consumptions,
            "unit_cost_usd": self.unit_cost_usd,
            "loss_usd": self.loss_usd,
            "title_views": dict(sorted(self.title_views.items())),
        }


@dataclass
class LossEstimate:
    groups: list[LossGroup]
    unpriced: list[dict]
    total_usd: float

    def as_dict(self) -> dict:
        return {
            "total_usd": self.total_usd,
            "groups": [g.as_dict() for g in self.groups],
            "unpriced": self.unpriced,
        }


def estimate(items: Iterable[MatchedView], pricing: PricingTable, fx: ExchangeTable) -> LossEstimate:
    streaming: dict[tuple[str, str], list[tuple[MatchedView, PricingEntry]]] = {}
    single: dict[tuple[str, str], list[tuple[MatchedView, PricingEntry]]] = {}
    unpriced: list[dict] = []
    for mv in items:
        entry = pricing.lookup(mv.title_id, mv.region)
        if entry is None:
            unpriced.append({"key": f"{mv.title_id}@{mv.region}", "reason": "no_pricing", "views": mv.views})
        elif entry.streaming:
            streaming.setdefault((entry.streaming[0], mv.region), []).append((mv, entry))
        else:
            single.setdefault((mv.title_id, mv.region), []).append((mv, entry))

    groups: list[LossGroup] = []
    for (service, region), rows in sorted(streaming.items()):
        key = f"{service}@{region}"
        views = sum(mv.views for mv, _ in rows)
        try:
            unit = min(fx.to_usd(e.streaming[1], e.streaming[2]) for _, e in rows)
        except MissingFxRate as exc:
            log.info("group %s unpriced: %s", key, exc)
            unpriced.append({"key": key, "reason": "missing_fx", "currency": exc.currency, "views": views})
            continue
        groups.append(_group(key, "subscription", region, rows, views, unit))
    for (title_id, region), rows in sorted(single.items()):
        key = f"{title_id}@{region}"
        views = sum(mv.views for mv, _ in rows)
        e = rows[0][1]
        mode, (cost, cur) = ("rental", e.rental) if e.rental else ("physical", e.physical)
        try:
            unit = fx.to_usd(cost, cur)
        except MissingFxRate as exc:
            log.info("title %s unpriced: %s", key, exc)
            unpriced.append({"key": key, "reason": "missing_fx", "currency": exc.currency, "views": views})
            continue
        groups.append(_group(key, mode, region, rows, views, unit))
    total = sum(g.loss_usd for g in groups)
    return LossEstimate(groups, sorted(unpriced, key=lambda u: u["key"]), total)


def _group(key, mode, region, rows, views, unit) -> LossGroup:
    tv: dict[str, int] = {}
    for mv, _ in rows:
        tv[mv.title_id] = tv.get(mv.title_id, 0) + mv.views
    n = consumptions(views)
    return LossGroup(key, mode, region, tuple(sorted(tv)), views, n, unit, n * unit, tv)


def individual_streaming_estimate(
    items: Iterable[MatchedView], pricing: PricingTable, fx: ExchangeTable
) -> float:
    """Price every streaming title on its own at its group's subscription cost."""
    est = estimate(items, pricing, fx)
    total = 0.0
    for g in est.groups:
        if g.mode == "subscription":
            total += sum(consumptions(v) for v in g.title_views.values()) * g.unit_cost_usd
    return total


def rollup(est: LossEstimate, catalog: Catalog) -> dict[str, dict[str, float]]:
    """Loss by production country and kind; pooled groups split by each title's view share."""
    out: dict[str, dict[str, float]] = {}
    for g in est.groups:
        if g.views_total == 0 or g.loss_usd == 0:
            continue
        for tid, v in sorted(g.title_views.items()):
            e = catalog.get(tid)
            country = e.countries[0] if e.countries else UNKNOWN_REGION
            share = g.loss_usd * v / g.views_total
            row = out.setdefault(country, {"movie": 0.0, "tv": 0.0})
            row[e.kind] = row.get(e.kind, 0.0) + share
    return dict(sorted(out.items()))


def loss_report(est: LossEstimate, fx: ExchangeTable, catalog: Catalog | None = None, skipped=()) -> dict:
    report = {
        "assumptions": {
            "consumptions_per_100_views": CONSUMPTION_RATE_PERCENT,
            "rounding": "floor",
            "subscription_months_per_consumption": 1,
            "group_key": "(service, region)",
            "views": "raw post views, summed without deduplication",
            "fx_as_of": fx.as_of,
        },
        **est.as_dict(),
    }
    report["unpriced"] = sorted(list(est.unpriced) + list(skipped), key=lambda u: u["key"])
    if catalog is not None:
        report["by_country_kind"] = rollup(est, catalog)
    return report
