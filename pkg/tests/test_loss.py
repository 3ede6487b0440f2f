from __future__ import annotations

import logging

import pytest
from hypothesis import given, settings, strategies as st

from antirip.catalog import CatalogEntry, TitleMatch
from antirip.loss import (
    ExchangeTable,
    MatchedView,
    PricingEntry,
    PricingTable,
    consumptions,
    estimate,
    individual_streaming_estimate,
    infer_region,
    load_language_map,
    loss_report,
    matched_views,
)
from antirip.platform import PostRecord
from conftest import reference_number
from oracles import unit_loss_oracle

FX = ExchangeTable({"USD": 1.0, "EUR": 1.1, "INR": 0.012, "IRR": 0.000024}, "2026-01-01")
TITLES = [f"t{i:02d}" for i in range(8)]
REGIONS = ["US", "IR", "IN"]


def mv(title, views, region="US", post=None):
    return MatchedView(title, post or ("c1", views), views, region)


def test_hundred_views_is_one_consumption(reference_text):
    n = reference_number(reference_text, r"post with (\d+) views, we assume one user")
    assert consumptions(int(n)) == 1
    assert consumptions(99) == 0
    assert consumptions(0) == 0
    with pytest.raises(ValueError):
        consumptions(-1)


def test_single_streaming_title():
    pricing = PricingTable([PricingEntry("t00", "US", streaming=("Netflix", 3.99, "USD"))])
    est = estimate([mv("t00", 100)], pricing, FX)
    assert est.total_usd == pytest.approx(3.99)
    assert est.groups[0].consumptions == 1


def test_group_shares_one_subscription():
    pricing = PricingTable([
        PricingEntry("t00", "US", streaming=("Prime", 7.99, "USD")),
        PricingEntry("t01", "US", streaming=("Prime", 8.99, "USD")),
    ])
    est = estimate([mv("t00", 300, post=("c1", 1)), mv("t01", 200, post=("c1", 2))], pricing, FX)
    assert len(est.groups) == 1
    assert est.groups[0].consumptions == 5
    assert est.total_usd == pytest.approx(39.95)


def test_rental_then_physical():
    pricing = PricingTable([
        PricingEntry("t00", "*", rental=(4.0, "EUR"), physical=(20.0, "EUR")),
        PricingEntry("t01", "*", physical=(10.0, "USD")),
    ])
    est = estimate([mv("t00", 250), mv("t01", 150)], pricing, FX)
    modes = {g.key: (g.mode, g.consumptions, g.unit_cost_usd) for g in est.groups}
    assert modes["t00@US"] == ("rental", 2, pytest.approx(4.4))
    assert modes["t01@US"] == ("physical", 1, 10.0)


def test_missing_fx_goes_to_side_ledger(caplog):
    pricing = PricingTable([
        PricingEntry("t00", "US", streaming=("Hoichoi", 99.0, "BDT")),
        PricingEntry("t01", "US", rental=(2.0, "USD")),
    ])
    with caplog.at_level(logging.WARNING, logger="antirip.loss"):
        est = estimate([mv("t00", 500), mv("t01", 100)], pricing, FX)
    assert [u["reason"] for u in est.unpriced] == ["missing_fx"]
    assert est.unpriced[0]["currency"] == "BDT"
    assert est.total_usd == pytest.approx(2.0)
    assert not caplog.records


def test_ambiguous_matches_are_skipped():
    a, b = CatalogEntry("t0001", "The Office", 2001, countries=("GB",)), CatalogEntry("t0002", "The Office", 2005, countries=("US",))
    post = PostRecord("c1", 1, 0, "The Office", view_count=400, language_tag="en")
    ms = [TitleMatch(e, ("c1", 1), 0.9, ambiguous=True, matched_tokens=("the", "office")) for e in (a, b)]
    views, skipped = matched_views(ms, {post.key: post}, load_language_map())
    assert views == []
    assert {s["reason"] for s in skipped} == {"ambiguous_match"}
    rep = loss_report(estimate(views, PricingTable(), FX), FX, skipped=skipped)
    assert rep["total_usd"] == 0 and len(rep["unpriced"]) == 2


def test_region_inference():
    lm = load_language_map()
    assert infer_region(PostRecord("c", 1, 0, language_tag="fa"), lm) == "IR"
    assert infer_region(PostRecord("c", 1, 0, language_tag="en"), lm) == "US"
    assert infer_region(PostRecord("c", 1, 0), lm) == "ZZ"


def test_no_pricing_is_reported():
    est = estimate([mv("t00", 1000)], PricingTable(), FX)
    assert est.total_usd == 0
    assert est.unpriced[0]["reason"] == "no_pricing"


# ---------------------------------------------------------------- properties

currencies = st.sampled_from(["USD", "EUR", "INR", "IRR"])
services = st.sampled_from(["Netflix", "Prime", "Hulu"])
cost = st.floats(0.5, 500.0, allow_nan=False)


@st.composite
def priced_inputs(draw, max_posts=20, max_views=5000):
    entries = []
    for t in TITLES:
        for r in REGIONS:
            kind = draw(st.sampled_from(["stream", "rent", "phys", "none"]))
            if kind == "stream":
                entries.append(PricingEntry(t, r, streaming=(draw(services), draw(cost), draw(currencies))))
            elif kind == "rent":
                entries.append(PricingEntry(t, r, rental=(draw(cost), draw(currencies)), physical=(draw(cost), "USD")))
            elif kind == "phys":
                entries.append(PricingEntry(t, r, physical=(draw(cost), draw(currencies))))
    n = draw(st.integers(0, max_posts))
    items = [
        MatchedView(draw(st.sampled_from(TITLES)), ("c1", i), draw(st.integers(0, max_views)), draw(st.sampled_from(REGIONS)))
        for i in range(n)
    ]
    return items, PricingTable(entries)


@settings(max_examples=300, deadline=None)
@given(priced_inputs(max_views=800))
def test_matches_view_by_view_oracle(data):
    items, pricing = data
    assert estimate(items, pricing, FX).total_usd == pytest.approx(unit_loss_oracle(items, pricing, FX), rel=1e-9, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(priced_inputs(), st.sampled_from(["EUR", "INR", "IRR"]), st.floats(0.01, 100.0))
def test_currency_invariance(data, cur, factor):
    """Re-denominating one currency (prices scaled, rate inverted) leaves USD totals unchanged."""
    items, pricing = data

    def scale(m):
        if m is None or m[-1] != cur:
            return m
        return (*m[:-2], m[-2] * factor, cur)

    scaled = PricingTable(
        PricingEntry(e.title_id, e.region, scale(e.streaming), scale(e.rental), scale(e.physical))
        for e in pricing._rows.values()
    )
    fx2 = ExchangeTable({**FX.rates, cur: FX.rates[cur] / factor}, FX.as_of)
    a, b = estimate(items, pricing, FX).total_usd, estimate(items, scaled, fx2).total_usd
    assert b == pytest.approx(a, rel=1e-6, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(priced_inputs(), st.integers(0, 19), st.integers(0, 1000))
def test_monotone_in_views(data, idx, extra):
    items, pricing = data
    if not items:
        return
    i = idx % len(items)
    bumped = list(items)
    bumped[i] = MatchedView(items[i].title_id, items[i].post, items[i].views + extra, items[i].region)
    assert estimate(bumped, pricing, FX).total_usd >= estimate(items, pricing, FX).total_usd - 1e-9


@settings(max_examples=200, deadline=None)
@given(priced_inputs())
def test_unfloored_grouping_never_exceeds_per_title(data):
    """Before flooring, one shared subscription at the group minimum costs no more than per-title pricing."""
    items, pricing = data
    grouped = per_title = 0.0
    for g in estimate(items, pricing, FX).groups:
        if g.mode != "subscription":
            continue
        grouped += g.views_total / 100 * g.unit_cost_usd
        for t, v in g.title_views.items():
            e = pricing.lookup(t, g.region)
            per_title += v / 100 * FX.to_usd(e.streaming[1], e.streaming[2])
    assert grouped <= per_title + 1e-9


def test_floored_grouping_can_exceed_per_title():
    """Flooring is superadditive: 50 + 50 views is one pooled consumption but zero per title."""
    pricing = PricingTable([
        PricingEntry("t00", "US", streaming=("Netflix", 5.0, "USD")),
        PricingEntry("t01", "US", streaming=("Netflix", 5.0, "USD")),
    ])
    items = [mv("t00", 50, post=("c1", 1)), mv("t01", 50, post=("c1", 2))]
    assert estimate(items, pricing, FX).total_usd == 5.0
    assert individual_streaming_estimate(items, pricing, FX) == 0.0
