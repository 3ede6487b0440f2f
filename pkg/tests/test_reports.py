from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from antirip.catalog import CatalogEntry, TitleMatch
from antirip.errors import ChannelGone, OutsideWindow
from antirip.platform import ChannelRecord, PostRecord
from antirip.reports import (
    DAY,
    PLATFORM,
    Check,
    TrackingRecord,
    build_reports,
    check_entity,
    outcome_summary,
    record_from_dict,
    record_to_dict,
    track,
    tracking_records,
    write_outbox,
)
from antirip.taxonomy import AssignedLabel, PostVerdict, TaxonomyLabel
from conftest import reference_number

T0 = 1_767_225_600
RH = {"Bluefin Studios": "abuse@bluefin.example", "Ganges Talkies": "abuse@ganges.example"}
FILM_A = CatalogEntry("t0100", "Silent Reef", 2019, companies=("Bluefin Studios",))
FILM_B = CatalogEntry("t0200", "Monsoon Letters", 2021, companies=("Ganges Talkies",))
FILM_C = CatalogEntry("t0300", "Orphan Film", 2020, companies=("Nobody Pictures",))


class FakePlatform:
    def __init__(self, channels, posts, gone=()):
        self.channels, self.posts, self.gone = channels, posts, set(gone)

    def resolve_handle(self, handle):
        return next((c for c in self.channels.values() if c.handle == handle), None)

    def channel_meta(self, cid):
        if cid in self.gone:
            raise ChannelGone(cid)
        return self.channels[cid]

    def fetch_posts(self, cid, limit):
        if cid in self.gone:
            raise ChannelGone(cid)
        ps = sorted((p for p in self.posts.values() if p.channel_id == cid), key=lambda p: -p.post_id)
        return ps[:limit]


def piracy(cid, pid):
    return PostVerdict(cid, pid, True, (AssignedLabel(TaxonomyLabel.of("direct_download"), "file"),))


def world(n_posts=3, spacing=3600):
    ch = {"c1": ChannelRecord("c1", "films_main", "Films", 100, 0)}
    posts = {("c1", i): PostRecord("c1", i, T0 + i * spacing, f"film {i}", 500) for i in range(1, n_posts + 1)}
    verdicts = [piracy("c1", i) for i in range(1, n_posts + 1)]
    return ch, posts, verdicts


def test_two_companies_give_two_streams_plus_platform():
    ch, posts, verdicts = world(2)
    matches = [TitleMatch(FILM_A, ("c1", 1), 1.0), TitleMatch(FILM_B, ("c1", 2), 1.0), TitleMatch(FILM_C, ("c1", 2), 1.0)]
    reps = build_reports(verdicts, matches, RH, "event", ch, posts, T0)
    assert sorted({r.recipient for r in reps}) == sorted([PLATFORM, *RH])
    assert sum(r.recipient == PLATFORM for r in reps) == 2
    assert all(r.recipient_kind == ("platform" if r.recipient == PLATFORM else "rights_holder") for r in reps)


def test_ambiguous_matches_do_not_reach_rights_holders():
    ch, posts, verdicts = world(1)
    matches = [TitleMatch(FILM_A, ("c1", 1), 0.9, ambiguous=True)]
    reps = build_reports(verdicts, matches, RH, "event", ch, posts, T0)
    assert [r.recipient for r in reps] == [PLATFORM]


def test_batched_day_is_one_report():
    ch, posts, verdicts = world(3, spacing=3600)
    reps = build_reports(verdicts, [], RH, "batched", ch, posts, T0)
    assert len(reps) == 1 and len(reps[0].items) == 3
    assert len(build_reports(verdicts, [], RH, "event", ch, posts, T0)) == 3
    ch, posts, verdicts = world(3, spacing=DAY)
    assert len(build_reports(verdicts, [], RH, "batched", ch, posts, T0)) == 3


def test_no_piracy_no_reports():
    ch, posts, _ = world(3)
    benign = [PostVerdict("c1", i, False) for i in range(1, 4)]
    assert build_reports(benign, [], RH, "batched", ch, posts, T0) == []


def test_report_ids_are_stable_and_distinct():
    ch, posts, verdicts = world(3)
    a = build_reports(verdicts, [], RH, "event", ch, posts, T0)
    b = build_reports(list(reversed(verdicts)), [], RH, "event", ch, posts, T0 + 5)
    assert [r.report_id for r in a] == [r.report_id for r in b]
    assert len({r.report_id for r in a}) == 3
    assert all(len(r.report_id) == 16 for r in a)


def test_url_only_strips_evidence(tmp_path):
    ch, posts, verdicts = world(1)
    rep = build_reports(verdicts, [], RH, "event", ch, posts, T0, url_only=True)[0]
    item = rep.as_dict()["channels"][0]["posts"][0]
    assert set(item) == {"channel_id", "post_id", "post_url", "external_links"}
    paths = write_outbox([rep], tmp_path, {"run_id": "run-x"})
    body = json.loads(paths[0].read_text())
    assert body["_header"] == {"run_id": "run-x"}
    assert paths[1].read_text().startswith("# run_id=run-x")


def test_referential_integrity():
    ch, posts, verdicts = world(4)
    verdicts[1] = PostVerdict("c1", 2, False)
    matches = [TitleMatch(FILM_A, ("c1", i), 1.0) for i in (1, 3)]
    reps = build_reports(verdicts, matches, RH, "batched", ch, posts, T0)
    flagged = {v.key for v in verdicts if v.is_piracy}
    for r in reps:
        for it in r.items:
            assert it.key in posts and it.key in flagged
            if r.recipient != PLATFORM:
                assert set(it.title_ids) <= {m.entry.id for m in matches if m.post == it.key}
    recs = tracking_records(reps, T0)
    assert {x.entity_id for x in recs} == {c.id for r in reps for c, _ in r.channels}
    assert recs[0].post_ids == (1, 3, 4)


def record(eid="c1", posts=(1,), at=T0, window=14):
    return TrackingRecord(eid, "channel", at, (PLATFORM,), tuple(posts), window_days=window)


def test_alive_then_gone():
    ch, posts, _ = world(3)
    fake = FakePlatform(ch, posts)
    r = track(fake, [record()], T0 + DAY)[0]
    assert r.latest.status == "alive" and not r.gone
    fake.gone.add("c1")
    r = track(fake, [r], T0 + 2 * DAY)[0]
    assert r.gone and [c.status for c in r.checks] == ["alive", "gone"]


def test_half_the_posts_removed():
    ch, posts, _ = world(10)
    for i in (2, 4, 6, 8):
        posts[("c1", i)] = PostRecord("c1", i, posts[("c1", i)].time, "", 0, removed=True)
    del posts[("c1", 5)]
    c = check_entity(FakePlatform(ch, posts), record(posts=range(1, 11)), T0 + DAY)
    assert (c.status, c.post_removed, c.posts_checked) == ("alive", 5, 10)


def test_window_is_inclusive():
    ch, posts, _ = world(1)
    fake = FakePlatform(ch, posts)
    assert check_entity(fake, record(), T0 + 14 * DAY).status == "alive"
    with pytest.raises(OutsideWindow):
        check_entity(fake, record(), T0 + 15 * DAY)
    with pytest.raises(OutsideWindow):
        check_entity(fake, record(), T0 - 1)
    assert track(fake, [record()], T0 + 15 * DAY)[0].checks == ()


def test_checks_are_append_only():
    r = record().with_check(Check(T0 + 10, "alive"))
    with pytest.raises(ValueError):
        r.with_check(Check(T0 + 5, "alive"))


def test_summary_edges():
    empty = outcome_summary([])
    assert empty["removal_rate"] is None and empty["entities"] == 0
    all_gone = [record(f"c{i}").with_check(Check(T0 + 1, "gone")) for i in range(3)]
    assert outcome_summary(all_gone)["removal_rate"] == 1.0
    unchecked = outcome_summary([record()])
    assert unchecked["removal_rate"] == 0.0 and unchecked["unchecked"] == 1
    assert unchecked["post_removal"]["median_fraction"] is None


def test_reference_removal_share(reference_text):
    gone = int(reference_number(reference_text, r"(\d+) of the [\d,]+ reported channels"))
    total = int(reference_number(reference_text, r"of the ([\d,]+) reported channels"))
    pct = reference_number(reference_text, r"reported channels and interconnected channels \(([\d.]+)\\?%\)")
    recs = [record(f"c{i:04d}").with_check(Check(T0 + 1, "gone" if i < gone else "alive")) for i in range(total)]
    assert round(100 * outcome_summary(recs)["removal_rate"], 1) == pytest.approx(pct)
    small = [record(f"c{i}").with_check(Check(T0 + 1, "gone" if i < 10 else "alive")) for i in range(21)]
    assert round(100 * outcome_summary(small)["removal_rate"], 1) == 47.6


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["alive", "gone", "skipped"]), st.integers(0, 5)), max_size=6),
       st.sampled_from(["channel", "bot"]))
def test_record_round_trip(checks, kind):
    r = TrackingRecord("c9", kind, T0, ("platform", "Bluefin Studios"), (3, 5, 8))
    for i, (status, removed) in enumerate(checks):
        r = r.with_check(Check(T0 + i, status, removed, 3))
    assert record_from_dict(json.loads(json.dumps(record_to_dict(r)))) == r
