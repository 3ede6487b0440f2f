from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from antirip.errors import ChannelGone, InvalidSpec, RateLimited, TransportExhausted, TransportFailure
from antirip.platform import ChannelRecord, FixedClock, InternalLink, PostRecord, RetryPolicy, fetch_posts, resolve_handle
from antirip.sim import DEFAULT_NOW, EcosystemSpec, RolePlan, SimulatedPlatform, generate_ecosystem, load_ecosystem, save_ecosystem

DAY = 86400


def test_record_validation():
    with pytest.raises(ValueError):
        ChannelRecord("c1", "1movies", "x", 0, 0)
    with pytest.raises(ValueError):
        ChannelRecord("c1", "movies", "x", -1, 0)
    with pytest.raises(ValueError):
        PostRecord("c1", 1, 0, view_count=-5)
    with pytest.raises(ValueError):
        PostRecord("c1", 1, 0, attachment=("a.mkv", 3 * 1024**3))
    with pytest.raises(ValueError):
        PostRecord("c1", 1, 0, internal_links=(InternalLink("group", "abcdef"),))


def test_post_round_trip():
    p = PostRecord("c1", 3, 100, "hi", 5, (InternalLink("channel", "films_backup2"),), ("https://x.y",),
                   ("a.mkv", 10), "en", None, True)
    assert PostRecord.from_dict(p.to_dict()) == p


def test_resolve_planted_handle():
    state = generate_ecosystem(EcosystemSpec(seed=3, n_channels=6, n_bots=1, lexicon=("piratehub", "hd")))
    client = SimulatedPlatform(state)
    rec = resolve_handle(client, "piratehub_hd")
    assert rec is not None and rec.handle == "piratehub_hd"
    assert resolve_handle(client, "nobody_here_at_all") is None
    bot = next(c for c in state.channels.values() if c.is_bot)
    assert resolve_handle(client, bot.handle).is_bot
    with pytest.raises(ValueError):
        resolve_handle(client, "abc")


def test_fetch_posts_newest_first_and_truncated(planted_state):
    client = SimulatedPlatform(planted_state)
    cid = sorted(planted_state.channels)[0]
    posts = fetch_posts(client, cid, 500)
    assert len(posts) == len(planted_state.posts[cid]) <= 500
    assert [p.post_id for p in posts] == sorted((p.post_id for p in posts), reverse=True)
    assert len(fetch_posts(client, cid, 3)) == 3
    with pytest.raises(ValueError):
        fetch_posts(client, cid, 0)


def test_takedown_and_post_removal_follow_clock(planted_state):
    clock = FixedClock(DEFAULT_NOW)
    client = SimulatedPlatform(planted_state, clock)
    cid, when = sorted(planted_state.takedowns.items())[0]
    fetch_posts(client, cid, 5)
    clock.t = when
    with pytest.raises(ChannelGone):
        fetch_posts(client, cid, 5)
    with pytest.raises(ChannelGone):
        client.channel_meta(cid)
    assert resolve_handle(client, planted_state.channels[cid].handle) is None


def test_retry_absorbs_rate_limits_and_failures(planted_state):
    slept = []
    retry = RetryPolicy(sleep=slept.append, transport_retries=3)
    client = SimulatedPlatform(planted_state, rate_limit_every=2, fail_every=3)
    cid = sorted(planted_state.channels)[0]
    for _ in range(6):
        assert fetch_posts(client, cid, 2, retry)
    assert slept


def test_retry_budget_exhausts():
    calls = []

    def broken():
        calls.append(1)
        raise TransportFailure("down")

    retry = RetryPolicy(sleep=lambda s: None, transport_retries=2)
    with pytest.raises(TransportExhausted):
        retry.call(broken)
    assert len(calls) == 3


def test_backoff_is_capped_exponential():
    r = RetryPolicy(base=1, factor=2, cap=10)
    assert [r.delay(i) for i in range(6)] == [1, 2, 4, 8, 10, 10]


def test_rate_limit_wait_bound():
    def always():
        raise RateLimited(0)

    with pytest.raises(RateLimited):
        RetryPolicy(sleep=lambda s: None, max_rate_limit_waits=3).call(always)


def test_generation_is_deterministic():
    spec = EcosystemSpec(seed=1)
    a, b = generate_ecosystem(spec), generate_ecosystem(spec)
    assert a.all_posts() == b.all_posts()
    assert a.channels == b.channels
    assert a.truth.edges == b.truth.edges


def test_all_benign_ecosystem_has_no_piracy():
    state = generate_ecosystem(EcosystemSpec(seed=2, benign_fraction=1.0))
    assert not any(p["is_piracy"] for p in state.truth.posts.values())


def test_invalid_specs_rejected():
    with pytest.raises(InvalidSpec):
        generate_ecosystem(EcosystemSpec(benign_fraction=1.5))
    with pytest.raises(InvalidSpec):
        generate_ecosystem(EcosystemSpec(n_channels=3, role_plan=RolePlan(n_terminal=5)))
    with pytest.raises(InvalidSpec):
        generate_ecosystem(EcosystemSpec(posts_per_channel=(5, 8)))


def test_save_load_round_trip(tmp_path, planted_state):
    save_ecosystem(planted_state, tmp_path / "sim")
    back = load_ecosystem(tmp_path / "sim")
    assert back.channels == planted_state.channels
    assert back.all_posts() == planted_state.all_posts()
    assert back.takedowns == planted_state.takedowns
    assert back.post_removals == planted_state.post_removals
    assert back.truth.closure() == planted_state.truth.closure()
    assert back.spec == planted_state.spec


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(5, 60), st.integers(0, 8), st.sampled_from([None, 2]))
def test_planted_edges_realised_in_recent_posts(seed, n_channels, n_bots, reach):
    """Every planted link appears in the source's newest posts, so a 10-post probe sees it."""
    state = generate_ecosystem(EcosystemSpec(
        seed=seed, n_channels=n_channels, n_bots=n_bots, reach_depth=reach, dangling_rate=0.2, invite_rate=0.2,
    ))
    for e in state.truth.edges:
        recent = state.posts[e["src"]][-10:]
        seen = {t for p in recent for _, t in p.internal_links}
        assert e["dst_handle"] in seen, e
