from __future__ import annotations

import re

import pytest
from hypothesis import given, settings, strategies as st

from antirip.errors import EmptyLexicon
from antirip.handles import (
    adjacent_combinations,
    candidate_bound,
    generate_candidates,
    handle_ok,
    pairwise_combinations,
    read_terms,
    sample_higher_order,
    split_handles,
    valid_fragments,
)
from oracles import ORACLE_RE, oracle_candidates


word = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789_", min_size=1, max_size=9)
handle = st.lists(st.text(alphabet="abcdefghij0123", min_size=1, max_size=6), min_size=1, max_size=4).map("_".join)


def test_split_handles_examples(reference_text):
    assert split_handles({"series_rip_hd", "bollywood_4k"}) == {"series", "rip", "hd", "bollywood", "4k"}
    assert split_handles(set()) == set()
    assert split_handles({"moviez"}) == {"moviez"}
    for frag in ("series", "rip", "hd", "bollywood", "4k"):
        assert frag in reference_text


def test_valid_fragments_normalises():
    assert valid_fragments({"4K", "HD!"}) == {"4k", "hd"}
    assert valid_fragments({"rip"}) == {"rip"}
    # pure underscores survive; the final gate rejects composites that start with one
    assert valid_fragments({"___"}) == {"___"}
    assert valid_fragments({"!!"}) == set()


def test_adjacent_combinations(reference_text):
    got = adjacent_combinations("series_rip_hd")
    assert got == {"series_rip", "seriesrip", "rip_hd", "riphd"}
    for composite in ("series_rip", "seriesrip", "rip_hd"):
        assert composite in reference_text
    assert adjacent_combinations("bollywood") == set()
    assert adjacent_combinations("a_b") == {"a_b", "ab"}


def test_pairwise_combinations():
    assert pairwise_combinations({"tv", "rip"}) == {"tv_rip", "tvrip", "rip_tv", "riptv"}
    assert pairwise_combinations({"x"}) == set()
    vocab = {f"w{i}" for i in range(10)}
    assert len(pairwise_combinations(vocab)) <= 2 * 10 * 9


def test_higher_order_sampling():
    assert sample_higher_order({"alpha", "beta", "gamma"}, 0, 3) == set()
    out = sample_higher_order({"a", "b", "c"}, 5, 7)
    assert len(out) == 5
    for s in out:
        parts = s.split("_") if "_" in s else None
        # every output uses each of a, b, c exactly once
        assert sorted(s.replace("_", "")) == ["a", "b", "c"]
        if parts:
            assert all(parts)
    assert out == sample_higher_order({"a", "b", "c"}, 5, 7)
    with pytest.raises(ValueError):
        sample_higher_order({"a"}, -1, 0)


def test_handle_ok(reference_text):
    assert handle_ok("series_rip_hd")
    assert not handle_ok("1movies")
    assert not handle_ok("abcd")
    assert handle_ok("abcde")
    assert handle_ok("a" * 32)
    assert not handle_ok("a" * 33)
    assert not handle_ok("_movies")
    assert re.search(r"5 to 32 characters", reference_text)
    assert "beginning with a letter" in reference_text


def test_generate_candidates_hand_enumerated():
    got = generate_candidates({"movies", "rip"}, set(), 0, seed=0)
    assert set(got) == {"movies", "movies_rip", "moviesrip", "rip_movies", "ripmovies"}
    assert list(generate_candidates({"hdfilms"}, set(), 0, 0)) == ["hdfilms"]


def test_generate_candidates_is_deterministic_and_seed_sensitive():
    lex = [f"term{i}" for i in range(12)]
    a = generate_candidates(lex, ["film_hub_hd"], 20, seed=4)
    b = generate_candidates(lex, ["film_hub_hd"], 20, seed=4)
    c = generate_candidates(lex, ["film_hub_hd"], 20, seed=5)
    assert a.candidates == b.candidates
    assert a.candidates != c.candidates


def test_empty_lexicon_rejected():
    with pytest.raises(EmptyLexicon):
        generate_candidates([], ["some_handle"])


@settings(max_examples=150, deadline=None)
@given(st.sets(word, min_size=1, max_size=8), st.sets(handle, max_size=3), st.integers(0, 10**6))
def test_candidates_match_oracle(lexicon, handles, seed):
    got = generate_candidates(lexicon, handles, 0, seed)
    assert len(set(got)) == len(got)
    assert set(got) == oracle_candidates(lexicon, handles)
    assert len(got) <= candidate_bound(lexicon, handles, 0)


@settings(max_examples=100, deadline=None)
@given(st.sets(word, min_size=1, max_size=8), st.sets(handle, max_size=3), st.integers(0, 20), st.integers(0, 99))
def test_candidates_always_pass_gate(lexicon, handles, k, seed):
    got = generate_candidates(lexicon, handles, k, seed)
    assert all(ORACLE_RE.match(c) for c in got)
    assert len(got) <= candidate_bound(lexicon, handles, k)
    for h in handles:
        for comp in adjacent_combinations(h):
            if ORACLE_RE.match(comp):
                assert comp in got.candidates


def test_read_terms(tmp_path):
    p = tmp_path / "lex.txt"
    p.write_text("# comment\nmovies\n\n  rip  \n", encoding="utf-8")
    assert read_terms(p) == ["movies", "rip"]
