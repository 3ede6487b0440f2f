from __future__ import annotations

import math
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from antirip.crawler import discover
from antirip.errors import EmptyGraph
from antirip.graph import (
    build,
    classify_roles,
    components,
    compute_thresholds,
    degree_thresholds,
    edges_csv,
    graph_from_edges,
    read_roles_csv,
    role_of,
    roles_csv,
    summary,
    to_dot,
    transitive_pairs,
)
from antirip.platform import ChannelRecord, PostRecord, fetch_posts
from antirip.sim import DEFAULT_NOW, EcosystemSpec, RolePlan, SimulatedPlatform, generate_ecosystem
from antirip.taxonomy import PostVerdict
from conftest import reference_number
from oracles import degree_histogram, dfs_transitive_pairs, random_graph, warshall_transitive_pairs


def chan(cid, handle, bot=False):
    return ChannelRecord(cid, handle, handle, 10, 0, bot)


def test_repeated_links_give_one_edge():
    ents = [chan("c1", "films_main"), chan("c2", "films_backup")]
    posts = [PostRecord("c1", i, 0, "join t.me/films_backup") for i in range(1, 6)]
    g = build(ents, posts)
    assert len(g.edges) == 1
    assert g.edge_kind_counts() == {"ch_ch": 1, "ch_bot": 0, "bot_ch": 0}


def test_invite_only_channel_excluded_from_thresholds():
    ents = [chan("c1", "films_main"), chan("c2", "films_backup"), chan("c3", "secret_club")]
    posts = [
        PostRecord("c1", 1, 0, "t.me/films_backup"),
        PostRecord("c3", 1, 0, "private: t.me/+AbCdEfGh123"),
    ]
    g = build(ents, posts)
    assert g.invite_only_excluded == frozenset({"c3"})
    assert compute_thresholds(g).n == 2


def test_bot_to_channel_edge_kind():
    ents = [chan("b1", "moviefile_bot", bot=True), chan("c1", "films_main")]
    g = build(ents, [PostRecord("b1", 1, 0, "more at @films_main")])
    assert [e.kind for e in g.edges] == ["bot_ch"]


def test_verdicts_restrict_evidence():
    ents = [chan("c1", "films_main"), chan("c2", "films_backup")]
    posts = [PostRecord("c1", 1, 0, "t.me/films_backup")]
    assert len(build(ents, posts, [PostVerdict("c1", 1, False)]).edges) == 0
    assert len(build(ents, posts, [PostVerdict("c1", 1, True)]).edges) == 1


def test_unknown_targets_become_stubs():
    g = build([chan("c1", "films_main")], [PostRecord("c1", 1, 0, "t.me/elsewhere_hd and t.me/getfile_bot")])
    assert set(g.nodes) == {"c1", "@elsewhere_hd", "@getfile_bot"}
    assert all(g.nodes[n].external for n in g.nodes if n.startswith("@"))
    assert g.channel_ids() == ["c1"]


def test_equal_degrees_have_no_super():
    t = degree_thresholds([3, 3, 3, 3])
    assert t.stddev_outdeg == 0 and t.super_cutoff == 3
    assert role_of(3, 0, t.super_cutoff) == "regular"


def test_threshold_worked_example():
    t = degree_thresholds([0, 0, 30])
    assert t.mean_outdeg == 10
    assert t.stddev_outdeg == pytest.approx(math.sqrt(200), abs=1e-12)
    assert t.super_cutoff == pytest.approx(10 + 2 * math.sqrt(200), abs=1e-9)
    assert t.median_outdeg == 0


def test_roles_examples():
    assert role_of(0, 3, 5.0) == "terminal"
    assert role_of(0, 0, 5.0) == "isolated"
    assert role_of(6, 0, 5.0) == "super"
    assert role_of(5, 0, 5.0) == "regular"


def test_empty_inputs():
    with pytest.raises(EmptyGraph):
        degree_thresholds([])
    with pytest.raises(EmptyGraph):
        compute_thresholds(graph_from_edges({"b": "bot"}, []))
    assert components(graph_from_edges({}, [])) == []


def test_components_and_transitive_examples():
    g = graph_from_edges({k: "channel" for k in "ABCD"}, [("A", "B"), ("C", "D")])
    assert len(components(g)) == 2
    chain = graph_from_edges({k: "channel" for k in "ABC"}, [("A", "B"), ("B", "C")])
    assert transitive_pairs(chain) == {("A", "C")}
    tri = graph_from_edges({k: "channel" for k in "ABC"}, [("A", "B"), ("B", "C"), ("A", "C")])
    assert transitive_pairs(tri) == set()


def test_reference_thresholds_reproduce(reference_text):
    mu = reference_number(reference_text, r"\\mu = ([\d.]+)")
    sigma = reference_number(reference_text, r"\\sigma = ([\d.]+)")
    degrees, counts = degree_histogram(f"{mu}", f"{sigma}")
    t = degree_thresholds(degrees, counts)
    assert abs(t.mean_outdeg - mu) < 1e-9
    assert abs(t.stddev_outdeg - sigma) < 1e-9
    assert abs(t.super_cutoff - (mu + 2 * sigma)) < 1e-9
    flagged = min(d for d in range(200) if role_of(d, 0, t.super_cutoff) == "super")
    assert flagged == 23
    hub = reference_number(reference_text, r"linking to (\d+) unique destinations")
    assert role_of(int(hub), 0, t.super_cutoff) == "super"


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 200), min_size=1, max_size=60))
def test_thresholds_match_exact_oracle(degrees):
    n = len(degrees)
    mean = Fraction(sum(degrees), n)
    var = sum((Fraction(d) - mean) ** 2 for d in degrees) / n
    t = degree_thresholds(degrees)
    assert abs(t.mean_outdeg - float(mean)) < 1e-9
    assert abs(t.stddev_outdeg - math.sqrt(var)) < 1e-9
    s = sorted(degrees)
    assert t.median_outdeg == (s[(n - 1) // 2] + s[n // 2]) / 2


def to_nx(g):
    d = nx.DiGraph()
    d.add_nodes_from(g.nodes)
    d.add_edges_from((e.src, e.dst) for e in g.edges)
    return d


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 30), st.floats(0.0, 0.3))
def test_structure_matches_oracles(seed, n, p):
    g = random_graph(random.Random(seed), n, p)
    assert sum(g.edge_kind_counts().values()) == len(g.edges)
    expected = sorted(nx.weakly_connected_components(to_nx(g)), key=lambda c: (-len(c), min(c)))
    assert [set(c) for c in components(g)] == expected
    pairs = transitive_pairs(g)
    assert pairs == warshall_transitive_pairs(g) == dfs_transitive_pairs(g)
    roles = classify_roles(g, compute_thresholds(g)) if g.channel_ids() else []
    assert len(roles) == len(g.channel_ids())


def test_exports_round_trip():
    g = graph_from_edges({"a": "channel", "b": "channel", "x": "bot"}, [("a", "b"), ("a", "x"), ("x", "b")])
    roles = classify_roles(g, compute_thresholds(g))
    assert edges_csv(g).splitlines()[0] == "src,dst,edge_kind"
    assert len(edges_csv(g).splitlines()) == 4
    assert read_roles_csv(roles_csv(g, roles)) == {r.id: r.role for r in roles}
    dot = to_dot(g, roles)
    assert dot.startswith("digraph") and dot.count("->") == 3
    s = summary(g, roles, compute_thresholds(g))
    assert s["edges"] == 3 and s["components"] == 1 and s["transitive_pairs"] == 0


def test_planted_hub_flagged_super():
    state = generate_ecosystem(EcosystemSpec(seed=4, n_channels=70, n_bots=10,
                                             role_plan=RolePlan(super_outdegrees=(74,), n_terminal=3)))
    client = SimulatedPlatform(state)
    found = discover(client, [e["handle"] for e in state.truth.entities if e["seed"]], DEFAULT_NOW)
    recs = [e.record for e in found.entities]
    g = build(recs, [p for r in recs for p in fetch_posts(client, r.id, 500)])
    roles = classify_roles(g, compute_thresholds(g))
    hub = next(e["id"] for e in state.truth.entities if e["planted_role"] == "super")
    assert g.out_degree(hub) == 74
    assert [r.id for r in roles if r.role == "super"] == [hub]
