"""Independent reference implementations used by the unit and acceptance tests."""

from __future__ import annotations

import itertools
import random
import re
from decimal import Decimal
from fractions import Fraction

import numpy as np

from antirip.graph import PromotionGraph, graph_from_edges

ORACLE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]{4,31}$")


def oracle_candidates(lexicon, handles):
    """Independent enumeration for k_higher = 0."""
    frags = set()
    for h in handles:
        frags |= {f.lower() for f in h.split("_") if f}
    vocab = set()
    for t in set(lexicon) | frags:
        v = "".join(c for c in t.lower() if c in "abcdefghijklmnopqrstuvwxyz0123456789_")
        if v:
            vocab.add(v)
    pool = set(vocab)
    for h in handles:
        parts = [f.lower() for f in h.split("_") if f]
        for i in range(len(parts) - 1):
            pool |= {parts[i] + "_" + parts[i + 1], parts[i] + parts[i + 1]}
    for a, b in itertools.permutations(sorted(vocab), 2):
        pool |= {a + "_" + b, a + b}
    return {c for c in pool if ORACLE_RE.match(c)}


def oracle_closure(state, max_depth=2):
    """Bellman-Ford style relaxation over planted edges; bots never relay."""
    kinds = {e["id"]: e["kind"] for e in state.truth.entities}
    dist = {e["id"]: 0 for e in state.truth.entities if e["seed"] and e["gated"]}
    for _ in range(max_depth):
        nxt = dict(dist)
        for ed in state.truth.edges:
            s, d = ed["src"], ed["dst"]
            if d is None or s not in dist or kinds[s] == "bot" or dist[s] >= max_depth:
                continue
            nxt[d] = min(nxt.get(d, max_depth + 1), dist[s] + 1)
        dist = nxt
    return dist


def degree_histogram(mean: str, stddev: str, n: int = 200_000_000) -> tuple[list[int], list[int]]:
    """Integer out-degree histogram with exactly the given population mean and stddev.

    Uses degrees {0, 1, j, k}: pick the count at k, then solve the two moment
    equations for the counts at 1 and j. ``n`` must make n*mean and n*var
    integers.
    """
    mu, sd = Fraction(Decimal(mean)), Fraction(Decimal(stddev))
    s1, s2 = mu * n, (sd * sd + mu * mu) * n
    assert s1.denominator == 1 and s2.denominator == 1, "n too small for exact moments"
    s1, s2 = int(s1), int(s2)
    for j in range(2, 12):
        for k in range(j + 1, 120):
            # smallest count at k keeping the count at 1 non-negative
            first = max(0, -(-(s2 - j * s1) // (k * k - j * k)))
            for ck in range(first, first + j * j):
                r1, r2 = s1 - k * ck, s2 - k * k * ck
                if (r2 - r1) % (j * j - j):
                    continue
                cj = (r2 - r1) // (j * j - j)
                c1 = r1 - j * cj
                c0 = n - c1 - cj - ck
                if min(c0, c1, cj) >= 0:
                    return [0, 1, j, k], [c0, c1, cj, ck]
    raise AssertionError("no histogram for these parameters")


def random_graph(rng: random.Random, n: int, p: float, bot_share: float = 0.2) -> PromotionGraph:
    kinds = {f"n{i:03d}": ("bot" if rng.random() < bot_share else "channel") for i in range(n)}
    ids = sorted(kinds)
    edges = [
        (a, b)
        for a in ids
        for b in ids
        if a != b and not (kinds[a] == kinds[b] == "bot") and rng.random() < p
    ]
    return graph_from_edges(kinds, edges)


def warshall_transitive_pairs(graph: PromotionGraph) -> set[tuple[str, str]]:
    """Boolean Warshall closure; pairs joined by a path of length >= 2 and no direct edge."""
    ids = sorted(graph.nodes)
    idx = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    adj = np.zeros((n, n), dtype=bool)
    for e in graph.edges:
        adj[idx[e.src], idx[e.dst]] = True
    reach = adj.copy()
    for k in range(n):
        reach |= np.outer(reach[:, k], reach[k, :])
    # length >= 2: one edge, then any path of length >= 1
    two_plus = (adj.astype(np.int64) @ reach.astype(np.int64)) > 0
    out = set()
    for i in range(n):
        for j in range(n):
            if i != j and two_plus[i, j] and not adj[i, j]:
                out.add((ids[i], ids[j]))
    return out


def dfs_transitive_pairs(graph: PromotionGraph) -> set[tuple[str, str]]:
    """Exhaustive walk enumeration with per-source memo of (node, hops>=2) states."""
    out = set()
    for u in graph.nodes:
        direct = graph.successors(u)
        seen: set[tuple[str, bool]] = set()
        stack = [(v, False) for v in direct]
        while stack:
            v, deep = stack.pop()
            if (v, deep) in seen:
                continue
            seen.add((v, deep))
            if deep and v != u and v not in direct:
                out.add((u, v))
            for w in graph.successors(v):
                stack.append((w, True))
    return out


def unit_loss_oracle(items, pricing, fx) -> float:
    """Walk views one at a time; every completed block of 100 in a bucket costs one unit.

    Buckets and unit costs are re-derived here from the raw pricing rows rather
    than taken from the estimator.
    """
    buckets: dict[tuple, list] = {}
    for mv in items:
        e = pricing.lookup(mv.title_id, mv.region)
        if e is None:
            continue
        if e.streaming:
            buckets.setdefault(("s", e.streaming[0], mv.region), []).append((mv, e))
        else:
            buckets.setdefault(("t", mv.title_id, mv.region), []).append((mv, e))
    total = 0.0
    for key, rows in buckets.items():
        if key[0] == "s":
            costs = [(e.streaming[1], e.streaming[2]) for _, e in rows]
        else:
            e = rows[0][1]
            costs = [e.rental or e.physical]
        if any(cur != "USD" and cur not in fx.rates for _, cur in costs):
            continue
        unit = min(c if cur == "USD" else c * fx.rates[cur] for c, cur in costs)
        seen = 0
        for mv, _ in rows:
            for _ in range(mv.views):
                seen += 1
                if seen % 100 == 0:
                    total += unit
    return total


def random_loss_inputs(rng: random.Random, max_posts: int = 20, max_views: int = 2000):
    """Plain-random pricing table and matched views over a small title/region grid."""
    from antirip.loss import MatchedView, PricingEntry, PricingTable

    titles = [f"t{i:02d}" for i in range(8)]
    regions = ["US", "IR", "IN"]
    currencies = ["USD", "EUR", "INR"]
    services = ["Netflix", "Prime", "Hulu"]
    entries = []
    for t in titles:
        for r in regions:
            kind = rng.choice(["stream", "stream", "rent", "phys", "none"])
            c = round(rng.uniform(0.5, 300.0), 2)
            if kind == "stream":
                entries.append(PricingEntry(t, r, streaming=(rng.choice(services), c, rng.choice(currencies))))
            elif kind == "rent":
                entries.append(PricingEntry(t, r, rental=(c, rng.choice(currencies))))
            elif kind == "phys":
                entries.append(PricingEntry(t, r, physical=(c, rng.choice(currencies))))
    items = [
        MatchedView(rng.choice(titles), ("c1", i), rng.randint(0, max_views), rng.choice(regions))
        for i in range(rng.randint(1, max_posts))
    ]
    return items, PricingTable(entries)
