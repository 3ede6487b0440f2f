#!/usr/bin/env python3
"""Crawl a planted ecosystem and look at who promotes whom."""

from __future__ import annotations

from collections import Counter

from antirip.crawler import discover
from antirip.graph import build, classify_roles, components, compute_thresholds, transitive_pairs
from antirip.platform import fetch_posts
from antirip.sim import DEFAULT_NOW, EcosystemSpec, RolePlan, SimulatedPlatform, generate_ecosystem

state = generate_ecosystem(EcosystemSpec(seed=3, n_channels=40, n_bots=6,
                                         role_plan=RolePlan(super_outdegrees=(25,), n_terminal=5)))
client = SimulatedPlatform(state)

seeds = [e["handle"] for e in state.truth.entities if e["seed"]]
found = discover(client, seeds, DEFAULT_NOW)
print(f"{len(seeds)} seed handles -> {len(found.entities)} entities within two hops")
print("by depth:", dict(sorted(Counter(e.depth for e in found.entities).items())))

records = [e.record for e in found.entities]
posts = [p for r in records for p in fetch_posts(client, r.id, 500)]
g = build(records, posts)
t = compute_thresholds(g)
print(f"\nout-degree mean {t.mean_outdeg:.3f}, stddev {t.stddev_outdeg:.3f}, super cutoff {t.super_cutoff:.3f}")

roles = classify_roles(g, t)
print("roles:", dict(Counter(r.role for r in roles)))
for r in sorted(roles, key=lambda r: -r.outdeg)[:3]:
    print(f"  {r.id:>8}  {r.role:<8} out={r.outdeg:<3} in={r.indeg}")

print("\nedge kinds:", g.edge_kind_counts())
print("largest component:", len(components(g)[0]), "of", len(g.nodes), "nodes")
print("pairs reachable only indirectly:", len(transitive_pairs(g)))
