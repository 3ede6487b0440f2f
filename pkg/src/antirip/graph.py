"""Directed promotion graph: roles, components and indirect reachability."""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import EmptyGraph
from .links import link_kind, post_internal_links
from .platform import ChannelRecord, PostRecord
from .taxonomy import PostVerdict

log = logging.getLogger(__name__)

EDGE_KINDS = {("channel", "channel"): "ch_ch", ("channel", "bot"): "ch_bot", ("bot", "channel"): "bot_ch"}
ROLES = ("super", "regular", "terminal", "isolated")


@dataclass(frozen=True)
class Node:
    id: str
    kind: str  # channel | bot
    handle: str | None = None
    external: bool = False


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: str


@dataclass
class PromotionGraph:
    nodes: dict[str, Node] = field(default_factory=dict)
    edges: frozenset[Edge] = frozenset()
    invite_only_excluded: frozenset[str] = frozenset()

    def __post_init__(self):
        self._out: dict[str, set[str]] = {n: set() for n in self.nodes}
        self._in: dict[str, set[str]] = {n: set() for n in self.nodes}
        for e in self.edges:
            if e.src == e.dst:
                raise ValueError(f"self-loop on {e.src}")
            kinds = (self.nodes[e.src].kind, self.nodes[e.dst].kind)
            if EDGE_KINDS.get(kinds) != e.kind:
                raise ValueError(f"edge kind {e.kind} inconsistent with {kinds}")
            self._out[e.src].add(e.dst)
            self._in[e.dst].add(e.src)

    def successors(self, node: str) -> set[str]:
        return self._out[node]

    def out_degree(self, node: str) -> int:
        return len(self._out[node])

    def in_degree(self, node: str) -> int:
        return len(self._in[node])

    def channel_ids(self, include_external: bool = False) -> list[str]:
        return sorted(
            n.id for n in self.nodes.values() if n.kind == "channel" and (include_external or not n.external)
        )

    def edge_kind_counts(self) -> dict[str, int]:
        c = Counter(e.kind for e in self.edges)
        return {k: c.get(k, 0) for k in ("ch_ch", "ch_bot", "bot_ch")}


def stub_id(handle: str) -> str:
    return "@" + handle.lower()


def build(
    entities: Iterable[ChannelRecord],
    posts: Iterable[PostRecord],
    verdicts: Iterable[PostVerdict] | None = None,
    mentions: bool = True,
) -> PromotionGraph:
    """One node per entity (stubs for uncrawled targets), one edge per distinct pair.

    ``verdicts``, when given, restricts edge evidence to posts judged piracy.
    Bot-to-bot links are dropped since no edge kind covers them.
    """
    nodes: dict[str, Node] = {}
    by_handle: dict[str, str] = {}
    for rec in entities:
        nodes[rec.id] = Node(rec.id, "bot" if rec.is_bot else "channel", rec.handle)
        if rec.handle:
            by_handle[rec.handle.lower()] = rec.id
    keep = None
    if verdicts is not None:
        keep = {v.key for v in verdicts if v.is_piracy}
    public: dict[str, set[str]] = {}
    invite_srcs: set[str] = set()
    dropped = 0
    for p in posts:
        if p.channel_id not in nodes or (keep is not None and p.key not in keep):
            continue
        src = p.channel_id
        for kind, target in post_internal_links(p, mentions=mentions).links:
            if kind == "invite":
                invite_srcs.add(src)
                continue
            dst = by_handle.get(target.lower())
            if dst is None:
                dst = stub_id(target)
                nodes.setdefault(dst, Node(dst, link_kind(target), target.lower(), external=True))
            if dst == src:
                continue
            if (nodes[src].kind, nodes[dst].kind) not in EDGE_KINDS:
                dropped += 1
                continue
            public.setdefault(src, set()).add(dst)
    if dropped:
        log.debug("dropped %d bot-to-bot links", dropped)
    excluded = frozenset(s for s in invite_srcs if not public.get(s))
    edges = frozenset(
        Edge(s, d, EDGE_KINDS[(nodes[s].kind, nodes[d].kind)])
        for s, ds in public.items()
        if s not in excluded
        for d in ds
    )
    return PromotionGraph(dict(sorted(nodes.items())), edges, excluded)


@dataclass(frozen=True)
class RoleThresholds:
    mean_outdeg: float
    median_outdeg: float
    stddev_outdeg: float
    super_cutoff: float
    n: int = 0

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mean_outdeg": self.mean_outdeg,
            "median_outdeg": self.median_outdeg,
            "stddev_outdeg": self.stddev_outdeg,
            "super_cutoff": self.super_cutoff,
        }


def degree_thresholds(degrees: Sequence[int], counts: Sequence[int] | None = None) -> RoleThresholds:
    """mean + 2 * population stddev over integer degrees, computed exactly.

    ``counts`` turns ``degrees`` into a histogram (degree value, multiplicity),
    which keeps very large fixtures cheap.
    """
    if counts is None:
        hist = Counter(int(d) for d in degrees)
    else:
        if len(counts) != len(degrees):
            raise ValueError("degrees and counts differ in length")
        hist = Counter()
        for d, c in zip(degrees, counts):
            if c < 0:
                raise ValueError("negative count")
            hist[int(d)] += int(c)
    n = sum(hist.values())
    if n == 0:
        raise EmptyGraph("no channel out-degrees to summarise")
    s1 = sum(d * c for d, c in hist.items())
    s2 = sum(d * d * c for d, c in hist.items())
    mean = Fraction(s1, n)
    var = Fraction(n * s2 - s1 * s1, n * n)
    sd = math.sqrt(var.numerator) / math.sqrt(var.denominator)
    # median from the cumulative histogram
    lo_rank, hi_rank = (n - 1) // 2, n // 2
    lo = hi = None
    seen = 0
    for d in sorted(hist):
        seen += hist[d]
        if lo is None and seen > lo_rank:
            lo = d
        if seen > hi_rank:
            hi = d
            break
    return RoleThresholds(
        mean_outdeg=float(mean),
        median_outdeg=(lo + hi) / 2,
        stddev_outdeg=sd,
        super_cutoff=float(mean) + 2 * sd,
        n=n,
    )


def compute_thresholds(graph: PromotionGraph) -> RoleThresholds:
    """Statistics over crawled channel nodes, invite-only channels left out."""
    ids = [i for i in graph.channel_ids() if i not in graph.invite_only_excluded]
    if not ids:
        raise EmptyGraph("graph has no eligible channel nodes")
    return degree_thresholds([graph.out_degree(i) for i in ids])


@dataclass(frozen=True)
class NodeRole:
    id: str
    role: str
    outdeg: int
    indeg: int


def role_of(outdeg: int, indeg: int, cutoff: float) -> str:
    if outdeg > cutoff:
        return "super"
    if outdeg >= 1:
        return "regular"
    return "terminal" if indeg >= 1 else "isolated"


def classify_roles(graph: PromotionGraph, thresholds: RoleThresholds) -> list[NodeRole]:
    """Exactly one role per crawled channel; bots and stubs get none."""
    return [
        NodeRole(i, role_of(graph.out_degree(i), graph.in_degree(i), thresholds.super_cutoff),
                 graph.out_degree(i), graph.in_degree(i))
        for i in graph.channel_ids()
    ]


def components(graph: PromotionGraph) -> list[frozenset[str]]:
    """Weakly connected components, largest first, ties by smallest member."""
    parent = {n: n for n in graph.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in graph.edges:
        a, b = find(e.src), find(e.dst)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[str, set[str]] = {}
    for n in graph.nodes:
        groups.setdefault(find(n), set()).add(n)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: (-len(g), min(g)))


def reachable(graph: PromotionGraph, src: str) -> set[str]:
    seen: set[str] = set()
    q = deque(graph.successors(src))
    while q:
        u = q.popleft()
        if u in seen:
            continue
        seen.add(u)
        q.extend(graph.successors(u) - seen)
    return seen


def transitive_pairs(graph: PromotionGraph) -> set[tuple[str, str]]:
    """(u, v) with a directed path of length >= 2 but no direct edge."""
    out = set()
    for u in graph.nodes:
        direct = graph.successors(u)
        for v in reachable(graph, u):
            if v != u and v not in direct:
                out.add((u, v))
    return out


# ------------------------------------------------------------------ export


def edges_csv(graph: PromotionGraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["src", "dst", "edge_kind"])
    for e in sorted(graph.edges, key=lambda e: (e.src, e.dst)):
        w.writerow([e.src, e.dst, e.kind])
    return buf.getvalue()


def roles_csv(graph: PromotionGraph, roles: Iterable[NodeRole]) -> str:
    by_id = {r.id: r.role for r in roles}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "kind", "role", "outdeg", "indeg"])
    for n in graph.nodes.values():
        kind = n.kind + ("_external" if n.external else "")
        w.writerow([n.id, kind, by_id.get(n.id, ""), graph.out_degree(n.id), graph.in_degree(n.id)])
    return buf.getvalue()


def read_roles_csv(text: str) -> dict[str, str]:
    return {row["id"]: row["role"] for row in csv.DictReader(io.StringIO(text)) if row["role"]}


def to_dot(graph: PromotionGraph, roles: Iterable[NodeRole] = ()) -> str:
    by_id = {r.id: r.role for r in roles}
    colour = {"super": "red", "terminal": "blue", "regular": "black", "isolated": "gray40"}
    lines = ["digraph promotion {", "  rankdir=LR;"]
    for n in graph.nodes.values():
        attrs = [f'label="{n.handle or n.id}"']
        if n.kind == "bot":
            attrs.append("shape=box")
        if n.external:
            attrs.append("style=filled fillcolor=lightgray")
        elif n.id in by_id:
            attrs.append(f"color={colour[by_id[n.id]]}")
        lines.append(f'  "{n.id}" [{" ".join(attrs)}];')
    for e in sorted(graph.edges, key=lambda e: (e.src, e.dst)):
        lines.append(f'  "{e.src}" -> "{e.dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def summary(graph: PromotionGraph, roles: Sequence[NodeRole], thresholds: RoleThresholds) -> dict:
    comps = components(graph)
    counts = Counter(r.role for r in roles)
    chans = set(graph.channel_ids())
    in_big = sum(1 for c in comps if len(c) >= 2 for n in c if n in chans)
    return {
        "nodes": len(graph.nodes),
        "channels": sum(1 for n in graph.nodes.values() if n.kind == "channel" and not n.external),
        "bots": sum(1 for n in graph.nodes.values() if n.kind == "bot" and not n.external),
        "external": sum(1 for n in graph.nodes.values() if n.external),
        "edges": len(graph.edges),
        "edge_kinds": graph.edge_kind_counts(),
        "invite_only_excluded": sorted(graph.invite_only_excluded),
        "roles": {r: counts.get(r, 0) for r in ROLES},
        "thresholds": thresholds.as_dict(),
        "components": len(comps),
        "channels_in_components_ge2": in_big,
        "transitive_pairs": len(transitive_pairs(graph)),
    }


def graph_from_edges(
    nodes: Mapping[str, str], edges: Iterable[tuple[str, str]]
) -> PromotionGraph:
    """Convenience constructor from {id: kind} and (src, dst) pairs."""
    ns = {i: Node(i, k) for i, k in nodes.items()}
    es = frozenset(Edge(s, d, EDGE_KINDS[(ns[s].kind, ns[d].kind)]) for s, d in edges if s != d)
    return PromotionGraph(ns, es)
