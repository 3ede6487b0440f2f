"""Deterministic synthetic piracy ecosystem with planted ground truth.

The generator plants a promotion graph (seeds, one or more super-channels,
terminal channels, bots, dangling links), realises every planted edge as a
link-bearing post among each entity's newest posts, fills the rest of each
feed with taxonomy-template content and benign chatter, and scripts later
takedowns and post removals. Everything is a function of the EcosystemSpec.
"""

from __future__ import annotations

import logging
import math
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..catalog import Catalog, fixture_catalog_path, ingest_catalog, normalize_title
from ..errors import InvalidSpec
from ..handles import generate_candidates, handle_ok, read_terms
from ..platform import ChannelRecord, InternalLink, PostRecord
from ..taxonomy import PostVerdict, truth_verdict
from . import templates as T

log = logging.getLogger(__name__)

DEFAULT_NOW = 1767225600  # 2026-01-01T00:00:00Z
DAY = 86400
DEFAULT_LANGUAGES = ("en", "fa", "hi", "es", "ar", "my", "zh", "ko")


@dataclass(frozen=True)
class RolePlan:
    super_outdegrees: tuple[int, ...] = ()
    n_terminal: int = 0
    regular_outdegree: tuple[int, int] = (1, 3)
    bot_outdegree: tuple[int, int] = (0, 2)


@dataclass(frozen=True)
class EcosystemSpec:
    seed: int = 0
    n_channels: int = 30
    n_bots: int = 5
    role_plan: RolePlan = field(default_factory=RolePlan)
    # (leaf, weight) pairs over content primaries; empty means the default mix
    taxonomy_plan: tuple[tuple[str, float], ...] = ()
    benign_fraction: float = 0.3
    n_seeds: int = 2
    n_stale_seeds: int = 0
    # every entity reachable from the gated seeds within this many hops; None for a random graph
    reach_depth: int | None = 2
    posts_per_channel: tuple[int, int] = (12, 30)
    dangling_rate: float = 0.0
    invite_rate: float = 0.0
    n_invite_only: int = 0
    takedown_fraction: float = 0.0
    post_removal_fraction: float = 0.0
    companies: tuple[str, ...] = ()
    lexicon: tuple[str, ...] = ()
    languages: tuple[str, ...] = DEFAULT_LANGUAGES
    now: int = DEFAULT_NOW
    window_days: int = 7
    max_depth: int = 2

    def validate(self) -> None:
        rp = self.role_plan
        if min(self.n_channels, self.n_bots, self.n_seeds, self.n_stale_seeds, rp.n_terminal) < 0:
            raise InvalidSpec("counts must be non-negative")
        if not 0.0 <= self.benign_fraction <= 1.0:
            raise InvalidSpec("benign_fraction must lie in [0, 1]")
        for name in ("dangling_rate", "invite_rate", "takedown_fraction", "post_removal_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidSpec(f"{name} must lie in [0, 1]")
        special = len(rp.super_outdegrees) + rp.n_terminal + self.n_invite_only
        if special > self.n_channels:
            raise InvalidSpec("role plan needs more channels than available")
        linkers = self.n_channels - rp.n_terminal - self.n_invite_only
        if self.reach_depth is None:
            linkers -= len(rp.super_outdegrees)
        if self.n_seeds + self.n_stale_seeds > linkers:
            raise InvalidSpec("not enough linking channels for the requested seeds")
        if len(rp.super_outdegrees) > self.n_seeds and self.reach_depth is not None:
            raise InvalidSpec("super-channels are planted as seeds; raise n_seeds")
        if any(d < 1 for d in rp.super_outdegrees):
            raise InvalidSpec("super out-degrees must be >= 1")
        lo, hi = rp.regular_outdegree
        if lo < 1 or hi < lo:
            raise InvalidSpec("regular_outdegree must be a range with lower bound >= 1")
        blo, bhi = rp.bot_outdegree
        if blo < 0 or bhi < blo:
            raise InvalidSpec("bot_outdegree must be a non-negative range")
        plo, phi = self.posts_per_channel
        if plo < 10 or phi < plo:
            raise InvalidSpec("posts_per_channel lower bound must be >= 10")
        if self.reach_depth is not None and self.reach_depth < 1:
            raise InvalidSpec("reach_depth must be >= 1 or None")
        if self.reach_depth is not None and self.n_seeds == 0 and self.n_channels + self.n_bots:
            raise InvalidSpec("reach_depth needs at least one seed")
        for leaf, w in self.taxonomy_plan:
            if leaf not in T.CONTENT_PRIMARY or w < 0:
                raise InvalidSpec(f"bad taxonomy_plan entry {leaf!r}")
        if not self.languages:
            raise InvalidSpec("languages must be nonempty")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["role_plan"] = asdict(self.role_plan)
        return d


@dataclass
class Truth:
    """Planted ground truth, exported next to the platform state."""

    entities: list[dict]
    edges: list[dict]
    posts: dict[tuple[str, int], dict]
    meta: dict

    def entity(self, entity_id: str) -> dict:
        for e in self.entities:
            if e["id"] == entity_id:
                return e
        raise KeyError(entity_id)

    def verdict(self, channel_id: str, post_id: int) -> PostVerdict:
        p = self.posts[(channel_id, post_id)]
        return truth_verdict(channel_id, post_id, p["is_piracy"], p["leaves"])

    def ids_with_role(self, role: str) -> set[str]:
        return {e["id"] for e in self.entities if e["planted_role"] == role}

    def gated_seeds(self) -> set[str]:
        return {e["id"] for e in self.entities if e["seed"] and e["gated"]}

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {e["id"]: set() for e in self.entities}
        for ed in self.edges:
            if ed["dst"] is not None:
                adj[ed["src"]].add(ed["dst"])
        return adj

    def closure(self, max_depth: int | None = None) -> dict[str, int]:
        """Entity -> BFS depth from the gated seeds; bots are not expanded."""
        max_depth = self.meta["max_depth"] if max_depth is None else max_depth
        kinds = {e["id"]: e["kind"] for e in self.entities}
        adj = self.adjacency()
        depth = {s: 0 for s in self.gated_seeds()}
        q = deque(sorted(depth))
        while q:
            u = q.popleft()
            if depth[u] >= max_depth or kinds[u] == "bot":
                continue
            for v in sorted(adj[u]):
                if v not in depth:
                    depth[v] = depth[u] + 1
                    q.append(v)
        return depth

    def title_of(self, channel_id: str, post_id: int) -> str | None:
        return self.posts[(channel_id, post_id)].get("title_id")


@dataclass
class EcosystemState:
    spec: EcosystemSpec
    channels: dict[str, ChannelRecord]
    posts: dict[str, list[PostRecord]]  # oldest first
    truth: Truth
    takedowns: dict[str, int] = field(default_factory=dict)
    post_removals: dict[tuple[str, int], int] = field(default_factory=dict)

    @property
    def now(self) -> int:
        return self.spec.now

    def by_handle(self) -> dict[str, ChannelRecord]:
        return {c.handle.lower(): c for c in self.channels.values() if c.handle}

    def all_posts(self) -> list[PostRecord]:
        return [p for cid in sorted(self.posts) for p in self.posts[cid]]

    def bot_ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.channels.values() if c.is_bot)


# ------------------------------------------------------------------ helpers


def default_lexicon() -> tuple[str, ...]:
    from importlib import resources

    path = resources.files("antirip.data").joinpath("lexicon_example.txt")
    return tuple(read_terms(str(path)))


def title_pool(catalog: Catalog | None = None, companies: Iterable[str] = ()) -> list[T.Title]:
    """Catalog titles usable for planting: unambiguous names, optional company filter."""
    catalog = catalog or ingest_catalog(fixture_catalog_path())
    companies = set(companies)
    counts: dict[str, int] = {}
    for e in catalog.entries:
        counts[normalize_title(e.title)] = counts.get(normalize_title(e.title), 0) + 1
    pool = []
    for e in catalog.entries:
        if counts[normalize_title(e.title)] != 1:
            continue
        if companies and not companies & set(e.companies):
            continue
        pool.append(T.Title(e.title, e.year, e.id))
    if not pool:
        raise InvalidSpec("no usable titles for the requested companies")
    return pool


def _weighted(rng: random.Random, weights: Mapping[str, float]) -> str:
    keys = sorted(weights)
    return rng.choices(keys, weights=[weights[k] for k in keys])[0]


class _Handles:
    """Unique handle factory: seeds are synthesizable from the lexicon, others are not."""

    def __init__(self, rng: random.Random, lexicon: tuple[str, ...]):
        self.rng = rng
        self.words = [w for w in lexicon if w.isalpha()]
        self.taken: set[str] = set()
        self.synth = set(generate_candidates(lexicon).candidates)
        self.digits = [n for n in range(100, 1000) if not any(str(n) in t for t in lexicon)]

    def _claim(self, h: str) -> bool:
        if handle_ok(h) and h.lower() not in self.taken:
            self.taken.add(h.lower())
            return True
        return False

    def seed(self) -> str:
        for _ in range(1000):
            a, b = self.rng.sample(self.words, 2)
            h = self.rng.choice((f"{a}_{b}", f"{a}{b}"))
            if h in self.synth and self._claim(h):
                return h
        raise InvalidSpec("cannot synthesize enough distinct seed handles")

    def other(self, suffix: str = "") -> str:
        for _ in range(1000):
            a, b = self.rng.sample(self.words, 2)
            n = self.rng.choice(self.digits)
            h = f"{a}{b}_{n}{suffix}"
            if h not in self.synth and self._claim(h):
                return h
        raise InvalidSpec("cannot generate enough distinct handles")


# ------------------------------------------------------------------ graph


@dataclass
class _Node:
    idx: int
    id: str
    kind: str  # channel | bot
    role: str  # super | regular | terminal | invite_only | bot
    seed: bool = False
    stale: bool = False
    level: int | None = None
    out: list = field(default_factory=list)  # entity idx or dangling handle strings
    handle: str = ""


def _plan_graph(spec: EcosystemSpec, rng: random.Random) -> list[_Node]:
    rp = spec.role_plan
    order = list(range(spec.n_channels))
    rng.shuffle(order)
    nodes: list[_Node] = []
    cursor = 0

    def take(n: int, role: str, **kw) -> list[_Node]:
        nonlocal cursor
        out = []
        for _ in range(n):
            i = order[cursor]
            cursor += 1
            out.append(_Node(len(nodes) + len(out), f"c{i + 1:04d}", "channel", role, **kw))
        nodes.extend(out)
        return out

    supers = take(len(rp.super_outdegrees), "super", seed=spec.reach_depth is not None)
    seeds = supers + take(max(0, spec.n_seeds - len(supers)), "regular", seed=True)
    if spec.reach_depth is None:
        # random graphs: supers need not be seeds
        for s in supers:
            s.seed = False
        seeds = take(spec.n_seeds, "regular", seed=True)
    take(spec.n_stale_seeds, "regular", seed=True, stale=True)
    terminals = take(rp.n_terminal, "terminal")
    take(spec.n_invite_only, "invite_only")
    take(spec.n_channels - cursor, "regular")
    bots = [_Node(len(nodes) + j, f"b{j + 1:03d}", "bot", "bot") for j in range(spec.n_bots)]
    nodes.extend(bots)

    linkers = [n for n in nodes if n.role in ("super", "regular")]
    targets_all = [n.idx for n in nodes]
    channels_all = [n.idx for n in nodes if n.kind == "channel"]
    out: dict[int, set[int]] = {n.idx: set() for n in nodes}

    if spec.reach_depth is not None:
        R = spec.reach_depth
        for s in seeds:
            if not s.stale:
                s.level = 0
        if supers:
            for t in terminals:
                t.level = 1
        rest = [n for n in nodes if n.level is None]
        rest_linkers = [n for n in rest if n.role in ("super", "regular")]
        for n in rest_linkers:
            n.level = 1 if R == 1 else rng.choice((1, 2) if R >= 2 else (1,))
        for n in rest:
            if n.level is None:
                n.level = rng.randint(1, min(R, 2))
        if not any(n.level == 1 for n in rest_linkers):
            for n in rest:
                n.level = 1
        children: dict[int, int] = {n.idx: 0 for n in linkers}
        for n in nodes:
            if n.level in (None, 0):
                continue
            if n.role == "terminal" and supers:
                parent = supers[0]
            elif n.level == 1 and supers and children[supers[0].idx] < rp.super_outdegrees[0]:
                # keep regular seeds small so only planted supers stand out
                parent = supers[0]
            else:
                pool = [p for p in linkers if p.level == n.level - 1 and p.idx != n.idx]
                least = min(children[p.idx] for p in pool)
                parent = rng.choice([p for p in pool if children[p.idx] == least])
            out[parent.idx].add(n.idx)
            children[parent.idx] += 1

    for s, d in zip(supers, rp.super_outdegrees):
        for t in terminals:
            out[s.idx].add(t.idx)
        others = [i for i in targets_all if i != s.idx and i not in out[s.idx]]
        rng.shuffle(others)
        need = max(0, d - len(out[s.idx]))
        out[s.idx].update(others[:need])
    for n in linkers:
        if n.role == "super":
            continue
        want = rng.randint(*rp.regular_outdegree)
        others = [i for i in targets_all if i != n.idx and i not in out[n.idx]]
        rng.shuffle(others)
        out[n.idx].update(others[: max(0, want - len(out[n.idx]))])
    for b in bots:
        want = rng.randint(*rp.bot_outdegree)
        others = [i for i in channels_all if i not in out[b.idx]]
        rng.shuffle(others)
        out[b.idx].update(others[:want])

    for n in nodes:
        n.out = sorted(out[n.idx])
    # supers whose planned degree exceeds the population are padded with dead links
    for s, d in zip(supers, rp.super_outdegrees):
        pad = d - len(s.out)
        s.out += [None] * max(0, pad)
    for n in linkers:
        if n.role != "super" and spec.dangling_rate and rng.random() < spec.dangling_rate * len(n.out):
            n.out.append(None)
    return nodes


# ------------------------------------------------------------------ posts


def _chunks(items: list, max_posts: int = 6) -> list[list]:
    if len(items) < 4:
        return [[x] for x in items]
    k = min(math.ceil(len(items) / 3), max_posts)
    size = math.ceil(len(items) / k)
    return [items[i : i + size] for i in range(0, len(items), size)]


class _Builder:
    def __init__(self, spec: EcosystemSpec, rng: random.Random, nrng: np.random.Generator, titles):
        self.spec = spec
        self.rng = rng
        self.nrng = nrng
        self.titles = titles
        weights = dict(spec.taxonomy_plan) or dict(T.DEFAULT_CONTENT_WEIGHTS)
        self.weights = {k: v for k, v in weights.items() if v > 0}

    def views(self) -> int:
        return int(self.nrng.lognormal(mean=math.log(900), sigma=1.3))

    def title(self) -> T.Title:
        return self.rng.choice(self.titles)

    def piracy(self) -> bool:
        return self.rng.random() >= self.spec.benign_fraction

    def content(self, dominant: str) -> tuple[T.Fragment, T.Title, bool]:
        title = self.title()
        if not self.piracy():
            return T.benign(self.rng, title), title, False
        primary = dominant if self.rng.random() < 0.6 else _weighted(self.rng, self.weights)
        n_sec = self.rng.choice((0, 1, 1, 2))
        return T.content_post(self.rng, primary, title, n_sec), title, True

    def guaranteed_content(self, dominant: str) -> tuple[T.Fragment, T.Title, bool]:
        title = self.title()
        if self.spec.benign_fraction >= 1.0:
            return T.benign(self.rng, title), title, False
        return T.content_post(self.rng, dominant, title, self.rng.choice((0, 1))), title, True

    def link_posts(self, targets: list[InternalLink]) -> list[tuple[T.Fragment, T.Title, bool]]:
        out = []
        for chunk in _chunks(targets):
            title = self.title()
            if self.spec.benign_fraction >= 1.0:
                frags = [T.benign_referral_post(self.rng, [t], title) for t in chunk]
                out += [(f, title, False) for f in frags]
                continue
            if len(chunk) >= 3:
                out.append((T.directory_post(self.rng, chunk, title), title, True))
                continue
            out += [self._single_link(t) for t in chunk]
        return out

    def _single_link(self, t: InternalLink) -> tuple[T.Fragment, T.Title, bool]:
        title = self.title()
        if t.kind == "bot":
            return T.bot_routing_post(self.rng, [t], title), title, True
        if not self.piracy():
            return T.benign_referral_post(self.rng, [t], title), title, False
        tpl = self.rng.choice((T.backup_post, T.referral_post, T.routing_post, T.forced_join_post))
        return tpl(self.rng, [t], title), title, True

    def bot_posts(self, targets: list[InternalLink], categories: list[str]):
        out = []
        for i in range(0, len(targets), 2):
            title = self.title()
            pair = targets[i : i + 2]
            if self.spec.benign_fraction >= 1.0:
                out += [(T.benign_referral_post(self.rng, [t], title), title, False) for t in pair]
            else:
                out.append((T.bot_channel_promotion(self.rng, pair, title), title, True))
        return out

    def bot_content(self, categories: list[str]):
        title = self.title()
        if not self.piracy():
            return T.benign(self.rng, title), title, False
        cat = self.rng.choice(categories)
        return T.BOT_TEMPLATES[cat](self.rng, [], title), title, True


def _mention_title(frag: T.Fragment, title: T.Title) -> bool:
    return title.name in frag.text


def generate_ecosystem(spec: EcosystemSpec, catalog: Catalog | None = None) -> EcosystemState:
    spec.validate()
    rng = random.Random(f"ecosystem:{spec.seed}")
    nrng = np.random.default_rng(spec.seed)
    lexicon = spec.lexicon or default_lexicon()
    titles = title_pool(catalog, spec.companies)
    nodes = _plan_graph(spec, rng)
    handles = _Handles(rng, tuple(lexicon))
    for n in nodes:
        if n.kind == "bot":
            n.handle = handles.other("bot")
        elif n.seed:
            n.handle = handles.seed()
        else:
            n.handle = handles.other()
    dangling_handles: dict[tuple[int, int], str] = {}
    for n in nodes:
        for j, t in enumerate(n.out):
            if t is None:
                dangling_handles[(n.idx, j)] = handles.other()

    b = _Builder(spec, rng, nrng, titles)
    now = spec.now
    channels: dict[str, ChannelRecord] = {}
    posts: dict[str, list[PostRecord]] = {}
    truth_posts: dict[tuple[str, int], dict] = {}
    entities: list[dict] = []
    edges: list[dict] = []
    words = [w for w in lexicon if w.isalpha()]

    for n in nodes:
        lang = rng.choice(spec.languages)
        if n.seed and not n.stale:
            age = rng.randint(1 * DAY, spec.window_days * DAY - 3600)
        elif n.stale:
            age = rng.randint((spec.window_days + 2) * DAY, 90 * DAY)
        else:
            age = rng.randint((spec.window_days + 1) * DAY, 400 * DAY)
        links: list[InternalLink] = []
        for j, t in enumerate(n.out):
            if t is None:
                h = dangling_handles[(n.idx, j)]
                links.append(InternalLink("channel", h))
                edges.append({"src": n.id, "dst": None, "dst_handle": h, "dangling": True})
            else:
                dst = nodes[t]
                links.append(InternalLink(dst.kind, dst.handle))
                edges.append({"src": n.id, "dst": dst.id, "dst_handle": dst.handle, "dangling": False})
        newest: list[tuple[T.Fragment, T.Title, bool]] = []
        categories: list[str] = []
        if n.kind == "bot":
            categories = sorted(rng.sample(sorted(T.BOT_TEMPLATES), rng.randint(1, 3)))
            non_promo = [c for c in categories if c != "channel_promotion"] or ["content_delivery"]
            if links and "channel_promotion" not in categories:
                categories = sorted(categories + ["channel_promotion"])
            newest += b.bot_posts(links, categories)
            newest.append(b.bot_content(non_promo))
            dominant = None
        else:
            dominant = _weighted(rng, b.weights)
            newest += b.link_posts(links)
            newest.append(b.guaranteed_content(dominant))
            if n.role == "invite_only" or (spec.invite_rate and rng.random() < spec.invite_rate):
                codes = [T._code(rng, 16) for _ in range(rng.randint(1, 2))]
                newest.append((T.invite_post(rng, codes), b.title(), False))
        rng.shuffle(newest)
        total = rng.randint(*spec.posts_per_channel)
        older: list[tuple[T.Fragment, T.Title, bool]] = []
        for _ in range(max(0, total - len(newest))):
            if n.kind == "bot":
                older.append(b.bot_content(non_promo))
            else:
                older.append(b.content(dominant))
        feed = older + newest
        # timestamps: first post at now - age, newest within the last hour or so
        t0 = now - age
        span = max(len(feed), age - 3600)
        offsets = sorted(rng.sample(range(1, span), len(feed) - 1)) if len(feed) > 1 else []
        times = [t0] + [t0 + o for o in offsets]
        channel_posts = []
        for pid, ((frag, title, piracy), ts) in enumerate(zip(feed, times), start=1):
            post = PostRecord(
                channel_id=n.id,
                post_id=pid,
                time=ts,
                text=frag.text,
                view_count=b.views(),
                internal_links=tuple(frag.internal),
                external_links=tuple(frag.external),
                attachment=frag.attachment,
                language_tag=lang,
            )
            channel_posts.append(post)
            leaves = T.ordered_leaves(frag.leaves) if piracy else []
            truth_posts[(n.id, pid)] = {
                "is_piracy": bool(piracy and leaves),
                "leaves": leaves,
                "title_id": title.entry_id if _mention_title(frag, title) else None,
            }
        posts[n.id] = channel_posts
        title = " ".join(w.title() for w in rng.sample(words, 2))
        channels[n.id] = ChannelRecord(
            id=n.id,
            handle=n.handle,
            title=title + (" Bot" if n.kind == "bot" else ""),
            subscriber_count=int(nrng.lognormal(mean=math.log(521), sigma=1.5)),
            earliest_post_time=t0,
            is_bot=n.kind == "bot",
        )
        entities.append(
            {
                "id": n.id,
                "handle": n.handle,
                "kind": n.kind,
                "planted_role": n.role,
                "seed": n.seed,
                "gated": n.seed and not n.stale,
                "language": lang,
                "categories": categories,
                "planned_outdegree": len(n.out),
            }
        )

    truth = Truth(entities, edges, truth_posts, {"now": now, "max_depth": spec.max_depth})
    state = EcosystemState(spec, channels, posts, truth)
    _script_enforcement(state, rng)
    truth.meta.update(
        {
            "seed": spec.seed,
            "spec": spec.to_dict(),
            "takedowns": dict(sorted(state.takedowns.items())),
            "post_removals": [[c, p, t] for (c, p), t in sorted(state.post_removals.items())],
        }
    )
    return state


def _script_enforcement(state: EcosystemState, rng: random.Random) -> None:
    """Plan takedowns over the entities the pipeline is expected to report."""
    spec = state.spec
    reach = state.truth.closure(spec.max_depth)
    reportable = sorted(
        cid
        for cid in reach
        if any(state.truth.posts[(cid, p.post_id)]["is_piracy"] for p in state.posts[cid])
    )
    k = round(spec.takedown_fraction * len(reportable))
    gone = sorted(rng.sample(reportable, k))
    for cid in gone:
        state.takedowns[cid] = spec.now + rng.randint(1, 13) * DAY + rng.randint(0, DAY // 2)
    if spec.post_removal_fraction <= 0:
        return
    for cid in reportable:
        if cid in state.takedowns:
            continue
        pirate = [p.post_id for p in state.posts[cid] if state.truth.posts[(cid, p.post_id)]["is_piracy"]]
        m = round(spec.post_removal_fraction * len(pirate))
        for pid in sorted(rng.sample(pirate, m)):
            state.post_removals[(cid, pid)] = spec.now + rng.randint(1, 13) * DAY


# ------------------------------------------------------------------ corpora


def generate_post_corpus(
    n: int, benign_fraction: float = 0.5, seed: int = 0, catalog: Catalog | None = None
) -> tuple[list[PostRecord], list[PostVerdict], frozenset[str]]:
    """A flat, shuffled corpus of template posts with aligned truth verdicts.

    Returns ``(posts, truth, bot_ids)``; bot-authored posts come from ids in
    ``bot_ids`` and carry bot category labels.
    """
    rng = random.Random(f"corpus:{seed}")
    nrng = np.random.default_rng(seed)
    titles = title_pool(catalog)
    handles = _Handles(rng, default_lexicon())
    chan_handles = [handles.other() for _ in range(20)]
    bot_handles = [handles.other("bot") for _ in range(5)]
    bot_ids = frozenset(f"b{i:03d}" for i in range(1, 6))
    n_benign = round(n * benign_fraction)
    specs = [False] * n_benign + [True] * (n - n_benign)
    rng.shuffle(specs)
    weights = dict(T.DEFAULT_CONTENT_WEIGHTS)
    posts, truth = [], []
    for i, piracy in enumerate(specs, start=1):
        title = rng.choice(titles)
        channel = f"c{rng.randint(1, 20):04d}"
        r = rng.random()
        if not piracy:
            if r < 0.15:
                t = InternalLink("channel", rng.choice(chan_handles))
                frag = T.benign_referral_post(rng, [t], title)
            else:
                frag = T.benign(rng, title)
        elif r < 0.65:
            frag = T.content_post(rng, _weighted(rng, weights), title, rng.choice((0, 1, 1, 2)))
        elif r < 0.85:
            k = rng.choice((1, 1, 1, 2, 4))
            pool = rng.choice((chan_handles, chan_handles, chan_handles + bot_handles))
            targets = [
                InternalLink("bot" if h.endswith("bot") else "channel", h) for h in rng.sample(pool, k)
            ]
            if len(targets) >= 3:
                frag = T.directory_post(rng, targets, title)
            elif targets[0].kind == "bot":
                frag = T.bot_routing_post(rng, targets, title)
            else:
                tpl = rng.choice((T.backup_post, T.referral_post, T.routing_post, T.forced_join_post))
                frag = tpl(rng, [t for t in targets if t.kind == "channel"] or targets, title)
        else:
            channel = rng.choice(sorted(bot_ids))
            cat = rng.choice(sorted(T.BOT_TEMPLATES))
            targets = [InternalLink("channel", h) for h in rng.sample(chan_handles, 2)]
            frag = T.BOT_TEMPLATES[cat](rng, targets, title)
        post = PostRecord(
            channel_id=channel,
            post_id=i,
            time=DEFAULT_NOW - (n - i) * 60,
            text=frag.text,
            view_count=int(nrng.lognormal(mean=math.log(900), sigma=1.3)),
            internal_links=tuple(frag.internal),
            attachment=frag.attachment,
            language_tag=rng.choice(DEFAULT_LANGUAGES),
        )
        posts.append(post)
        leaves = T.ordered_leaves(frag.leaves) if piracy else []
        truth.append(truth_verdict(channel, i, bool(leaves), leaves))
    return posts, truth, bot_ids


def generate_title_corpus(
    n: int, seed: int = 0, catalog: Catalog | None = None
) -> tuple[list[PostRecord], list[str]]:
    """Posts each embedding exactly one catalog title verbatim; returns (posts, title ids)."""
    rng = random.Random(f"titles:{seed}")
    titles = title_pool(catalog)
    posts, ids = [], []
    for i in range(1, n + 1):
        title = rng.choice(titles)
        r = rng.random()
        if r < 0.5:
            frag = T.content_post(rng, rng.choice(("direct_download", "cloud_storage", "streaming_magnet")), title, 1)
        elif r < 0.8:
            frag = T.benign(rng, title)
            if title.name not in frag.text:
                frag = T.Fragment(f"{title.name} is trending this week", ())
        else:
            frag = T.bot_content_delivery(rng, [], title)
        posts.append(PostRecord("c0001", i, DEFAULT_NOW - i, frag.text, 0, attachment=frag.attachment))
        ids.append(title.entry_id)
    return posts, ids


# ------------------------------------------------------------------ pricing fixtures

SERVICES = {
    "Netflix": 6.99,
    "Prime Video": 8.99,
    "Disney+": 7.99,
    "Hulu": 7.99,
    "Crunchyroll": 7.99,
}
CURRENCY_OF = {
    "US": "USD",
    "IR": "IRR",
    "IN": "INR",
    "MX": "MXN",
    "SA": "SAR",
    "MM": "MMK",
    "CN": "CNY",
    "KR": "KRW",
    "GB": "GBP",
    "ZZ": "USD",
}
FX_USD_PER_UNIT = {
    "USD": 1.0,
    "INR": 0.01167,
    "MXN": 0.0556,
    "SAR": 0.2667,
    "MMK": 0.000476,
    "CNY": 0.1389,
    "KRW": 0.000694,
    "GBP": 1.2658,
    "EUR": 1.0870,
}


def make_fx(omit: Iterable[str] = ("IRR",)) -> dict:
    """Fixture exchange table; IRR is left out by default to exercise the unpriced path."""
    omit = set(omit)
    rates = {k: v for k, v in FX_USD_PER_UNIT.items() if k not in omit}
    return {"as_of": "2026-01-01", "rates": rates}


def make_pricing(title_ids: Iterable[str], regions: Iterable[str], seed: int = 0) -> list[dict]:
    """Static pricing oracle rows: roughly half the titles stream, the rest rent or sell."""
    rng = random.Random(f"pricing:{seed}")
    rows = []
    fx = FX_USD_PER_UNIT
    for tid in sorted(set(title_ids)):
        mode = rng.random()
        service = rng.choice(sorted(SERVICES))
        for region in sorted(set(regions)):
            cur = CURRENCY_OF.get(region, "USD")
            rate = fx.get(cur, 1.0 / 42000.0)  # IRR-ish magnitude when absent
            row: dict = {"title_id": tid, "region": region}
            if mode < 0.5:
                usd = SERVICES[service] * rng.choice((0.6, 0.8, 1.0))
                row["streaming"] = [service, round(usd / rate, 2), cur]
            elif mode < 0.8:
                row["rental"] = [round(rng.choice((2.99, 3.99, 5.99)) / rate, 2), cur]
                if rng.random() < 0.5:
                    row["physical"] = [round(rng.choice((9.99, 14.99)) / rate, 2), cur]
            else:
                row["physical"] = [round(rng.choice((9.99, 14.99, 19.99)) / rate, 2), cur]
            rows.append(row)
    return rows
