"""JSON Lines serialization of simulator state: channels, posts, truth."""

from __future__ import annotations

import json
from pathlib import Path

from ..platform import ChannelRecord, PostRecord
from .ecosystem import EcosystemSpec, EcosystemState, RolePlan, Truth


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _write_jsonl(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(_dump(row) + "\n")


def _read_jsonl(path: Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def save_ecosystem(state: EcosystemState, directory: str | Path) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    _write_jsonl(d / "channels.jsonl", (state.channels[k].to_dict() for k in sorted(state.channels)))
    _write_jsonl(d / "posts.jsonl", (p.to_dict() for p in state.all_posts()))
    truth = state.truth
    rows = [{"type": "meta", **truth.meta}]
    rows += [{"type": "entity", **e} for e in sorted(truth.entities, key=lambda e: e["id"])]
    rows += [
        {"type": "edge", **e}
        for e in sorted(truth.edges, key=lambda e: (e["src"], e["dst_handle"]))
    ]
    rows += [
        {"type": "post", "channel_id": c, "post_id": p, **v}
        for (c, p), v in sorted(truth.posts.items())
    ]
    _write_jsonl(d / "truth.jsonl", rows)
    return d


def spec_from_dict(d: dict) -> EcosystemSpec:
    d = dict(d)
    rp = d.pop("role_plan", {}) or {}
    tuples = ("posts_per_channel", "companies", "lexicon", "languages")
    for k in tuples:
        if k in d:
            d[k] = tuple(d[k])
    d["taxonomy_plan"] = tuple(tuple(x) for x in d.get("taxonomy_plan", ()))
    role_plan = RolePlan(
        super_outdegrees=tuple(rp.get("super_outdegrees", ())),
        n_terminal=rp.get("n_terminal", 0),
        regular_outdegree=tuple(rp.get("regular_outdegree", (1, 3))),
        bot_outdegree=tuple(rp.get("bot_outdegree", (0, 2))),
    )
    return EcosystemSpec(role_plan=role_plan, **d)


def load_ecosystem(directory: str | Path) -> EcosystemState:
    d = Path(directory)
    channels = {}
    for row in _read_jsonl(d / "channels.jsonl"):
        rec = ChannelRecord.from_dict(row)
        channels[rec.id] = rec
    posts: dict[str, list[PostRecord]] = {cid: [] for cid in channels}
    for row in _read_jsonl(d / "posts.jsonl"):
        p = PostRecord.from_dict(row)
        posts.setdefault(p.channel_id, []).append(p)
    for lst in posts.values():
        lst.sort(key=lambda p: p.post_id)
    meta: dict = {}
    entities, edges, tposts = [], [], {}
    for row in _read_jsonl(d / "truth.jsonl"):
        kind = row.pop("type")
        if kind == "meta":
            meta = row
        elif kind == "entity":
            entities.append(row)
        elif kind == "edge":
            edges.append(row)
        elif kind == "post":
            tposts[(row.pop("channel_id"), row.pop("post_id"))] = row
    spec = spec_from_dict(meta["spec"])
    state = EcosystemState(spec, channels, posts, Truth(entities, edges, tposts, meta))
    state.takedowns = {k: int(v) for k, v in meta.get("takedowns", {}).items()}
    state.post_removals = {(c, int(p)): int(t) for c, p, t in meta.get("post_removals", [])}
    return state
