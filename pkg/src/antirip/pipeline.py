"""Stage orchestration with persisted, restartable artifacts.

Every stage reads its inputs from files and writes its outputs to files in
the run directory. ``run_state.json`` records, per stage, the sha256 of the
inputs it consumed and the outputs it produced; a stage whose inputs and
outputs are unchanged is skipped, which makes re-runs no-ops. Every
artifact starts with a header naming the run, the stage and the config hash.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from . import crawler, graph as graphmod, loss as lossmod, reports as rep
from .adapters import make_classifier
from .catalog import Catalog, TitleMatch, fixture_catalog_path, ingest_catalog
from .errors import MissingInput, StageFailure, TransportExhausted
from .handles import generate_candidates, read_terms
from .platform import Clock, FixedClock, PlatformClient, PostRecord, RetryPolicy
from .rules import RuleClassifier, classify_post
from .taxonomy import PostVerdict

log = logging.getLogger(__name__)

STAGES = ("synth", "discover", "hydrate", "classify", "match", "graph", "estimate", "report", "track")

# artifact name -> default file name inside the run directory
ARTIFACTS = {
    "candidates": "candidates.txt",
    "discovery": "discovery.jsonl",
    "posts": "posts.jsonl",
    "verdicts": "verdicts.jsonl",
    "matches": "matches.jsonl",
    "edges": "edges.csv",
    "roles": "roles.csv",
    "dot": "graph.dot",
    "graph_summary": "graph_summary.json",
    "loss": "loss_report.json",
    "reports": "reports.jsonl",
    "tracked": "tracked.jsonl",
    "tracking": "tracking.jsonl",
}


# ------------------------------------------------------------------ config


@dataclass(frozen=True)
class PipelineConfig:
    platform: str | None = None  # simulator state directory
    out_dir: str = "."
    lexicon: str | None = None
    handles: str | None = None
    catalog: str | None = None
    pricing: str | None = None
    fx: str | None = None
    rights_holders: str | None = None
    language_map: str | None = None
    window_days: int = 7
    probe_posts: int = 10
    hydrate_posts: int = 500
    max_depth: int = 2
    higher_order: int = 0
    seed: int = 0
    classifier: str = "rules"
    classifier_timeout: float = 30.0
    report_mode: str = "batched"
    url_only: bool = False
    parallelism: int = 4
    mentions: bool = True
    match_threshold: float = 0.8
    tracking_window_days: int = 14
    transport_retries: int = 3
    now: int | None = None
    run_id: str | None = None

    PATH_KEYS = ("platform", "lexicon", "handles", "catalog", "pricing", "fx", "rights_holders", "language_map")
    # excluded from the config hash: where outputs go and when the clock reads
    UNHASHED = ("out_dir", "now", "run_id")

    def validate(self) -> None:
        for key in self.PATH_KEYS:
            p = getattr(self, key)
            if p is not None and not Path(p).exists():
                raise MissingInput(f"{key}: {p} does not exist")
        if self.max_depth < 0 or self.probe_posts < 1 or self.hydrate_posts < 1:
            raise ValueError("max_depth >= 0, probe_posts >= 1 and hydrate_posts >= 1 required")
        if self.report_mode not in rep.MODES:
            raise ValueError(f"report_mode must be one of {rep.MODES}")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    def config_hash(self) -> str:
        """Hash of every setting except output location and clock; input files by content."""
        d: dict[str, Any] = {}
        for f in dataclasses.fields(self):
            if f.name in self.UNHASHED:
                continue
            v = getattr(self, f.name)
            if f.name in self.PATH_KEYS and v is not None:
                v = "sha256:" + _hash_path(Path(v))
            d[f.name] = v
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def effective_run_id(self) -> str:
        return self.run_id or "run-" + self.config_hash()[:12]


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def _coerce(key: str, raw: Any) -> Any:
    if key not in _FIELD_TYPES:
        raise KeyError(f"unknown config key {key!r}")
    if not isinstance(raw, str):
        return raw
    t = _FIELD_TYPES[key]
    raw = raw.strip()
    if "None" in t and raw.lower() in ("", "none", "null"):
        return None
    if t.startswith("int"):
        return int(raw)
    if t.startswith("float"):
        return float(raw)
    if t.startswith("bool"):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    return raw


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment line."""
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Read a config file (paths relative to it), then apply overrides."""
    values: dict[str, Any] = {}
    if path is not None:
        base = Path(path).resolve().parent
        for k, v in parse_config_text(Path(path).read_text(encoding="utf-8")).items():
            v = _coerce(k, v)
            if (k in PipelineConfig.PATH_KEYS or k == "out_dir") and v is not None and not Path(v).is_absolute():
                v = str(base / v)
            values[k] = v
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k.replace("-", "_")] = _coerce(k.replace("-", "_"), v)
    cfg = PipelineConfig(**values)
    cfg.validate()
    return cfg


# ------------------------------------------------------------------ files


def _hash_path(p: Path) -> str:
    h = hashlib.sha256()
    if p.is_dir():
        for f in sorted(x for x in p.rglob("*") if x.is_file()):
            h.update(str(f.relative_to(p)).encode())
            h.update(f.read_bytes())
    else:
        h.update(p.read_bytes())
    return h.hexdigest()


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        raise MissingInput(f"missing input {path}")
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                if "_header" not in d:
                    rows.append(d)
    return rows


@dataclass
class RunState:
    run_id: str
    config_hash: str
    stages: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def load(cls, path: Path, run_id: str, config_hash: str) -> "RunState":
        if path.exists():
            d = json.loads(path.read_text(encoding="utf-8"))
            return cls(d["run_id"], d["config_hash"], d.get("stages", {}))
        return cls(run_id, config_hash)

    def save(self, path: Path) -> None:
        body = {"run_id": self.run_id, "config_hash": self.config_hash, "stages": self.stages}
        path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @property
    def cursor(self) -> str | None:
        done = [s for s in STAGES if s in self.stages]
        return done[-1] if done else None


# ------------------------------------------------------------------ context


@dataclass
class Context:
    config: PipelineConfig
    clock: Clock
    client: PlatformClient | None = None
    paths: dict[str, str] = field(default_factory=dict)
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    _catalog: Catalog | None = None

    def __post_init__(self):
        self.out = Path(self.config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.config_hash = self.config.config_hash()
        self.run_id = self.config.effective_run_id()
        self.retry = dataclasses.replace(self.retry, transport_retries=self.config.transport_retries)

    def path(self, name: str) -> Path:
        if name in self.paths:
            return Path(self.paths[name])
        return self.out / ARTIFACTS[name]

    def header(self, stage: str) -> dict:
        return {"run_id": self.run_id, "stage": stage, "config_hash": self.config_hash}

    def header_comment(self, stage: str) -> str:
        return "# " + " ".join(f"{k}={v}" for k, v in self.header(stage).items()) + "\n"

    def write_jsonl(self, name: str, stage: str, rows: Iterable[dict]) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_dumps({"_header": self.header(stage)}) + "\n")
            for r in rows:
                fh.write(_dumps(r) + "\n")
        return p

    def write_json(self, name: str, stage: str, body: dict) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps({"_header": self.header(stage), **body}, indent=2, sort_keys=True, ensure_ascii=False)
        p.write_text(text + "\n", encoding="utf-8")
        return p

    def write_text(self, name_or_path: str | Path, stage: str, text: str, comment: str = "#") -> Path:
        p = self.path(name_or_path) if isinstance(name_or_path, str) else name_or_path
        p.parent.mkdir(parents=True, exist_ok=True)
        head = self.header_comment(stage).replace("#", comment, 1)
        p.write_text(head + text, encoding="utf-8", newline="\n")
        return p

    def need_client(self) -> PlatformClient:
        if self.client is None:
            raise MissingInput("no platform configured; set platform = <simulator dir>")
        return self.client

    def catalog(self) -> Catalog:
        if self._catalog is None:
            src = self.config.catalog or fixture_catalog_path()
            self._catalog = ingest_catalog(src, threshold=self.config.match_threshold)
        return self._catalog

    # shared loaders
    def discovery(self) -> tuple[list[crawler.Discovered], dict]:
        rows = read_jsonl(self.path("discovery"))
        ents = [crawler.Discovered.from_dict(r) for r in rows if r.get("type") == "entity"]
        summary = next((r for r in rows if r.get("type") == "summary"), {})
        return ents, summary

    def posts(self) -> list[PostRecord]:
        return [PostRecord.from_dict(r) for r in read_jsonl(self.path("posts"))]

    def verdicts(self) -> list[PostVerdict]:
        return [PostVerdict.from_dict(r) for r in read_jsonl(self.path("verdicts"))]

    def matches(self) -> list[TitleMatch]:
        cat = self.catalog()
        return [TitleMatch.from_dict(r, cat) for r in read_jsonl(self.path("matches"))]


# ------------------------------------------------------------------ stages


def stage_synth(ctx: Context) -> list[Path]:
    cfg = ctx.config
    if cfg.lexicon is None:
        from importlib import resources

        lexicon = read_terms(str(resources.files("antirip.data").joinpath("lexicon_example.txt")))
    else:
        lexicon = read_terms(cfg.lexicon)
    handles = read_terms(cfg.handles) if cfg.handles else []
    cands = generate_candidates(lexicon, handles, cfg.higher_order, cfg.seed)
    log.info("synthesized %d candidate handles", len(cands))
    return [ctx.write_text("candidates", "synth", "".join(c + "\n" for c in cands.candidates))]


def stage_discover(ctx: Context) -> list[Path]:
    cfg = ctx.config
    p = ctx.path("candidates")
    if not p.exists():
        raise MissingInput(f"missing input {p}")
    cands = read_terms(p)
    client = ctx.need_client()
    found = crawler.probe_detailed(client, cands, ctx.retry, cfg.parallelism)
    now = ctx.clock.now()
    seeds = [r for r in found.found if crawler.recency_gate(r, now, cfg.window_days)]
    result = crawler.expand(client, seeds, cfg.probe_posts, cfg.max_depth, ctx.retry, cfg.parallelism, cfg.mentions)
    rows = [{"type": "entity", **e.to_dict()} for e in result.entities]
    rows.append(
        {
            "type": "summary",
            "candidates": len(cands),
            "resolved": len(found.found),
            "unresolved": found.unresolved,
            "rejected": found.rejected,
            "gated_seeds": len(seeds),
            "channels": len(result.channels),
            "bots": len(result.bots),
            "dead_links": result.dead_links,
            "dead_handles": result.dead_handles,
            "invites": [list(x) for x in result.invites],
        }
    )
    return [ctx.write_jsonl("discovery", "discover", rows)]


def stage_hydrate(ctx: Context) -> list[Path]:
    from .platform import fetch_posts
    from .errors import ChannelGone

    ents, _ = ctx.discovery()
    client = ctx.need_client()

    def pull(e: crawler.Discovered) -> list[PostRecord]:
        try:
            return fetch_posts(client, e.record.id, ctx.config.hydrate_posts, ctx.retry)
        except ChannelGone:
            log.info("%s vanished before hydration", e.record.id)
            return []

    feeds = crawler._pmap(pull, ents, ctx.config.parallelism)
    posts = sorted((p for f in feeds for p in f), key=lambda p: p.key)
    return [ctx.write_jsonl("posts", "hydrate", (p.to_dict() for p in posts))]


def _classifier(ctx: Context, bot_ids: frozenset[str]):
    cat = ctx.catalog()
    rules = RuleClassifier(
        bot_ids=bot_ids,
        mentions=ctx.config.mentions,
        title_detector=lambda text: bool(cat.match(text)),
    )
    return make_classifier(ctx.config.classifier, rules, ctx.config.classifier_timeout)


def stage_classify(ctx: Context) -> list[Path]:
    ents, _ = ctx.discovery()
    bot_ids = frozenset(e.record.id for e in ents if e.record.is_bot)
    posts = ctx.posts()
    adapter = _classifier(ctx, bot_ids)
    by_entity: dict[str, list[PostRecord]] = {}
    for p in posts:
        by_entity.setdefault(p.channel_id, []).append(p)

    def run(cid: str) -> list[PostVerdict]:
        feed = sorted(by_entity[cid], key=lambda p: p.post_id, reverse=True)
        head = [classify_post(adapter, p) for p in feed[: ctx.config.probe_posts]]
        if not any(v.is_piracy for v in head):
            return head
        return head + [classify_post(adapter, p) for p in feed[ctx.config.probe_posts :]]

    try:
        results = crawler._pmap(run, sorted(by_entity), ctx.config.parallelism)
    finally:
        close = getattr(adapter, "close", None)
        if close:
            close()
    verdicts = sorted((v for r in results for v in r), key=lambda v: v.key)
    return [ctx.write_jsonl("verdicts", "classify", (v.to_dict() for v in verdicts))]


def stage_match(ctx: Context) -> list[Path]:
    flagged = {v.key for v in ctx.verdicts() if v.is_piracy}
    cat = ctx.catalog()
    rows = []
    for p in ctx.posts():
        if p.key in flagged:
            rows += [m.to_dict() for m in cat.match(p)]
    return [ctx.write_jsonl("matches", "match", rows)]


def stage_graph(ctx: Context) -> list[Path]:
    ents, _ = ctx.discovery()
    g = graphmod.build([e.record for e in ents], ctx.posts(), mentions=ctx.config.mentions)
    th = graphmod.compute_thresholds(g)
    roles = graphmod.classify_roles(g, th)
    return [
        ctx.write_text("edges", "graph", graphmod.edges_csv(g)),
        ctx.write_text("roles", "graph", graphmod.roles_csv(g, roles)),
        ctx.write_text("dot", "graph", graphmod.to_dot(g, roles), comment="//"),
        ctx.write_json("graph_summary", "graph", graphmod.summary(g, roles, th)),
    ]


def stage_estimate(ctx: Context) -> list[Path]:
    cfg = ctx.config
    if cfg.pricing is None or cfg.fx is None:
        raise MissingInput("estimate needs pricing and fx inputs")
    pricing = lossmod.PricingTable.load(cfg.pricing)
    fx = lossmod.ExchangeTable.load(cfg.fx)
    lang = lossmod.load_language_map(cfg.language_map)
    posts = {p.key: p for p in ctx.posts()}
    views, skipped = lossmod.matched_views(ctx.matches(), posts, lang)
    est = lossmod.estimate(views, pricing, fx)
    missing = sorted({u["currency"] for u in est.unpriced if u["reason"] == "missing_fx"})
    if missing:
        log.warning("%d loss groups unpriced for lack of exchange rates: %s",
                    sum(u["reason"] == "missing_fx" for u in est.unpriced), ", ".join(missing))
    return [ctx.write_json("loss", "estimate", lossmod.loss_report(est, fx, ctx.catalog(), skipped))]


def load_rights_holders(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    return parse_config_text_raw(Path(path).read_text(encoding="utf-8"))


def parse_config_text_raw(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#") and "=" in line:
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def stage_report(ctx: Context) -> list[Path]:
    cfg = ctx.config
    ents, _ = ctx.discovery()
    channels = {e.record.id: e.record for e in ents}
    posts = {p.key: p for p in ctx.posts()}
    now = ctx.clock.now()
    reports = rep.build_reports(
        ctx.verdicts(),
        ctx.matches(),
        load_rights_holders(cfg.rights_holders),
        cfg.report_mode,
        channels,
        posts,
        created_at=now,
        url_only=cfg.url_only,
    )
    written = rep.write_outbox(reports, ctx.out / "outbox", ctx.header("report"))
    for key in sorted({it.key for r in reports for it in r.items}):
        shot = rep.render_screenshot(channels[key[0]], posts[key])
        written.append(ctx.write_text(ctx.out / rep.screenshot_path(*key), "report", shot))
    index = [
        {
            "report_id": r.report_id,
            "recipient": r.recipient,
            "recipient_kind": r.recipient_kind,
            "mode": r.mode,
            "items": len(r.items),
            "channels": [c.id for c, _ in r.channels],
            "path": f"outbox/{rep.recipient_slug(r.recipient)}/{r.report_id}.json",
        }
        for r in reports
    ]
    written.append(ctx.write_jsonl("reports", "report", index))
    records = rep.tracking_records(reports, now, cfg.tracking_window_days)
    written.append(ctx.write_jsonl("tracked", "report", (rep.record_to_dict(r) for r in records)))
    return written


def load_tracking(ctx: Context) -> list[rep.TrackingRecord]:
    records = {d["entity_id"]: rep.record_from_dict(d) for d in read_jsonl(ctx.path("tracked"))}
    log_path = ctx.path("tracking")
    if log_path.exists():
        for d in read_jsonl(log_path):
            r = records.get(d["entity_id"])
            if r is not None:
                records[r.entity_id] = r.with_check(rep.Check(**d["check"]))
    return [records[k] for k in sorted(records)]


def stage_track(ctx: Context) -> list[Path]:
    now = ctx.clock.now()
    before = load_tracking(ctx)
    after = rep.track(ctx.need_client(), before, now, ctx.retry)
    log_path = ctx.path("tracking")
    fresh = not log_path.exists()
    with open(log_path, "a", encoding="utf-8", newline="\n") as fh:
        if fresh:
            fh.write(_dumps({"_header": ctx.header("track")}) + "\n")
        for b, a in zip(before, after):
            for c in a.checks[len(b.checks) :]:
                fh.write(_dumps({"entity_id": a.entity_id, "check": c.as_dict()}) + "\n")
    summary = rep.outcome_summary(after)
    out = ctx.out / f"outcome-{now}.json"
    ctx.paths.setdefault(f"outcome-{now}", str(out))
    text = json.dumps({"_header": ctx.header("track"), "time": now, **summary}, indent=2, sort_keys=True)
    out.write_text(text + "\n", encoding="utf-8")
    return [out]


STAGE_FUNCS: dict[str, Callable[[Context], list[Path]]] = {
    "synth": stage_synth,
    "discover": stage_discover,
    "hydrate": stage_hydrate,
    "classify": stage_classify,
    "match": stage_match,
    "graph": stage_graph,
    "estimate": stage_estimate,
    "report": stage_report,
    "track": stage_track,
}

# inputs each stage reads (artifact names); used for cache validation
STAGE_INPUTS = {
    "synth": (),
    "discover": ("candidates",),
    "hydrate": ("discovery",),
    "classify": ("discovery", "posts"),
    "match": ("verdicts", "posts"),
    "graph": ("discovery", "posts"),
    "estimate": ("matches", "posts"),
    "report": ("discovery", "posts", "verdicts", "matches"),
    "track": ("tracked",),
}


# ------------------------------------------------------------------ runner


class Pipeline:
    def __init__(
        self,
        config: PipelineConfig,
        client: PlatformClient | None = None,
        clock: Clock | None = None,
        paths: dict[str, str] | None = None,
        retry: RetryPolicy | None = None,
    ):
        state = None
        if client is None and config.platform is not None:
            from .sim import SimulatedPlatform, load_ecosystem

            state = load_ecosystem(config.platform)
        if clock is None:
            now = config.now if config.now is not None else (state.now if state else None)
            if now is None:
                raise ValueError("no clock: set now or use a simulator platform")
            clock = FixedClock(now)
        if state is not None:
            client = SimulatedPlatform(state, clock)
        self.ctx = Context(config, clock, client, dict(paths or {}), retry or RetryPolicy())
        self.state_path = self.ctx.out / "run_state.json"

    def _key(self, stage: str) -> str:
        return f"track@{self.ctx.clock.now()}" if stage == "track" else stage

    def _input_hashes(self, stage: str) -> dict[str, str]:
        out = {}
        for name in STAGE_INPUTS[stage]:
            p = self.ctx.path(name)
            out[name] = _hash_path(p) if p.exists() else "missing"
        return out

    def _rel(self, p: Path) -> str:
        try:
            return str(p.resolve().relative_to(self.ctx.out.resolve()))
        except ValueError:
            return str(p.resolve())

    def _is_done(self, state: RunState, stage: str) -> bool:
        rec = state.stages.get(self._key(stage))
        if rec is None or rec.get("inputs") != self._input_hashes(stage):
            return False
        for rel, digest in rec.get("outputs", {}).items():
            p = Path(rel) if Path(rel).is_absolute() else self.ctx.out / rel
            if not p.exists() or _hash_path(p) != digest:
                return False
        return True

    def run_stage(self, stage: str) -> str:
        """Run one stage unless its recorded inputs and outputs are unchanged."""
        if stage not in STAGE_FUNCS:
            raise ValueError(f"unknown stage {stage!r}")
        state = RunState.load(self.state_path, self.ctx.run_id, self.ctx.config_hash)
        if state.config_hash != self.ctx.config_hash:
            raise StageFailure(stage, ValueError(
                f"{self.ctx.out} holds run {state.run_id} with a different config"))
        if self._is_done(state, stage):
            log.info("stage %s up to date", stage)
            return "skipped"
        inputs = self._input_hashes(stage)
        try:
            outputs = STAGE_FUNCS[stage](self.ctx)
        except TransportExhausted:
            raise
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(stage, exc) from exc
        state.stages[self._key(stage)] = {
            "inputs": inputs,
            "outputs": {self._rel(p): _hash_path(p) for p in outputs},
        }
        state.save(self.state_path)
        return "done"

    def run(self, stages: Iterable[str] = STAGES) -> dict:
        status = {s: self.run_stage(s) for s in stages}
        return {"run_id": self.ctx.run_id, "config_hash": self.ctx.config_hash, "stages": status,
                "out_dir": str(self.ctx.out)}


def run_pipeline(
    config: PipelineConfig, client: PlatformClient | None = None, clock: Clock | None = None
) -> dict:
    """Run every stage in order; completed stages are skipped on re-run."""
    pipe = Pipeline(config, client, clock)
    summary = pipe.run()
    out = pipe.ctx.out
    gs = out / ARTIFACTS["graph_summary"]
    if gs.exists():
        summary["graph"] = {k: v for k, v in json.loads(gs.read_text()).items() if k != "_header"}
    lp = out / ARTIFACTS["loss"]
    if lp.exists():
        summary["loss_total_usd"] = json.loads(lp.read_text())["total_usd"]
    return summary
