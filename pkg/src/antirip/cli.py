"""Command line entry point: one subcommand per stage, plus ``run`` and ``simulate``.

Exit codes: 0 ok, 1 usage, 2 stage failure, 3 transport retries exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import MissingInput, StageFailure, TransportExhausted
from .pipeline import STAGES, Pipeline, load_config

log = logging.getLogger("antirip")

EXIT_OK, EXIT_USAGE, EXIT_STAGE, EXIT_TRANSPORT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# flag -> (config key | None, artifact name | None); artifact flags override file locations
STAGE_FLAGS: dict[str, list[tuple[str, str | None, str | None, dict]]] = {
    "synth": [
        ("--lexicon", "lexicon", None, {}),
        ("--handles", "handles", None, {}),
        ("--higher-order", "higher_order", None, {"type": int}),
        ("--seed", "seed", None, {"type": int}),
        ("--out", None, "candidates", {}),
    ],
    "discover": [
        ("--candidates", None, "candidates", {}),
        ("--window-days", "window_days", None, {"type": int}),
        ("--probe-posts", "probe_posts", None, {"type": int}),
        ("--max-depth", "max_depth", None, {"type": int}),
        ("--out", None, "discovery", {}),
    ],
    "hydrate": [
        ("--discovery", None, "discovery", {}),
        ("--hydrate-posts", "hydrate_posts", None, {"type": int}),
        ("--out", None, "posts", {}),
    ],
    "classify": [
        ("--discovery", None, "discovery", {}),
        ("--posts", None, "posts", {}),
        ("--classifier", "classifier", None, {}),
        ("--out", None, "verdicts", {}),
    ],
    "match": [
        ("--catalog", "catalog", None, {}),
        ("--posts", None, "posts", {}),
        ("--verdicts", None, "verdicts", {}),
        ("--match-threshold", "match_threshold", None, {"type": float}),
        ("--out", None, "matches", {}),
    ],
    "graph": [
        ("--discovery", None, "discovery", {}),
        ("--posts", None, "posts", {}),
    ],
    "estimate": [
        ("--pricing", "pricing", None, {}),
        ("--fx", "fx", None, {}),
        ("--language-map", "language_map", None, {}),
        ("--matches", None, "matches", {}),
        ("--out", None, "loss", {}),
    ],
    "report": [
        ("--mode", "report_mode", None, {"choices": ("batched", "event")}),
        ("--rights-holders", "rights_holders", None, {}),
        ("--url-only", "url_only", None, {"action": "store_const", "const": True}),
    ],
    "track": [
        ("--window-days", "tracking_window_days", None, {"type": int}),
    ],
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out-dir", help="run directory (default: from config, else .)")
    p.add_argument("--platform", help="simulator state directory")
    p.add_argument("--now", type=int, help="clock value, unix seconds")
    p.add_argument("--run-id")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="any config key")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="antirip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for stage in STAGES:
        sp = sub.add_parser(stage, help=f"run the {stage} stage")
        _common(sp)
        for flag, _key, _art, kw in STAGE_FLAGS.get(stage, []):
            sp.add_argument(flag, dest=flag.lstrip("-").replace("-", "_"), **kw)
    rp = sub.add_parser("run", help="run every stage in order")
    _common(rp)
    rp.add_argument("--stages", help="comma separated subset, in pipeline order")

    sim = sub.add_parser("simulate", help="write a simulator ecosystem and matching input fixtures")
    sim.add_argument("--out-dir", required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--channels", type=int, default=30)
    sim.add_argument("--bots", type=int, default=5)
    sim.add_argument("--super", type=int, action="append", default=[], metavar="OUTDEG")
    sim.add_argument("--terminals", type=int, default=0)
    sim.add_argument("--takedown-fraction", type=float, default=0.0)
    sim.add_argument("--company", action="append", default=[])
    sim.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _overrides(args: argparse.Namespace) -> tuple[dict, dict]:
    values: dict = {}
    paths: dict = {}
    for pair in args.set:
        if "=" not in pair:
            raise UsageError(f"--set expects KEY=VALUE, got {pair!r}")
        k, v = pair.split("=", 1)
        values[k.strip()] = v.strip()
    for key in ("out_dir", "platform", "now", "run_id", "parallelism"):
        if getattr(args, key, None) is not None:
            values[key] = getattr(args, key)
    for flag, key, art, _kw in STAGE_FLAGS.get(args.command, []):
        v = getattr(args, flag.lstrip("-").replace("-", "_"))
        if v is None:
            continue
        if key is not None:
            values[key] = v
        if art is not None:
            paths[art] = str(Path(v).resolve())
    return values, paths


def _simulate(args: argparse.Namespace) -> int:
    from .loss import load_language_map
    from .sim import EcosystemSpec, RolePlan, generate_ecosystem, make_fx, make_pricing, save_ecosystem
    from .sim.ecosystem import default_lexicon
    from .catalog import fixture_catalog_path, ingest_catalog

    out = Path(args.out_dir)
    spec = EcosystemSpec(
        seed=args.seed,
        n_channels=args.channels,
        n_bots=args.bots,
        role_plan=RolePlan(super_outdegrees=tuple(args.super), n_terminal=args.terminals),
        n_seeds=max(2, len(args.super)),
        takedown_fraction=args.takedown_fraction,
        companies=tuple(args.company),
    )
    state = generate_ecosystem(spec)
    save_ecosystem(state, out / "platform")
    catalog = ingest_catalog(fixture_catalog_path())
    regions = sorted(set(load_language_map().values()) | {"ZZ"})
    with open(out / "pricing.jsonl", "w", encoding="utf-8") as fh:
        for row in make_pricing([e.id for e in catalog.entries], regions, args.seed):
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    (out / "fx.json").write_text(json.dumps(make_fx(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "lexicon.txt").write_text("".join(t + "\n" for t in (spec.lexicon or default_lexicon())), encoding="utf-8")
    holders = "".join(f"{c} = abuse@{c.lower().replace(' ', '-')}.example\n" for c in args.company)
    (out / "rights_holders.txt").write_text(holders, encoding="utf-8")
    conf = [
        "platform = platform",
        "lexicon = lexicon.txt",
        "pricing = pricing.jsonl",
        "fx = fx.json",
        "rights_holders = rights_holders.txt",
        "out_dir = run",
        f"seed = {args.seed}",
    ]
    (out / "antirip.conf").write_text("\n".join(conf) + "\n", encoding="utf-8")
    print(f"wrote simulator state and fixtures to {out}; config at {out / 'antirip.conf'}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"antirip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "simulate":
        return _simulate(args)
    try:
        values, paths = _overrides(args)
        config = load_config(args.config, values)
        pipe = Pipeline(config, paths=paths)
        if args.command == "run":
            stages = STAGES if not args.stages else tuple(s.strip() for s in args.stages.split(","))
            unknown = [s for s in stages if s not in STAGES]
            if unknown:
                raise UsageError(f"unknown stages: {', '.join(unknown)}")
            summary = pipe.run(stages)
        else:
            summary = pipe.run([args.command])
    except (UsageError, MissingInput, KeyError, ValueError, OSError) as exc:
        print(f"antirip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TransportExhausted as exc:
        print(f"antirip: transport retries exhausted: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except StageFailure as exc:
        print(f"antirip: {exc}", file=sys.stderr)
        return EXIT_STAGE
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
