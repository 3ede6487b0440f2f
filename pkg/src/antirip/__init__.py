"""Piracy-channel discovery, classification, promotion-graph analysis, loss estimation and takedown reporting."""

from __future__ import annotations

from .catalog import Catalog, CatalogEntry, TitleMatch, ingest_catalog, match_posts
from .crawler import Discovered, discover
from .errors import (
    ChannelGone,
    MissingInput,
    RateLimited,
    StageFailure,
    TransportExhausted,
    TransportFailure,
)
from .graph import PromotionGraph, build as build_graph, classify_roles, compute_thresholds, transitive_pairs
from .handles import generate_candidates, handle_ok
from .loss import ExchangeTable, PricingTable, estimate
from .pipeline import Pipeline, PipelineConfig, load_config, run_pipeline
from .platform import ChannelRecord, FixedClock, PlatformClient, PostRecord, RetryPolicy
from .reports import build_reports, outcome_summary, track
from .rules import RuleClassifier, classify_posts
from .taxonomy import PostVerdict, TaxonomyLabel

__version__ = "0.1.0"

__all__ = [
    "Catalog", "CatalogEntry", "ChannelGone", "ChannelRecord", "Discovered", "ExchangeTable", "FixedClock",
    "MissingInput", "Pipeline", "PipelineConfig", "PlatformClient", "PostRecord", "PostVerdict", "PricingTable",
    "PromotionGraph", "RateLimited", "RetryPolicy", "RuleClassifier", "StageFailure", "TaxonomyLabel",
    "TitleMatch", "TransportExhausted", "TransportFailure", "build_graph", "build_reports", "classify_posts",
    "classify_roles", "compute_thresholds", "discover", "estimate", "generate_candidates", "handle_ok",
    "ingest_catalog", "load_config", "match_posts", "outcome_summary", "run_pipeline", "track",
    "transitive_pairs",
]
