"""Deterministic synthetic platform used by the tests, demos and the ``synth``-to-``run`` pipeline."""

from .ecosystem import (
    DEFAULT_NOW,
    EcosystemSpec,
    EcosystemState,
    RolePlan,
    Truth,
    generate_ecosystem,
    generate_post_corpus,
    generate_title_corpus,
    make_fx,
    make_pricing,
    title_pool,
)
from .io import load_ecosystem, save_ecosystem
from .platform import SimulatedPlatform

__all__ = [
    "DEFAULT_NOW",
    "EcosystemSpec",
    "EcosystemState",
    "RolePlan",
    "SimulatedPlatform",
    "Truth",
    "generate_ecosystem",
    "generate_post_corpus",
    "generate_title_corpus",
    "load_ecosystem",
    "make_fx",
    "make_pricing",
    "save_ecosystem",
    "title_pool",
]
