from __future__ import annotations

import re
from pathlib import Path

import pytest

from antirip.platform import FixedClock, RetryPolicy
from antirip.sim import DEFAULT_NOW, EcosystemSpec, RolePlan, SimulatedPlatform, generate_ecosystem

ROOT = Path(__file__).resolve().parents[1]
REFERENCE = ROOT / "paper.md"


def _normalise(text: str) -> str:
    # undo LaTeX escapes so identifiers read as written
    return text.replace("\\_", "_").replace("\\texttt{", "").replace("\\%", "%")


@pytest.fixture(scope="session")
def reference_text() -> str:
    """Source document the published figures are checked against."""
    if not REFERENCE.exists():
        pytest.skip("reference document not available")
    return _normalise(REFERENCE.read_text(encoding="utf-8"))


def reference_number(text: str, pattern: str) -> float:
    m = re.search(pattern, text)
    assert m, f"pattern {pattern!r} not found in reference document"
    return float(m.group(1).replace(",", ""))


@pytest.fixture
def no_sleep() -> RetryPolicy:
    return RetryPolicy(sleep=lambda s: None)


@pytest.fixture(scope="session")
def planted_state():
    spec = EcosystemSpec(
        seed=1,
        role_plan=RolePlan(super_outdegrees=(20,), n_terminal=4),
        takedown_fraction=0.4,
    )
    return generate_ecosystem(spec)


@pytest.fixture
def planted_platform(planted_state):
    return SimulatedPlatform(planted_state, FixedClock(DEFAULT_NOW))


E2E_SIM = ["--seed", "1", "--channels", "30", "--bots", "5", "--super", "20", "--terminals", "4",
           "--takedown-fraction", "0.4", "--company", "Bluefin Studios", "--company", "Ganges Talkies"]


@pytest.fixture(scope="session")
def sim_world(tmp_path_factory) -> Path:
    """Simulator state plus pricing, fx, lexicon and rights-holder fixtures, written by the CLI."""
    from antirip.cli import main

    root = tmp_path_factory.mktemp("world")
    assert main(["simulate", "--out-dir", str(root), *E2E_SIM]) == 0
    return root
