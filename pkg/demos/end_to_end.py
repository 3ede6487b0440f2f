#!/usr/bin/env python3
"""Simulate an ecosystem, run every stage, then check takedowns two weeks later."""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from antirip.cli import main
from antirip.sim import load_ecosystem

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="antirip-"))
main(["simulate", "--out-dir", str(work), "--seed", "1", "--super", "20", "--terminals", "4",
      "--takedown-fraction", "0.4", "--company", "Bluefin Studios", "--company", "Ganges Talkies"])

conf = ["--config", str(work / "antirip.conf")]
main(["run", *conf])

run = work / "run"
graph = json.loads((run / "graph_summary.json").read_text())
print("roles:", graph["roles"], "cutoff", round(graph["thresholds"]["super_cutoff"], 3))
loss = json.loads((run / "loss_report.json").read_text())
print(f"estimated loss {loss['total_usd']:.2f} USD over {len(loss['groups'])} groups, {len(loss['unpriced'])} unpriced")
print("report streams:", sorted(p.name for p in (run / "outbox").iterdir()))

later = load_ecosystem(work / "platform").now + 14 * 86400
main(["track", *conf, "--now", str(later)])
outcome = json.loads((run / f"outcome-{later}.json").read_text())
print(f"after 14 days: {outcome['removed']}/{outcome['entities']} entities gone")
