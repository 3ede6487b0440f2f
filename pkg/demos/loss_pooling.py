#!/usr/bin/env python3
"""How pooling titles under one subscription interacts with the 1-in-100 view rule."""

from __future__ import annotations

from antirip.loss import ExchangeTable, MatchedView, PricingEntry, PricingTable, estimate, individual_streaming_estimate

fx = ExchangeTable({"USD": 1.0, "INR": 0.012}, "2026-01-01")
pricing = PricingTable([
    PricingEntry("t1", "US", streaming=("Netflix", 6.99, "USD")),
    PricingEntry("t2", "US", streaming=("Netflix", 9.99, "USD")),
    PricingEntry("t3", "IN", streaming=("Netflix", 199.0, "INR")),
    PricingEntry("t4", "*", rental=(3.99, "USD"), physical=(14.99, "USD")),
])


def show(label, views):
    est = estimate(views, pricing, fx)
    print(f"{label}: total {est.total_usd:.2f} USD")
    for g in est.groups:
        print(f"  {g.key:<14} {g.mode:<12} views={g.views_total:<5} consumptions={g.consumptions} "
              f"unit={g.unit_cost_usd:.2f} -> {g.loss_usd:.2f}")
    print(f"  per-title streaming estimate: {individual_streaming_estimate(views, pricing, fx):.2f} USD\n")


# large counts: pooling prices the group at the cheapest plan, well under per-title pricing
show("heavy traffic", [
    MatchedView("t1", ("c1", 1), 1250, "US"),
    MatchedView("t2", ("c1", 2), 980, "US"),
    MatchedView("t3", ("c2", 1), 3000, "IN"),
    MatchedView("t4", ("c2", 2), 420, "US"),
])

# small counts: each title alone floors to zero, the pool does not
show("long tail", [MatchedView(t, ("c3", i), 60, "US") for i, t in enumerate(["t1", "t2"])])
