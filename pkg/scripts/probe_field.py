"""Measure harm decay and VI hide-vs-run decisions on the acyclic school."""
from __future__ import annotations

import numpy as np

from egress.building_graph import load_environment
from egress.threat import propagate_location, smear_harm
from egress.planner import PlannerParams, CapacityLedger, value_iteration

g = load_environment("acyclic_school")

h = smear_harm(propagate_location(g, node_s=7, horizon_s=120))
north = [6, 7, 8, 9, 10, 11, 12]
west = [2, 3, 4, 5]
rooms = [34, 30, 40, 19]
print("t | harm(hall9) harm(hall12) harm(hall2) harm(room34) harm(room19)")
for t in (0, 3, 6, 10, 15, 20, 30, 45, 60):
    row = [h.at(t, n) for n in (9, 12, 2, 34, 19)]
    print(f"{t:3d} | " + "  ".join(f"{v:.3f}" for v in row))

params = PlannerParams()
led = CapacityLedger(g, horizon_s=300)
for start in (34, 30, 40, 19):
    r = value_iteration(g, h, led, start, t0=0, params=params)
    print(f"start {start}: route={r.steps[:14]}{'...' if len(r.steps) > 14 else ''} depart_t={r.depart_t}")

print("-- shooter far at 18 --")
h2 = smear_harm(propagate_location(g, node_s=18, horizon_s=120))
led2 = CapacityLedger(g, horizon_s=300)
for start in (34, 30, 40, 19, 51):
    r = value_iteration(g, h2, led2, start, t0=0, params=params)
    print(f"start {start}: route={r.steps[:16]}{'...' if len(r.steps) > 16 else ''}")
