"""Room-drain vs shooter cadence: when does the building empty, who dies early."""
from __future__ import annotations

from collections import Counter

from egress.simulator import ScenarioConfig, run_simulation
from egress.building_graph import load_environment

g = load_environment("acyclic_school")

for planner in ("naive_asters", "ccasters"):
    cfg = ScenarioConfig(environment="acyclic_school", planner=planner,
                         shooter_spawn=20, evacuee_distribution="rooms_only",
                         evacuees_per_node=10, seed=1, record_traces=True)
    r = run_simulation(cfg)
    totals = [int(s.sum()) for s in r.occupancy_series]
    print(f"{planner}:")
    for t in (0, 5, 10, 15, 20, 30, 40, 60, 90, 120, 180):
        if t < len(totals):
            print(f"  t={t:3d} in-building={totals[t]:3d} "
                  f"escaped={r.escapes_series[t]:3d} dead={r.casualties_series[t]:3d}")
    visits = []
    for (t, aid, kind, detail) in r.agent_traces:
        if kind == "shooter":
            adj, cur = detail
            if g.nodes[cur].kind == "room" and (not visits or visits[-1][1] != cur):
                visits.append((t, cur))
    print("  shooter room arrivals:", visits[:8])
    early = Counter()
    for (t, aid, kind, detail) in r.agent_traces:
        if kind == "death" and t <= 20:
            loc = detail[0]
            nk = g.nodes[loc].kind if isinstance(loc, int) else "edge"
            early[(t, nk, str(loc))] += 1
    print("  early deaths (t, kind, loc):", sorted(early.items()))
