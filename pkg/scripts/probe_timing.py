"""When do deaths happen, and where is the shooter at kill time."""
from __future__ import annotations

from collections import Counter

from egress.simulator import ScenarioConfig, run_simulation

for planner in ("naive_asters", "ccasters", "natural_response"):
    early, late = 0, 0
    where = Counter()
    hops = Counter()
    for seed in (1, 2, 3):
        cfg = ScenarioConfig(environment="acyclic_school", planner=planner,
                             shooter_spawn=20, evacuee_distribution="rooms_only",
                             evacuees_per_node=10, seed=seed, record_traces=True)
        r = run_simulation(cfg)
        for (t, aid, kind, detail) in r.agent_traces:
            if kind != "death":
                continue
            if t <= 20:
                early += 1
            else:
                late += 1
                where[(detail[1], str(detail[0]))] += 1
                hops[detail[2]] += 1
    print(f"{planner:17s} early(<=20s)={early:4d} late={late:4d}")
    if late:
        print("   top late kill sites (shooter_adj_node, victim_loc):",
              where.most_common(8))
        print("   late hop histogram:", dict(sorted(hops.items())))
