"""Where do naive-planner deaths happen: shooter context, victim context, hops."""
from __future__ import annotations

import collections

from egress.building_graph import load_environment
from egress.simulator import ScenarioConfig, run_simulation

g = load_environment("acyclic_school")
kind = {n: g.nodes[n].kind for n in g.nodes}

for planner in ("naive_asters", "ccasters"):
    agg = collections.Counter()
    hops = collections.Counter()
    tot = 0
    for seed in (1, 2, 3):
        cfg = ScenarioConfig(environment="acyclic_school", planner=planner,
                             shooter_spawn=20, evacuee_distribution="rooms_only",
                             evacuees_per_node=10, seed=seed, record_traces=True)
        res = run_simulation(cfg)
        tot += res.casualties
        shooter_at = {}
        for (t, aid, k, detail) in res.agent_traces:
            if k == "shooter":
                shooter_at[t] = detail  # (adjudication node, true node or None)
        for (t, aid, k, detail) in res.agent_traces:
            if k != "death":
                continue
            where, s_node, hop = detail
            s_kind = kind[s_node]
            v_kind = kind[where] if isinstance(where, int) else "edge"
            agg[(s_kind, v_kind)] += 1
            hops[hop] += 1
    print(f"{planner}: total deaths over 3 seeds = {tot}")
    for key, c in agg.most_common():
        print(f"   shooter@{key[0]:5s} victim@{key[1]:5s} : {c}")
    print(f"   hop histogram: {dict(sorted(hops.items()))}")
