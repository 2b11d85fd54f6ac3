"""Split never-moved deaths into planned-stay vs queue-blocked, and locate them."""
from __future__ import annotations

import collections

from egress.building_graph import BuildingGraph, load_environment
from egress.simulator import ScenarioConfig, run_simulation


def main():
    g = load_environment("acyclic_school")
    for spawn, dist in ((2, "rooms_only"), (20, "rooms_only"), (20, "rooms_and_halls")):
        cfg = ScenarioConfig(environment="acyclic_school", planner="ccasters",
                             shooter_spawn=spawn, evacuee_distribution=dist,
                             evacuees_per_node=10, seed=3, record_traces=True)
        res = run_simulation(cfg)
        traces = collections.defaultdict(list)
        for (t, aid, kind, detail) in res.agent_traces:
            traces[aid].append((t, kind, detail))
        cats = collections.Counter()
        spawn_nodes = collections.Counter()
        first_move_t = []
        for aid, evs in traces.items():
            dd = [e for e in evs if e[1] == "death"]
            if not dd:
                g0 = [e for e in evs if e[1] == "grant"]
                if g0:
                    first_move_t.append(g0[0][0])
                continue
            t, _, _ = dd[0]
            reqs = [e for e in evs if e[1] == "request" and e[0] <= t]
            grants = [e for e in evs if e[1] == "grant" and e[0] <= t]
            if grants:
                cats["moved"] += 1
            elif reqs:
                cats["queue_blocked"] += 1
            else:
                cats["planned_stay"] += 1
        print(f"spawn={spawn} {dist}: cas={res.casualties} cats={dict(cats)}")
        if first_move_t:
            first_move_t.sort()
            n = len(first_move_t)
            print(f"   survivors first-move t: p10={first_move_t[n//10]} p50={first_move_t[n//2]} p90={first_move_t[9*n//10]}")

main()
