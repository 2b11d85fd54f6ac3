"""Death forensics for acyclic ccasters runs: who dies, where, and had they moved."""
from __future__ import annotations

import collections

from egress.simulator import ScenarioConfig, run_simulation


def classify(res):
    traces = collections.defaultdict(list)
    for (t, aid, kind, detail) in res.agent_traces:
        traces[aid].append((t, kind, detail))
    cats = collections.Counter()
    times = []
    locs = collections.Counter()
    for aid, evs in traces.items():
        dd = [e for e in evs if e[1] == "death"]
        if not dd:
            continue
        t, _, detail = dd[0]
        grants = [e for e in evs if e[1] == "grant" and e[0] <= t]
        times.append(t)
        locs[str(detail)] += 1
        if not grants:
            cats["never_moved"] += 1
        elif len(grants) <= 2:
            cats["just_departed"] += 1
        else:
            cats["en_route"] += 1
    return cats, sorted(times), locs


def main():
    for spawn in (2, 20, 52):
        for dist in ("rooms_only", "rooms_and_halls"):
            cfg = ScenarioConfig(environment="acyclic_school", planner="ccasters",
                                 shooter_spawn=spawn, evacuee_distribution=dist,
                                 evacuees_per_node=10, seed=3, record_traces=True)
            res = run_simulation(cfg)
            n0 = res.initial_count
            cats, times, locs = classify(res)
            print(f"spawn={spawn:3d} {dist:15s} cas={res.casualties:4d}/{n0} "
                  f"esc={res.escapes:4d} rem={res.remaining:4d} cats={dict(cats)}")
            if times:
                print(f"    death t: min={times[0]} p50={times[len(times)//2]} max={times[-1]}")
                print(f"    places: {locs.most_common(6)}")


if __name__ == "__main__":
    main()
