"""3 spawns x 2 distributions x 3 planners, small seed batch, one environment."""
from __future__ import annotations

import sys

import numpy as np

from egress.simulator import ScenarioConfig, run_simulation

env = sys.argv[1] if len(sys.argv) > 1 else "acyclic_school"
spawns = [int(s) for s in sys.argv[2].split(",")] if len(sys.argv) > 2 else [2, 20, 52]
per_node = int(sys.argv[3]) if len(sys.argv) > 3 else 10
seeds = range(1, 6)

for dist in ("rooms_only", "rooms_and_halls"):
    for spawn in spawns:
        row = {}
        for planner in ("ccasters", "naive_asters", "natural_response"):
            cas, esc, rem, los = [], [], [], []
            for seed in seeds:
                cfg = ScenarioConfig(environment=env, planner=planner,
                                     shooter_spawn=spawn, evacuee_distribution=dist,
                                     evacuees_per_node=per_node, seed=seed)
                r = run_simulation(cfg)
                cas.append(r.casualties); esc.append(r.escapes)
                rem.append(r.remaining); los.append(r.los_seconds_total)
            row[planner] = (np.mean(cas), np.mean(esc), np.mean(rem), np.mean(los))
        cc, nv, nt = row["ccasters"], row["naive_asters"], row["natural_response"]
        ok = "OK " if cc[0] < nv[0] and cc[0] < nt[0] else "BAD"
        print(f"{ok} {dist:15s} spawn={spawn:3d} "
              f"cc={cc[0]:6.1f}/{cc[1]:6.1f}/{cc[2]:5.1f} L={cc[3]:7.0f} | "
              f"nv={nv[0]:6.1f}/{nv[1]:6.1f} | nt={nt[0]:6.1f}/{nt[1]:6.1f} L={nt[3]:7.0f}")
