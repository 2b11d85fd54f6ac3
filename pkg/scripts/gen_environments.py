#!/usr/bin/env python
"""Regenerate the bundled environment JSON files.

Three layouts ship with the package:

  toy_graph       six nodes, used by the threat propagation examples
  acyclic_school  one-floor school, tree-shaped hallways, 55 nodes
  cyclic_school   two parallel corridors joined by crossings, 70 nodes

Every edge gets an explicit sojourn_s so the files are self contained;
positions are only for plotting and line-of-sight sanity. Run from the
repo root:

    python scripts/gen_environments.py
"""
from __future__ import annotations

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "egress" / "environments"

HALL_STEP_S = 2      # 3 m corridor segment at 1.5 m/s
ENTRY_STUB_S = 3     # the longer 4.5 m western entry run
CYC_HALL_STEP_S = 3  # 4.5 m segments; the two-corridor floor is roomier
ROOM_DOOR_S = 2      # 3 m through a single door
EXIT_DOOR_S = 1      # 1.5 m through a double exit door


def node(nid, kind, pos, hardness=None, max_occupancy=None):
    d = {"id": nid, "kind": kind, "position": [round(pos[0], 2), round(pos[1], 2)]}
    if hardness is not None:
        d["hardness"] = hardness
    if max_occupancy is not None:
        d["max_occupancy"] = max_occupancy
    return d


def edge(a, b, sojourn, door="none", capacity=None):
    d = {"a": a, "b": b, "sojourn_s": sojourn, "door_kind": door}
    if capacity is not None:
        d["capacity"] = capacity
    return d


def los_from_groups(node_ids, groups):
    """Union of straight-sight groups; every node sees itself."""
    vis = {v: {v} for v in node_ids}
    for grp in groups:
        for v in grp:
            vis[v].update(grp)
    return {str(v): sorted(vis[v]) for v in sorted(vis)}


def los_windows(node_ids, runs):
    """Sight one segment each way along corridor runs.

    Fire doors and locker alcoves break every corridor into short
    sections, so a hall sees itself and the neighbouring section only.
    Rooms and exits sit behind solid doors and see just themselves.
    """
    vis = {v: {v} for v in node_ids}
    for run in runs:
        for a, b in zip(run, run[1:]):
            vis[a].add(b)
            vis[b].add(a)
    return {str(v): sorted(vis[v]) for v in sorted(vis)}


def toy_graph():
    nodes = [
        node(1, "room", (0.0, 4.5)),
        node(2, "hall", (0.0, 0.0)),
        node(3, "room", (-3.0, 0.0)),
        node(4, "hall", (4.5, 0.0)),
        node(5, "room", (4.5, -3.0)),
        node(6, "exit", (9.0, 0.0)),
    ]
    edges = [
        edge(1, 2, 3),
        edge(2, 3, 2),
        edge(2, 4, 3),
        edge(4, 5, 2),
        edge(4, 6, 3),
    ]
    los = los_from_groups(range(1, 7), [[2, 4, 6]])
    return {"nodes": nodes, "edges": edges, "los": los}


def acyclic_school():
    """Three wings off one junction, an exit at the end of each wing.

    Hall 6 is the junction. The western wing runs 6-5-4-3-2-1 with exit 52
    past hall 1, the northern wing 6-7..12 with exit 54 past hall 12, and
    the southern wing 6-13..18 with the double-vestibule exits 53 and 55
    past hall 18. Classrooms flank every wing hall on both sides.
    """
    nodes = []
    edges = []

    hall_pos = {6: (0.0, 0.0)}
    for i, h in enumerate((5, 4, 3, 2)):
        hall_pos[h] = (-3.0 * (i + 1), 0.0)
    hall_pos[1] = (-16.5, 0.0)
    for i, h in enumerate(range(7, 13)):
        hall_pos[h] = (0.0, 3.0 * (i + 1))
    for i, h in enumerate(range(13, 19)):
        hall_pos[h] = (0.0, -3.0 * (i + 1))
    for h in range(1, 19):
        nodes.append(node(h, "hall", hall_pos[h]))

    hall_chain = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6),
                  (6, 7), (7, 8), (8, 9), (9, 10), (10, 11), (11, 12),
                  (6, 13), (13, 14), (14, 15), (15, 16), (16, 17), (17, 18)]
    for a, b in hall_chain:
        step = ENTRY_STUB_S if (a, b) == (1, 2) else HALL_STEP_S
        edges.append(edge(a, b, step))

    rooms_by_hall = {
        1: [19, 24], 2: [20, 25], 3: [21, 26], 4: [22, 27], 5: [23, 28],
        7: [29, 35], 8: [30, 36], 9: [31, 37], 10: [32, 38],
        11: [33, 39], 12: [34, 40],
        13: [41, 47], 14: [42, 48], 15: [43, 49], 16: [44, 50],
        17: [45, 51], 18: [46],
    }
    for h, rooms in rooms_by_hall.items():
        hx, hy = hall_pos[h]
        west = h <= 5
        for i, r in enumerate(rooms):
            sign = 1 if i == 0 else -1
            pos = (hx, hy + sign * 3.0) if west else (hx + sign * 3.0, hy)
            nodes.append(node(r, "room", pos))
            edges.append(edge(r, h, ROOM_DOOR_S, door="single"))

    exit_pos = {52: (-21.0, 0.0), 53: (-1.5, -25.5),
                54: (0.0, 25.5), 55: (1.5, -25.5)}
    exit_hall = {52: 1, 53: 18, 54: 12, 55: 18}
    for x in (52, 53, 54, 55):
        nodes.append(node(x, "exit", exit_pos[x]))
        # 4.5 m through the exit vestibule; throughput still 4/s, the
        # double door only blocks during the first second.
        edges.append(edge(exit_hall[x], x, 3, door="double"))

    nodes.sort(key=lambda d: d["id"])
    runs = [
        [1, 2, 3, 4, 5, 6],           # western wing
        [6, 7, 8, 9, 10, 11, 12],     # northern wing
        [6, 13, 14, 15, 16, 17, 18],  # southern wing
    ]
    los = los_windows(range(1, 56), runs)
    return {"nodes": nodes, "edges": edges, "los": los}


def cyclic_school():
    """Two parallel corridors with two crossings and two shared exits.

    North corridor: halls 1..13. South corridor: halls 14..27. Crossing
    hall 28 joins 5 and 19; crossing hall 29 joins 9 and 23. Exit 69 sits
    between halls 2 and 16, exit 70 between halls 13 and 27, so both
    corridors reach both exits and every interior loop goes through a
    crossing or an exit lobby.
    """
    nodes = []
    edges = []

    north = {i: (4.5 * i, 9.0) for i in range(1, 14)}
    south = {13 + j: (4.5 * j, 0.0) for j in range(1, 15)}
    for h, pos in {**north, **south}.items():
        nodes.append(node(h, "hall", pos))
    for i in range(1, 13):
        edges.append(edge(i, i + 1, CYC_HALL_STEP_S))
    for j in range(14, 27):
        edges.append(edge(j, j + 1, CYC_HALL_STEP_S))

    crossings = {28: (5, 19), 29: (9, 23)}
    for c, (a, b) in crossings.items():
        xa = north[a][0]
        xb = south[b][0]
        nodes.append(node(c, "hall", ((xa + xb) / 2, 4.5)))
        edges.append(edge(a, c, 3))
        edges.append(edge(c, b, 3))

    first_rooms = {h: 29 + h for h in range(1, 14)}          # 30..42 north
    first_rooms.update({h: 29 + h for h in range(14, 28)})   # 43..56 south
    second_rooms = dict(zip([2, 4, 6, 8, 10, 12], range(57, 63)))
    second_rooms.update(zip([15, 17, 19, 21, 23, 25], range(63, 69)))
    for h, r in first_rooms.items():
        hx, hy = north.get(h, south.get(h, (0, 0)))
        outer = 3.0 if h <= 13 else -3.0
        nodes.append(node(r, "room", (hx, hy + outer)))
        edges.append(edge(r, h, ROOM_DOOR_S, door="single"))
    for h, r in second_rooms.items():
        hx, hy = north.get(h, south.get(h, (0, 0)))
        inner = -3.0 if h <= 13 else 3.0
        nodes.append(node(r, "room", (hx, hy + inner)))
        edges.append(edge(r, h, ROOM_DOOR_S, door="single"))

    exit_pairs = {69: (2, 16), 70: (13, 27)}
    for x, (a, b) in exit_pairs.items():
        xa = north[a][0]
        xb = south[b][0]
        nodes.append(node(x, "exit", ((xa + xb) / 2, 4.5)))
        edges.append(edge(a, x, EXIT_DOOR_S, door="double"))
        edges.append(edge(x, b, EXIT_DOOR_S, door="double"))

    nodes.sort(key=lambda d: d["id"])
    runs = [
        list(range(1, 14)),    # north corridor
        list(range(14, 28)),   # south corridor
        [5, 28, 19],           # west crossing
        [9, 29, 23],           # east crossing
    ]
    los = los_windows(range(1, 71), runs)
    return {"nodes": nodes, "edges": edges, "los": los}


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, build in [("toy_graph", toy_graph),
                        ("acyclic_school", acyclic_school),
                        ("cyclic_school", cyclic_school)]:
        path = OUT_DIR / f"{name}.json"
        path.write_text(json.dumps(build(), indent=1) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
