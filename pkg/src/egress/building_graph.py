"""Building layouts as capacitated graphs.

Nodes are rooms, hallway segments, and exits. Undirected edges carry a
traversal time in whole seconds and a capacity; door edges additionally
throttle entries per second. Everything downstream (threat propagation,
planning, simulation) works off the static quantities precomputed here:
adjacency in both directions, exit times, pairwise hop counts, and
line-of-sight sets.

Environment files are JSON with top level keys ``nodes``, ``edges`` and
optionally ``los`` and ``walls``. Unknown keys anywhere are rejected so a
typo fails loudly instead of silently falling back to a default.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "NodeSpec",
    "EdgeSpec",
    "BuildingGraph",
    "load_environment",
    "shortest_path",
    "compute_exit_times",
    "line_of_sight_set",
    "validate",
]

NODE_KINDS = ("hall", "room", "exit")
DOOR_KINDS = ("single", "double", "none")

WALK_SPEED_M_S = 1.5

DEFAULT_HARDNESS = {"hall": 0.0, "room": 5.0, "exit": 0.0}
DEFAULT_MAX_OCCUPANCY = {"hall": 20, "room": 20, "exit": 999}
DEFAULT_CAPACITY = {"single": 2, "double": 4, "none": 20}
DOOR_THROUGHPUT = {"single": 2, "double": 4}

_NODE_KEYS = {"id", "kind", "hardness", "max_occupancy", "position"}
_EDGE_KEYS = {"a", "b", "sojourn_s", "capacity", "door_kind"}
_TOP_KEYS = {"nodes", "edges", "los", "walls"}


@dataclass(frozen=True)
class NodeSpec:
    id: int
    kind: str
    hardness: float
    max_occupancy: int
    position: tuple[float, float] | None = None


@dataclass(frozen=True)
class EdgeSpec:
    a: int
    b: int
    sojourn_s: int
    capacity: int
    door_kind: str = "none"

    @property
    def throughput_per_s(self) -> int:
        """Entries admitted per second: 2 single door, 4 double, else capacity."""
        return DOOR_THROUGHPUT.get(self.door_kind, self.capacity)

    @property
    def is_door(self) -> bool:
        return self.door_kind != "none"

    def other(self, node_id: int) -> int:
        return self.b if node_id == self.a else self.a


class BuildingGraph:
    """Immutable environment with precomputed navigation tables.

    Public attributes:
        nodes       dict id -> NodeSpec
        edges       list of EdgeSpec (undirected, one entry per pair)
        los         dict id -> frozenset of visible node ids
        exit_time   dict id -> seconds along the quickest path to any exit
        walls       list of ((x1, y1), (x2, y2)) segments
        exits       tuple of exit node ids, ascending
        adjacency   dict id -> tuple of neighbor ids, ascending

    Array attributes (0-based index = id - 1) back the numeric kernels:
    directed edges live in CSR form sorted by (tail, head) so that a
    first-wins scan over a node's out-edges breaks ties toward the lowest
    neighbor id.
    """

    def __init__(self, nodes: list[NodeSpec], edges: list[EdgeSpec],
                 los: dict[int, frozenset[int]], walls: list | None = None,
                 exit_time: dict[int, int] | None = None):
        self.nodes: dict[int, NodeSpec] = {n.id: n for n in nodes}
        self.edges: list[EdgeSpec] = list(edges)
        self.los: dict[int, frozenset[int]] = dict(los)
        self.walls = list(walls or [])
        self.n = len(nodes)
        self.exits: tuple[int, ...] = tuple(sorted(
            n.id for n in nodes if n.kind == "exit"))

        adj: dict[int, list[int]] = {n.id: [] for n in nodes}
        self.edge_between: dict[tuple[int, int], EdgeSpec] = {}
        for e in self.edges:
            adj[e.a].append(e.b)
            adj[e.b].append(e.a)
            self.edge_between[(e.a, e.b)] = e
            self.edge_between[(e.b, e.a)] = e
        self.adjacency: dict[int, tuple[int, ...]] = {
            v: tuple(sorted(ns)) for v, ns in adj.items()}

        self._build_arrays()
        self.exit_time: dict[int, int] = (
            dict(exit_time) if exit_time is not None
            else compute_exit_times(self))
        self.exit_time_arr = np.array(
            [self.exit_time.get(v, -1) for v in self._ids], dtype=np.int64)

    # -- array construction -------------------------------------------------

    def _build_arrays(self) -> None:
        ids = sorted(self.nodes)
        self._ids = ids
        self._idx = {v: i for i, v in enumerate(ids)}
        n = self.n

        self.node_cap = np.array(
            [self.nodes[v].max_occupancy for v in ids], dtype=np.int64)
        self.hardness_arr = np.array(
            [self.nodes[v].hardness for v in ids], dtype=np.float64)
        self.is_exit_arr = np.array(
            [self.nodes[v].kind == "exit" for v in ids], dtype=np.bool_)

        directed = []
        for e in self.edges:
            directed.append((self._idx[e.a], self._idx[e.b], e))
            directed.append((self._idx[e.b], self._idx[e.a], e))
        directed.sort(key=lambda d: (d[0], d[1]))
        m = len(directed)
        self.e_tail = np.empty(m, dtype=np.int64)
        self.e_head = np.empty(m, dtype=np.int64)
        self.e_dur = np.empty(m, dtype=np.int64)
        self.e_cap = np.empty(m, dtype=np.int64)
        self.e_is_door = np.empty(m, dtype=np.bool_)
        self.e_throughput = np.empty(m, dtype=np.int64)
        self.dedge_index: dict[tuple[int, int], int] = {}
        self.dedge_spec: list[EdgeSpec] = []
        for i, (a, b, e) in enumerate(directed):
            self.e_tail[i] = a
            self.e_head[i] = b
            self.e_dur[i] = e.sojourn_s
            self.e_cap[i] = e.capacity
            self.e_is_door[i] = e.is_door
            self.e_throughput[i] = e.throughput_per_s
            self.dedge_index[(ids[a], ids[b])] = i
            self.dedge_spec.append(e)

        self.adj_ptr = np.zeros(n + 1, dtype=np.int64)
        for i in range(m):
            self.adj_ptr[self.e_tail[i] + 1] += 1
        np.cumsum(self.adj_ptr, out=self.adj_ptr)
        self.adj_eidx = np.arange(m, dtype=np.int64)

        self.slot_off = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(self.e_dur, out=self.slot_off[1:])
        self.total_slots = int(self.slot_off[-1])

        inc: list[list[int]] = [[] for _ in range(n)]
        for i in range(m):
            inc[self.e_tail[i]].append(i)
            inc[self.e_head[i]].append(i)
        self.inc_ptr = np.zeros(n + 1, dtype=np.int64)
        self.inc_eidx = np.empty(2 * m, dtype=np.int64)
        pos = 0
        for v in range(n):
            self.inc_ptr[v] = pos
            for i in inc[v]:
                self.inc_eidx[pos] = i
                pos += 1
        self.inc_ptr[n] = pos

        self.los_mat = np.zeros((n, n), dtype=np.bool_)
        for v, visible in self.los.items():
            vi = self._idx[v]
            for w in visible:
                if w in self._idx:
                    self.los_mat[vi, self._idx[w]] = True

        self.hop = self._hop_matrix()
        self.max_dur = int(self.e_dur.max()) if m else 1

    def _hop_matrix(self) -> np.ndarray:
        n = self.n
        hop = np.full((n, n), -1, dtype=np.int64)
        for s in range(n):
            hop[s, s] = 0
            frontier = [s]
            d = 0
            while frontier:
                d += 1
                nxt = []
                for v in frontier:
                    for k in range(self.adj_ptr[v], self.adj_ptr[v + 1]):
                        w = int(self.e_head[k])
                        if hop[s, w] < 0:
                            hop[s, w] = d
                            nxt.append(w)
                frontier = nxt
        return hop

    # -- id helpers ----------------------------------------------------------

    def index_of(self, node_id: int) -> int:
        return self._idx[node_id]

    def id_of(self, index: int) -> int:
        return self._ids[index]

    def hop_distance(self, a: int, b: int) -> int:
        return int(self.hop[self._idx[a], self._idx[b]])

    def edge(self, a: int, b: int) -> EdgeSpec:
        try:
            return self.edge_between[(a, b)]
        except KeyError:
            raise ValueError(f"no edge between {a} and {b}") from None


# -- shortest paths ----------------------------------------------------------


def shortest_path(g: BuildingGraph, a: int, b: int) -> tuple[list[int], int]:
    """Quickest route from a to b by summed sojourn seconds.

    Among equally quick routes the lexicographically smallest node id
    sequence wins, which keeps every caller deterministic. Raises
    ValueError for unknown endpoints or when no route exists.
    """
    if a not in g.nodes or b not in g.nodes:
        raise ValueError(f"unknown node in shortest_path: {a} -> {b}")
    if a == b:
        return [a], 0
    settled: set[int] = set()
    heap: list[tuple[int, tuple[int, ...]]] = [(0, (a,))]
    while heap:
        dist, path = heapq.heappop(heap)
        v = path[-1]
        if v in settled:
            continue
        settled.add(v)
        if v == b:
            return list(path), dist
        for w in g.adjacency[v]:
            if w in settled:
                continue
            e = g.edge_between[(v, w)]
            heapq.heappush(heap, (dist + e.sojourn_s, path + (w,)))
    raise ValueError(f"no path from {a} to {b}")


def dijkstra_seconds(g: BuildingGraph, source: int) -> dict[int, int]:
    """Sojourn-second distance from source to every reachable node."""
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, 1 << 60):
            continue
        for w in g.adjacency[v]:
            nd = d + g.edge_between[(v, w)].sojourn_s
            if nd < dist.get(w, 1 << 60):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def compute_exit_times(g: BuildingGraph) -> dict[int, int]:
    """Seconds along the quickest route to the nearest exit, per node.

    Exits map to 0. Unreachable nodes are omitted; the loader treats that
    as a broken environment.
    """
    dist: dict[int, int] = {}
    heap: list[tuple[int, int]] = []
    for x in g.exits:
        dist[x] = 0
        heapq.heappush(heap, (0, x))
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, 1 << 60):
            continue
        for w in g.adjacency[v]:
            nd = d + g.edge_between[(v, w)].sojourn_s
            if nd < dist.get(w, 1 << 60):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def line_of_sight_set(g: BuildingGraph, node_id: int) -> set[int]:
    """Node ids visible from node_id, always including node_id itself."""
    if node_id not in g.nodes:
        raise ValueError(f"unknown node {node_id}")
    return set(g.los[node_id])


# -- validation ---------------------------------------------------------------


def validate(g: BuildingGraph) -> list[str]:
    """Check structural invariants; returns human readable violations."""
    out: list[str] = []
    ids = sorted(g.nodes)
    if ids != list(range(1, len(ids) + 1)):
        out.append(f"node ids not contiguous from 1: {ids[:8]}...")
    for v, spec in sorted(g.nodes.items()):
        if spec.kind not in NODE_KINDS:
            out.append(f"node {v}: unknown kind {spec.kind!r}")
        if spec.hardness < 0:
            out.append(f"node {v}: negative hardness {spec.hardness}")
        if spec.max_occupancy < 1:
            out.append(f"node {v}: max_occupancy {spec.max_occupancy} < 1")
        if spec.kind == "exit" and spec.max_occupancy != 999:
            out.append(f"exit {v}: max_occupancy must be 999, "
                       f"got {spec.max_occupancy}")
    halls = [s.hardness for s in g.nodes.values() if s.kind == "hall"]
    rooms = [s.hardness for s in g.nodes.values() if s.kind == "room"]
    if halls and rooms and max(halls) > min(rooms):
        out.append(f"hall hardness {max(halls)} exceeds room hardness "
                   f"{min(rooms)}")

    seen_pairs: set[tuple[int, int]] = set()
    for e in g.edges:
        pair = (min(e.a, e.b), max(e.a, e.b))
        if e.a not in g.nodes or e.b not in g.nodes:
            out.append(f"edge {e.a}-{e.b}: dangling endpoint")
            continue
        if pair in seen_pairs:
            out.append(f"edge {e.a}-{e.b}: duplicate")
        seen_pairs.add(pair)
        if e.a == e.b:
            out.append(f"edge {e.a}-{e.b}: self loop")
        if e.sojourn_s < 1:
            out.append(f"edge {e.a}-{e.b}: sojourn_s {e.sojourn_s} < 1")
        if e.capacity < 1:
            out.append(f"edge {e.a}-{e.b}: capacity {e.capacity} < 1")
        if e.door_kind not in DOOR_KINDS:
            out.append(f"edge {e.a}-{e.b}: unknown door_kind {e.door_kind!r}")

    for v in sorted(g.nodes):
        vis = g.los.get(v)
        if vis is None:
            out.append(f"node {v}: missing line of sight set")
            continue
        if v not in vis:
            out.append(f"node {v}: line of sight set omits itself")
        for w in sorted(vis):
            if w not in g.nodes:
                out.append(f"node {v}: line of sight names unknown node {w}")
            elif v not in g.los.get(w, frozenset()):
                out.append(f"line of sight asymmetric: {v} sees {w} "
                           f"but {w} does not see {v}")

    if not g.exits:
        out.append("environment has no exit node")
    else:
        fresh = compute_exit_times(g)
        for v in sorted(g.nodes):
            have = g.exit_time.get(v)
            want = fresh.get(v)
            if want is None:
                out.append(f"node {v}: unreachable from every exit")
            elif have != want:
                out.append(f"node {v}: exit_time {have} != recomputed {want}")
            elif g.nodes[v].kind == "exit" and have != 0:
                out.append(f"exit {v}: exit_time {have} != 0")
            elif g.nodes[v].kind != "exit" and have == 0:
                out.append(f"node {v}: exit_time 0 but not an exit")
    return out


# -- line of sight from wall geometry -----------------------------------------


def _segments_block(p, q, w1, w2) -> bool:
    """True when segment p-q crosses or touches wall w1-w2."""
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(v) < 1e-12:
            return 0
        return 1 if v > 0 else -1

    def on_seg(a, b, c):
        return (min(a[0], b[0]) - 1e-12 <= c[0] <= max(a[0], b[0]) + 1e-12 and
                min(a[1], b[1]) - 1e-12 <= c[1] <= max(a[1], b[1]) + 1e-12)

    o1 = orient(p, q, w1)
    o2 = orient(p, q, w2)
    o3 = orient(w1, w2, p)
    o4 = orient(w1, w2, q)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_seg(p, q, w1):
        return True
    if o2 == 0 and on_seg(p, q, w2):
        return True
    if o3 == 0 and on_seg(w1, w2, p):
        return True
    if o4 == 0 and on_seg(w1, w2, q):
        return True
    return False


def derive_los_from_walls(nodes: list[NodeSpec],
                          walls: list) -> dict[int, frozenset[int]]:
    """Two nodes see each other when no wall segment cuts the sight line."""
    for n in nodes:
        if n.position is None:
            raise ValueError(
                f"node {n.id} has no position; cannot derive line of sight")
    out: dict[int, set[int]] = {n.id: {n.id} for n in nodes}
    for i, ni in enumerate(nodes):
        for nj in nodes[i + 1:]:
            blocked = any(
                _segments_block(ni.position, nj.position,
                                tuple(w[0]), tuple(w[1]))
                for w in walls)
            if not blocked:
                out[ni.id].add(nj.id)
                out[nj.id].add(ni.id)
    return {v: frozenset(s) for v, s in out.items()}


# -- loading -------------------------------------------------------------------


def _bundled_path(name: str) -> Path | None:
    base = resources.files("egress").joinpath("environments")
    candidate = base.joinpath(f"{name}.json")
    return Path(str(candidate)) if candidate.is_file() else None


def bundled_environment_names() -> list[str]:
    base = resources.files("egress").joinpath("environments")
    return sorted(p.name[:-5] for p in base.iterdir()
                  if p.name.endswith(".json"))


def _require_keys(obj: dict, allowed: set[str], what: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown key(s) in {what}: {sorted(unknown)}")


def load_environment(source) -> BuildingGraph:
    """Load an environment from a file path, bundled name, or parsed dict.

    Raises ValueError on malformed JSON, unknown keys, dangling edge
    endpoints, duplicate ids, a missing exit, or any node that cannot
    reach an exit.
    """
    if isinstance(source, dict):
        raw = source
        origin = "<dict>"
    else:
        path = Path(source)
        if not path.exists():
            bundled = _bundled_path(str(source))
            if bundled is None:
                raise ValueError(
                    f"environment not found: {source!r} is neither a file "
                    f"nor one of {bundled_environment_names()}")
            path = bundled
        origin = str(path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise ValueError(f"cannot parse {origin}: {err}") from err
    if not isinstance(raw, dict):
        raise ValueError(f"{origin}: top level must be an object")
    _require_keys(raw, _TOP_KEYS, f"{origin} top level")
    if "nodes" not in raw or "edges" not in raw:
        raise ValueError(f"{origin}: 'nodes' and 'edges' are required")

    nodes: list[NodeSpec] = []
    seen_ids: set[int] = set()
    positions: dict[int, tuple[float, float]] = {}
    for nd in raw["nodes"]:
        _require_keys(nd, _NODE_KEYS, f"node entry {nd.get('id')}")
        nid = int(nd["id"])
        if nid in seen_ids:
            raise ValueError(f"{origin}: duplicate node id {nid}")
        seen_ids.add(nid)
        kind = nd["kind"]
        if kind not in NODE_KINDS:
            raise ValueError(f"{origin}: node {nid} has unknown kind {kind!r}")
        pos = nd.get("position")
        if pos is not None:
            pos = (float(pos[0]), float(pos[1]))
            positions[nid] = pos
        nodes.append(NodeSpec(
            id=nid,
            kind=kind,
            hardness=float(nd.get("hardness", DEFAULT_HARDNESS[kind])),
            max_occupancy=int(nd.get("max_occupancy",
                                     DEFAULT_MAX_OCCUPANCY[kind])),
            position=pos,
        ))
    if sorted(seen_ids) != list(range(1, len(nodes) + 1)):
        raise ValueError(f"{origin}: node ids must be contiguous from 1")

    edges: list[EdgeSpec] = []
    for ed in raw["edges"]:
        _require_keys(ed, _EDGE_KEYS, f"edge entry {ed.get('a')}-{ed.get('b')}")
        a, b = int(ed["a"]), int(ed["b"])
        if a not in seen_ids or b not in seen_ids:
            raise ValueError(f"{origin}: edge {a}-{b} has a dangling endpoint")
        door = ed.get("door_kind", "none")
        if door not in DOOR_KINDS:
            raise ValueError(
                f"{origin}: edge {a}-{b} has unknown door_kind {door!r}")
        sojourn = ed.get("sojourn_s")
        if sojourn is None:
            if a not in positions or b not in positions:
                raise ValueError(
                    f"{origin}: edge {a}-{b} has no sojourn_s and endpoint "
                    f"positions are missing")
            dx = positions[a][0] - positions[b][0]
            dy = positions[a][1] - positions[b][1]
            sojourn = max(1, math.ceil(math.hypot(dx, dy) / WALK_SPEED_M_S))
        edges.append(EdgeSpec(
            a=a, b=b,
            sojourn_s=int(sojourn),
            capacity=int(ed.get("capacity", DEFAULT_CAPACITY[door])),
            door_kind=door,
        ))

    if "los" in raw:
        los = {int(k): frozenset(int(w) for w in v)
               for k, v in raw["los"].items()}
        for v in seen_ids:
            los.setdefault(v, frozenset({v}))
    elif raw.get("walls"):
        los = derive_los_from_walls(nodes, raw["walls"])
    else:
        los = {n.id: frozenset({n.id}) for n in nodes}

    g = BuildingGraph(nodes, edges, los, walls=raw.get("walls"))
    if not g.exits:
        raise ValueError(f"{origin}: environment has no exit node")
    for v in sorted(g.nodes):
        if v not in g.exit_time:
            raise ValueError(f"{origin}: node {v} cannot reach any exit")
    return g
