"""Capacity-aware evacuation planning.

Finite-horizon value iteration over (node, second) states, where the
action set at each state shrinks as a time-expanded capacity ledger
fills up. Routes are unrolled greedily from the value table; each route
carries a maxsend, the widest bottleneck along its footprint, and the
planner loops rounds of route / reserve / assign until every evacuee
has a route or the round cap is hit. Later rounds see earlier rounds'
reservations, which is what produces staggered wait-prefix routes in
front of busy doors.

Rewards follow a strict if/elif chain per action: dying costs
penalty_max, reaching an exit pays reward_max, otherwise not losing
hardness pays 1, else getting closer to an exit pays 1, else -1.
Exits absorb: arrival pays the bonus once, nobody walks back in, and
the per-second living reward keeps accruing outside. Waiting out a
dangerous stretch in cover therefore trades like-for-like seconds
against an earlier exit instead of racing a compounding jackpot.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .building_graph import BuildingGraph, dijkstra_seconds
from .threat import HarmField, propagate_location, smear_harm

__all__ = [
    "RewardParams",
    "PlannerParams",
    "MdpState",
    "CapacityLedger",
    "Route",
    "EvacuationPlan",
    "NoFeasibleActionError",
    "reward",
    "value_iteration",
    "route_footprint",
    "compute_maxsend",
    "reserve_capacity",
    "order_nodes",
    "plan_ccasters",
]

UNCONSTRAINED_CAPACITY = 10 ** 6


@dataclass
class RewardParams:
    reward_max: float = 10.0
    penalty_max: float | None = None
    step_reward: float = 1.0
    step_penalty: float = -1.0

    def __post_init__(self):
        if self.penalty_max is None:
            self.penalty_max = -self.reward_max


@dataclass
class PlannerParams:
    reward: RewardParams = field(default_factory=RewardParams)
    # None plans to the episode horizon. A short window makes sheltering
    # look free because the exit bonus stops compounding.
    lookahead_s: int | None = None
    route_max: int = 5
    horizon_s: int = 300
    unroll_cap: int = 400

    def window(self, t0: int) -> int:
        left = self.horizon_s - t0
        if self.lookahead_s is None:
            return left
        return min(self.lookahead_s, left)


@dataclass(frozen=True)
class MdpState:
    """One planning state: evacuee node, last known shooter node, second."""
    node_e: int
    node_s: int
    t: int


@dataclass(frozen=True)
class Route:
    """Node id sequence; a repeated id is a one second wait in place."""
    steps: tuple[int, ...]
    depart_t: int
    maxsend: int = 0
    value: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def final_node(self) -> int:
        return self.steps[-1]


@dataclass
class EvacuationPlan:
    """Routes per source node with how many evacuees take each."""
    assignments: dict[int, list[tuple[Route, int]]]
    round_count: int
    t0: int = 0
    complete: bool = True

    def total_assigned(self) -> int:
        return sum(k for routes in self.assignments.values()
                   for _, k in routes)

    def to_json(self) -> dict:
        return {
            "t0": self.t0,
            "round_count": self.round_count,
            "complete": self.complete,
            "assignments": {
                str(v): [{"route": list(r.steps), "depart_t": r.depart_t,
                          "maxsend": r.maxsend, "assigned": k}
                         for r, k in routes]
                for v, routes in sorted(self.assignments.items())
            },
        }


class NoFeasibleActionError(Exception):
    """Start state has no admissible action; defer the node to a later round."""


class CapacityLedger:
    """Remaining capacity per entity per absolute second.

    node_avail[i, t] and edge_avail[e, t] start at the graph's maxima
    (or a uniform fill) and only ever decrease through reserve_capacity.
    Indices follow the graph's node order and directed-edge order; both
    directions of an undirected edge share physical capacity only in the
    simulator, the planning ledger books them separately the way the
    worked reservation trace does.
    """

    def __init__(self, g: BuildingGraph, horizon_s: int,
                 fill: int | None = None):
        if horizon_s < 0:
            raise ValueError("horizon_s must be non-negative")
        self.graph = g
        self.horizon_s = horizon_s
        cols = horizon_s + 1
        if fill is None:
            self.node_avail = np.repeat(g.node_cap[:, None], cols, axis=1)
            self.edge_avail = np.repeat(g.e_cap[:, None], cols, axis=1)
        else:
            self.node_avail = np.full((g.n, cols), fill, dtype=np.int64)
            self.edge_avail = np.full((len(g.e_tail), cols), fill,
                                      dtype=np.int64)

    @classmethod
    def unconstrained(cls, g: BuildingGraph,
                      horizon_s: int) -> "CapacityLedger":
        return cls(g, horizon_s, fill=UNCONSTRAINED_CAPACITY)

    def node_avail_at(self, node_id: int, t: int) -> int:
        return int(self.node_avail[self.graph.index_of(node_id), t])

    def edge_avail_at(self, a: int, b: int, t: int) -> int:
        return int(self.edge_avail[self.graph.dedge_index[(a, b)], t])

    def copy(self) -> "CapacityLedger":
        dup = object.__new__(CapacityLedger)
        dup.graph = self.graph
        dup.horizon_s = self.horizon_s
        dup.node_avail = self.node_avail.copy()
        dup.edge_avail = self.edge_avail.copy()
        return dup


# -- reward -------------------------------------------------------------------


def reward(g: BuildingGraph, from_node: int, to_node: int, outcome: str,
           params: RewardParams) -> float:
    """Evaluate the action reward chain in order; exactly one branch fires."""
    if to_node != from_node and (from_node, to_node) not in g.dedge_index:
        raise ValueError(f"{from_node} and {to_node} are not adjacent")
    if outcome == "death":
        return -params.reward_max
    if outcome == "exit":
        return params.reward_max
    if to_node == from_node or g.nodes[to_node].hardness > g.nodes[from_node].hardness:
        return params.step_reward
    if g.exit_time[to_node] - g.exit_time[from_node] < 0:
        return params.step_reward
    return params.step_penalty


# -- footprints and reservations ------------------------------------------------


def route_footprint(g: BuildingGraph, route: Route):
    """Time-expanded cells a route occupies.

    Yields ('node', id, t) for every second spent at a node and
    ('edge', (a, b), t) for every booked edge second. Door edges book
    only their entry second; other edges book the full traversal.
    """
    steps = route.steps
    t = route.depart_t
    yield ("node", steps[0], t)
    cur = steps[0]
    for nxt in steps[1:]:
        if nxt == cur:
            t += 1
            yield ("node", cur, t)
            continue
        e = g.edge(cur, nxt)
        entry = t + 1
        if e.is_door:
            yield ("edge", (cur, nxt), entry)
        else:
            for s in range(entry, entry + e.sojourn_s):
                yield ("edge", (cur, nxt), s)
        t = entry + e.sojourn_s
        yield ("node", nxt, t)
        cur = nxt


def _footprint_indices(g: BuildingGraph, route: Route):
    node_cells: list[tuple[int, int]] = []
    edge_cells: list[tuple[int, int]] = []
    for kind, ent, t in route_footprint(g, route):
        if kind == "node":
            node_cells.append((g.index_of(ent), t))
        else:
            edge_cells.append((g.dedge_index[ent], t))
    return node_cells, edge_cells


def compute_maxsend(route: Route, ledger: CapacityLedger) -> int:
    """Widest bottleneck along the route's footprint; 0 means infeasible."""
    g = ledger.graph
    node_cells, edge_cells = _footprint_indices(g, route)
    last_t = max(t for _, t in node_cells)
    if last_t > ledger.horizon_s:
        raise ValueError(f"route runs past ledger horizon "
                         f"({last_t} > {ledger.horizon_s})")
    k = min(int(ledger.node_avail[i, t]) for i, t in node_cells)
    for e, t in edge_cells:
        k = min(k, int(ledger.edge_avail[e, t]))
    return max(k, 0)


def reserve_capacity(ledger: CapacityLedger, route: Route,
                     k: int) -> CapacityLedger:
    """Atomically subtract k along the route's footprint."""
    if k < 0:
        raise ValueError("reservation count must be non-negative")
    if k == 0:
        return ledger
    if k > compute_maxsend(route, ledger):
        raise ValueError(f"cannot reserve {k} along {route.steps}: "
                         f"exceeds available capacity")
    node_cells, edge_cells = _footprint_indices(ledger.graph, route)
    for i, t in node_cells:
        ledger.node_avail[i, t] -= k
    for e, t in edge_cells:
        ledger.edge_avail[e, t] -= k
    return ledger


# -- value iteration -------------------------------------------------------------


class _PlanContext:
    """Arrays shared by every value-iteration call of one planning pass.

    Harm probabilities and rewards depend only on (graph, harm, t0,
    params), not on the ledger, so they are computed once per pass.
    """

    def __init__(self, g: BuildingGraph, h: HarmField, t0: int,
                 params: PlannerParams):
        lookahead = min(params.window(t0), h.horizon_s - g.max_dur)
        if lookahead < 1:
            raise ValueError("no planning window left before the horizon")
        self.g = g
        self.t0 = t0
        self.params = params
        self.lookahead = lookahead
        m = len(g.e_tail)
        self.ph_stay = np.empty((g.n, lookahead))
        self.ph_move = np.empty((m, lookahead))
        _kernels.harm_prob_kernel(lookahead, h.harm, g.e_tail, g.e_head,
                                  g.e_dur, g.is_exit_arr,
                                  self.ph_stay, self.ph_move)
        # An evacuee who reached an exit is outside; the simulator stops
        # adjudicating them, so the exit rows carry no exposure even
        # though the diffusion field puts mass there.
        for v in range(g.n):
            if g.nodes[g.id_of(v)].kind == "exit":
                self.ph_stay[v, :] = 0.0
        rp = params.reward
        self.stay_reward = np.empty(g.n)
        for v in range(g.n):
            vid = g.id_of(v)
            self.stay_reward[v] = reward(g, vid, vid, "normal", rp)
        self.move_reward = np.empty(m)
        for e in range(m):
            a = g.id_of(int(g.e_tail[e]))
            b = g.id_of(int(g.e_head[e]))
            arrival = "exit" if g.nodes[b].kind == "exit" else "normal"
            self.move_reward[e] = reward(g, a, b, arrival, rp)
        self.penalty_max = float(rp.penalty_max)


def _run_vi(ctx: _PlanContext,
            ledger: CapacityLedger) -> tuple[np.ndarray, np.ndarray]:
    g = ctx.g
    L = ctx.lookahead
    if ledger.horizon_s < ctx.t0 + L:
        raise ValueError("ledger horizon shorter than the planning window")
    values = np.full((g.n, L + 1), -np.inf)
    values[:, L] = 0.0
    choices = np.full((g.n, L), -2, dtype=np.int64)
    _kernels.value_iteration_kernel(
        L, ctx.t0, g.adj_ptr, g.adj_eidx, g.e_head, g.e_dur,
        g.exit_time_arr, g.is_exit_arr, ledger.node_avail, ledger.edge_avail,
        ctx.ph_stay, ctx.ph_move, ctx.stay_reward, ctx.move_reward,
        ctx.penalty_max, values, choices)
    return values, choices


def _unroll(ctx: _PlanContext, values: np.ndarray, choices: np.ndarray,
            start: int) -> Route:
    g = ctx.g
    L = ctx.lookahead
    si = g.index_of(start)
    if not np.isfinite(values[si, 0]):
        raise NoFeasibleActionError(
            f"node {start} has no admissible action at t={ctx.t0}")
    steps = [start]
    cur = si
    tau = 0
    while (tau < L and not g.is_exit_arr[cur]
           and len(steps) < ctx.params.unroll_cap):
        c = int(choices[cur, tau])
        if c == -2:
            break
        if c == -1:
            tau += 1
        else:
            tau += int(g.e_dur[c]) + 1
            cur = int(g.e_head[c])
        steps.append(g.id_of(cur))
    return Route(steps=tuple(steps), depart_t=ctx.t0,
                 value=float(values[si, 0]))


def value_iteration(g: BuildingGraph, h: HarmField, ledger: CapacityLedger,
                    start: int, t0: int,
                    params: PlannerParams | None = None) -> Route:
    """Optimal route from start at t0 under the ledger's remaining capacity.

    Backward induction from the lookahead horizon; an action is
    admissible when the ledger still has room on the edge's first second
    and at the arrival node's arrival second (stay needs room at the
    node itself one second on). Raises NoFeasibleActionError when even
    staying is impossible, which tells the planner to defer the node.
    """
    if start not in g.nodes:
        raise ValueError(f"unknown start node {start}")
    params = params or PlannerParams()
    if t0 >= params.horizon_s:
        raise ValueError(f"t0={t0} is at or past the horizon")
    ctx = _PlanContext(g, h, t0, params)
    values, choices = _run_vi(ctx, ledger)
    return _unroll(ctx, values, choices, start)


# -- node ordering and the planning loop ------------------------------------------


def order_nodes(g: BuildingGraph, node_s: int) -> list[int]:
    """Non-exit nodes, nearest exits first, then nearest the shooter, then id."""
    if node_s not in g.nodes:
        raise ValueError(f"unknown shooter node {node_s}")
    dist_s = dijkstra_seconds(g, node_s)
    far = 1 << 60
    return sorted(
        (v for v in g.nodes if g.nodes[v].kind != "exit"),
        key=lambda v: (g.exit_time[v], dist_s.get(v, far), v))


def plan_ccasters(g: BuildingGraph, occupancy: dict[int, int], node_s: int,
                  params: PlannerParams | None = None, *, t0: int = 0,
                  harm: HarmField | None = None,
                  ledger: CapacityLedger | None = None) -> EvacuationPlan:
    """Assign capacity-feasible routes to every occupied node.

    Rounds of value iteration walk the node ordering; each chosen route
    reserves its footprint before the next node plans, so successive
    rounds at a crowded node discover progressively later departures.
    Nodes still holding evacuees after route_max rounds shelter in place
    and the plan is flagged incomplete.
    """
    params = params or PlannerParams()
    remaining: dict[int, int] = {}
    for v, c in occupancy.items():
        if v not in g.nodes:
            raise ValueError(f"occupancy names unknown node {v}")
        if c < 0:
            raise ValueError(f"negative occupancy at node {v}")
        if c > 0 and g.nodes[v].kind != "exit":
            remaining[v] = int(c)
    if not remaining:
        return EvacuationPlan(assignments={}, round_count=0, t0=t0)

    if harm is None:
        field_ = propagate_location(g, node_s, params.window(t0) + g.max_dur)
        harm = smear_harm(field_)
    ctx = _PlanContext(g, harm, t0, params)
    if ledger is None:
        ledger = CapacityLedger(g, horizon_s=t0 + ctx.lookahead + g.max_dur)

    order = [v for v in order_nodes(g, node_s) if v in remaining]
    assignments: dict[int, list[tuple[Route, int]]] = {v: [] for v in order}
    rounds_used = 0
    for _ in range(params.route_max):
        if not remaining:
            break
        assigned_this_round = 0
        for v in order:
            if remaining.get(v, 0) <= 0:
                continue
            try:
                values, choices = _run_vi(ctx, ledger)
                route = _unroll(ctx, values, choices, v)
            except NoFeasibleActionError:
                continue
            cap = compute_maxsend(route, ledger)
            if cap <= 0:
                continue
            k = min(cap, remaining[v])
            reserve_capacity(ledger, route, k)
            assignments[v].append((replace(route, maxsend=cap), k))
            remaining[v] -= k
            if remaining[v] <= 0:
                del remaining[v]
            assigned_this_round += k
        rounds_used += 1
        if assigned_this_round == 0:
            break

    complete = not remaining
    for v, c in sorted(remaining.items()):
        shelter = Route(steps=(v,), depart_t=t0)
        assignments.setdefault(v, []).append((shelter, c))
    assignments = {v: routes for v, routes in assignments.items() if routes}
    return EvacuationPlan(assignments=assignments, round_count=rounds_used,
                          t0=t0, complete=complete)
