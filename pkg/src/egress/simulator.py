"""Seeded discrete-event simulation of an evacuation under threat.

Time advances in whole seconds. Each second the engine adjudicates
casualties and line-of-sight exposure from the current positions,
records metrics, replans when the policy asks for it, then moves the
shooter and the evacuees into the next second. Movement follows the
same timeline convention as the planner's capacity ledger: an agent
committing to an edge at second t occupies the edge from t+1 for the
edge's sojourn and lands on the far node one second after the edge's
last occupied second.

Nodes and directed edges are guarded by FIFO token pools. Door edges
admit up to their per-second throughput and release those tokens after
one second while travelers finish crossing in virtual slots; other
edges hold a token for the whole traversal. An evacuee whose arrival
node is full waits on the edge without losing queue position.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .baselines import (NaturalResponseParams, plan_naive_bulk,
                        plan_natural_response)
from .building_graph import BuildingGraph, load_environment, shortest_path
from .planner import (CapacityLedger, PlannerParams, RewardParams, Route,
                      plan_ccasters, route_footprint)
from .threat import propagate_location, smear_harm

__all__ = [
    "ScenarioConfig",
    "Resource",
    "ShooterState",
    "SimTrace",
    "SimResult",
    "PlannerFailure",
    "run_simulation",
    "shooter_choose_target",
    "shooter_step",
    "adjudicate",
    "collect_metrics",
]

PLANNERS = ("ccasters", "naive_asters", "natural_response")
DISTRIBUTIONS = ("rooms_only", "rooms_and_halls")
REPLAN_POLICIES = ("on_shooter_node_change", "every_k_seconds")

CASUALTY_HOPS = 3
SHOOTER_DWELL_S = 5


@dataclass
class ScenarioConfig:
    environment: str
    shooter_spawn: int
    evacuee_distribution: str = "rooms_only"
    evacuees_per_node: int = 10
    planner: str = "ccasters"
    reward_max: float = 10.0
    seed: int = 1
    horizon_s: int = 300
    replan_policy: str = "on_shooter_node_change"
    replan_k: int = 10
    d_threshold: int = 7
    route_max: int = 5
    lookahead_s: int | None = None
    record_traces: bool = False

    def check(self, g: BuildingGraph) -> None:
        if self.planner not in PLANNERS:
            raise ValueError(f"invalid config: unknown planner {self.planner!r}")
        if self.evacuee_distribution not in DISTRIBUTIONS:
            raise ValueError(f"invalid config: unknown distribution "
                             f"{self.evacuee_distribution!r}")
        if self.replan_policy not in REPLAN_POLICIES:
            raise ValueError(f"invalid config: unknown replan policy "
                             f"{self.replan_policy!r}")
        if self.shooter_spawn not in g.nodes:
            raise ValueError(f"invalid config: shooter_spawn "
                             f"{self.shooter_spawn} not in environment")
        if self.evacuees_per_node < 0:
            raise ValueError("invalid config: evacuees_per_node negative")
        if self.horizon_s < 0 or self.horizon_s > 300:
            raise ValueError("invalid config: horizon_s outside 0..300")
        if self.replan_policy == "every_k_seconds" and self.replan_k < 1:
            raise ValueError("invalid config: replan_k must be positive")


class Resource:
    """FIFO token pool for one node or one directed edge."""

    __slots__ = ("key", "max_tokens", "held", "queue", "queued")

    def __init__(self, key, max_tokens: int):
        self.key = key
        self.max_tokens = max_tokens
        self.held: set[int] = set()
        self.queue: deque[int] = deque()
        self.queued: set[int] = set()

    def _prune(self) -> None:
        while self.queue and self.queue[0] not in self.queued:
            self.queue.popleft()

    def try_grant(self, agent: int) -> bool:
        """Grant a token iff capacity is free and nobody is queued ahead."""
        self._prune()
        if len(self.held) < self.max_tokens and (
                not self.queue or self.queue[0] == agent):
            if self.queue and self.queue[0] == agent:
                self.queue.popleft()
            self.queued.discard(agent)
            self.held.add(agent)
            return True
        if agent not in self.queued:
            self.queue.append(agent)
            self.queued.add(agent)
        return False

    def release(self, agent: int) -> None:
        self.held.discard(agent)

    def leave_queue(self, agent: int) -> None:
        self.queued.discard(agent)


@dataclass
class ShooterState:
    """Shooter position, itinerary, and private random stream."""
    g: BuildingGraph
    rng: object
    node: int | None
    edge: tuple[int, int] | None = None
    entry_t: int = 0
    final_t: int = 0
    arrive_t: int = 0
    target: int | None = None
    path: list[int] = field(default_factory=list)
    dwell_last: int = -1
    visited: set[int] = field(default_factory=set)
    idle: bool = False

    def adjudication_node(self, t: int) -> int:
        """Current node, or the edge origin until its final occupied second."""
        if self.node is not None:
            return self.node
        return self.edge[0] if t < self.final_t else self.edge[1]


def shooter_choose_target(g: BuildingGraph, current: int, visited: set[int],
                          rng) -> int:
    """Sample an unvisited room, nearer rooms more likely.

    Weights are 1 / (1 + travel seconds from the current node). Raises
    ValueError when every room has been visited.
    """
    from .building_graph import dijkstra_seconds
    dist = dijkstra_seconds(g, current)
    rooms = [v for v in sorted(g.nodes)
             if g.nodes[v].kind == "room" and v not in visited]
    if not rooms:
        raise ValueError("all rooms visited")
    weights = [1.0 / (1.0 + dist[v]) for v in rooms]
    total = sum(weights)
    draw = rng.random() * total
    acc = 0.0
    for v, w in zip(rooms, weights):
        acc += w
        if draw < acc:
            return v
    return rooms[-1]


def shooter_step(g: BuildingGraph, state: ShooterState, t: int) -> ShooterState:
    """Advance the shooter from second t into second t+1.

    Mid-edge the shooter is committed. Arriving at the target starts a
    five second dwell; the next leg is committed on the dwell's last
    node second so the edge entry lands exactly five seconds after
    arrival. With no unvisited rooms left the shooter goes idle.
    """
    if state.idle:
        return state
    if state.edge is not None:
        if t + 1 >= state.arrive_t:
            state.node = state.edge[1]
            state.edge = None
            if state.node == state.target:
                state.visited.add(state.node)
                state.target = None
                state.dwell_last = state.arrive_t + SHOOTER_DWELL_S - 1
        return state
    if state.target is None:
        if t < state.dwell_last:
            return state
        try:
            state.target = shooter_choose_target(g, state.node,
                                                 state.visited, state.rng)
        except ValueError:
            state.idle = True
            return state
        state.path = shortest_path(g, state.node, state.target)[0][1:]
    nxt = state.path.pop(0)
    e = g.edge(state.node, nxt)
    state.edge = (state.node, nxt)
    state.entry_t = t + 1
    state.final_t = t + e.sojourn_s
    state.arrive_t = t + 1 + e.sojourn_s
    state.node = None
    return state


def adjudicate(g: BuildingGraph, evac_pos, shooter_pos) -> str:
    """Classify one evacuee second: 'casualty', 'in_los', or 'safe'.

    Positions are ('node', id) or ('edge', (a, b), adjudication_node).
    Sharing a node or an undirected edge with the shooter is always a
    casualty; otherwise harm requires line of sight from the shooter's
    adjudication node and a hop distance of at most three.
    """
    def parts(pos):
        if pos[0] == "node":
            return None, pos[1]
        return tuple(sorted(pos[1])), pos[2]

    e_edge, e_node = parts(evac_pos)
    s_edge, s_node = parts(shooter_pos)
    if e_edge is None and s_edge is None and e_node == s_node:
        return "casualty"
    if e_edge is not None and e_edge == s_edge:
        return "casualty"
    ei = g.index_of(e_node)
    si = g.index_of(s_node)
    if g.los_mat[si, ei]:
        if g.hop[si, ei] <= CASUALTY_HOPS:
            return "casualty"
        return "in_los"
    return "safe"


# -- trace and result ----------------------------------------------------------


@dataclass
class SimTrace:
    """Raw per-second tallies recorded by the engine."""
    initial_count: int
    horizon_s: int
    node_ids: list[int]
    casualties_at: np.ndarray
    escapes_at: np.ndarray
    in_los_at: np.ndarray
    occupancy: np.ndarray
    events: list = field(default_factory=list)
    ended_at: int | None = None


@dataclass
class SimResult:
    initial_count: int
    horizon_s: int
    casualties: int
    escapes: int
    remaining: int
    los_seconds_total: int
    casualties_series: np.ndarray
    escapes_series: np.ndarray
    remaining_series: np.ndarray
    occupancy_series: np.ndarray
    node_ids: list[int]
    agent_traces: list
    ended_at: int | None = None

    def occupancy_of(self, node_id: int) -> np.ndarray:
        return self.occupancy_series[:, self.node_ids.index(node_id)]


class PlannerFailure(RuntimeError):
    """Planner raised mid-run; carries the metrics gathered so far."""

    def __init__(self, message: str, partial: SimResult):
        super().__init__(message)
        self.partial = partial


def collect_metrics(trace: SimTrace) -> SimResult:
    """Fold per-second tallies into totals and cumulative series."""
    cas = np.cumsum(trace.casualties_at)
    esc = np.cumsum(trace.escapes_at)
    rem = trace.initial_count - cas - esc
    return SimResult(
        initial_count=trace.initial_count,
        horizon_s=trace.horizon_s,
        casualties=int(cas[-1]),
        escapes=int(esc[-1]),
        remaining=int(rem[-1]),
        los_seconds_total=int(trace.in_los_at.sum()),
        casualties_series=cas,
        escapes_series=esc,
        remaining_series=rem,
        occupancy_series=trace.occupancy,
        node_ids=list(trace.node_ids),
        agent_traces=list(trace.events),
        ended_at=trace.ended_at,
    )


# -- evacuee agents -------------------------------------------------------------

AT_NODE = 0
ON_EDGE = 1
ESCAPED = 2
DEAD = 3


class _Evacuee:
    __slots__ = ("id", "state", "node", "route", "step", "edge",
                 "entry_t", "final_t", "arrive_t", "holds_edge_token",
                 "queued_on", "acted", "sheltered")

    def __init__(self, aid: int, node: int):
        self.id = aid
        self.state = AT_NODE
        self.node = node
        self.route: tuple[int, ...] | None = None
        self.step = 0
        self.edge: tuple[int, int] | None = None
        self.entry_t = 0
        self.final_t = 0
        self.arrive_t = 0
        self.holds_edge_token = False
        self.queued_on = None
        self.acted = False
        self.sheltered = False

    def adjudication_node(self, t: int) -> int:
        if self.state == AT_NODE:
            return self.node
        return self.edge[0] if t < self.final_t else self.edge[1]


class _Engine:
    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.g = load_environment(cfg.environment)
        cfg.check(self.g)
        g = self.g
        self.horizon = cfg.horizon_s

        kinds = {"room"} if cfg.evacuee_distribution == "rooms_only" \
            else {"room", "hall"}
        self.agents: list[_Evacuee] = []
        aid = 1
        for v in sorted(g.nodes):
            if g.nodes[v].kind in kinds:
                for _ in range(cfg.evacuees_per_node):
                    self.agents.append(_Evacuee(aid, v))
                    aid += 1
        self.initial_count = len(self.agents)

        self.node_res = {v: Resource(("node", v), g.nodes[v].max_occupancy)
                         for v in g.nodes}
        self.edge_res: dict[tuple[int, int], Resource] = {}
        self.door_res: list[Resource] = []
        for i in range(len(g.e_tail)):
            a = g.id_of(int(g.e_tail[i]))
            b = g.id_of(int(g.e_head[i]))
            cap = int(g.e_throughput[i]) if g.e_is_door[i] else int(g.e_cap[i])
            r = Resource(("edge", a, b), cap)
            self.edge_res[(a, b)] = r
            if g.e_is_door[i]:
                self.door_res.append(r)
        for ev in self.agents:
            self.node_res[ev.node].held.add(ev.id)

        spawn = cfg.shooter_spawn
        in_room = g.nodes[spawn].kind == "room"
        # Spawning inside a room counts as arriving there: the opening
        # dwell runs before the first leg, same as any later room visit.
        self.shooter = ShooterState(g=g, rng=rngmod.split(cfg.seed, "shooter"),
                                    node=spawn,
                                    visited={spawn} if in_room else set(),
                                    dwell_last=SHOOTER_DWELL_S - 1
                                    if in_room else -1)

        self.planner_params = PlannerParams(
            reward=RewardParams(reward_max=cfg.reward_max),
            lookahead_s=cfg.lookahead_s, route_max=cfg.route_max,
            horizon_s=cfg.horizon_s if cfg.horizon_s > 0 else 300)
        self.nr_params = NaturalResponseParams(d_threshold=cfg.d_threshold)
        self._nr_memo: dict[tuple[int, int], tuple[int, ...]] = {}
        self._naive_ledger = CapacityLedger.unconstrained(
            g, horizon_s=2 * self.horizon + g.max_dur)

        T = self.horizon
        self.trace = SimTrace(
            initial_count=self.initial_count, horizon_s=T,
            node_ids=[g.id_of(i) for i in range(g.n)],
            casualties_at=np.zeros(T + 1, dtype=np.int64),
            escapes_at=np.zeros(T + 1, dtype=np.int64),
            in_los_at=np.zeros(T + 1, dtype=np.int64),
            occupancy=np.zeros((T + 1, g.n), dtype=np.int64))
        self.node_count = np.zeros(g.n, dtype=np.int64)
        for ev in self.agents:
            self.node_count[g.index_of(ev.node)] += 1
        self.active: list[_Evacuee] = list(self.agents)
        self.prev_shooter_node: int | None = None

    # -- trace helpers --

    def _log(self, t: int, aid: int, kind: str, detail) -> None:
        if self.cfg.record_traces:
            self.trace.events.append((t, aid, kind, detail))

    def _request(self, res: Resource, ev: _Evacuee, t: int) -> bool:
        fresh = ev.id not in res.queued and ev.id not in res.held
        granted = res.try_grant(ev.id)
        if fresh:
            self._log(t, ev.id, "request", res.key)
        if granted:
            ev.queued_on = None
            self._log(t, ev.id, "grant", res.key)
        else:
            ev.queued_on = res
        return granted

    # -- per-second phases --

    def _adjudicate_all(self, t: int) -> None:
        g = self.g
        s_adj = g.index_of(self.shooter.adjudication_node(t))
        s_edge = None
        if self.shooter.edge is not None and self.shooter.entry_t <= t:
            s_edge = tuple(sorted(self.shooter.edge))
        survivors: list[_Evacuee] = []
        deaths = 0
        in_los = 0
        for ev in self.active:
            ei = g.index_of(ev.adjudication_node(t))
            dead = False
            if ev.state == ON_EDGE and s_edge is not None \
                    and tuple(sorted(ev.edge)) == s_edge:
                dead = True
            elif ev.state == AT_NODE and self.shooter.node is not None \
                    and ev.node == self.shooter.node:
                dead = True
            elif g.los_mat[s_adj, ei]:
                if g.hop[s_adj, ei] <= CASUALTY_HOPS:
                    dead = True
                else:
                    in_los += 1
            if dead:
                deaths += 1
                where = ev.node if ev.state == AT_NODE else ev.edge
                self._remove(ev, t, died=True,
                             detail=(where, g.id_of(s_adj), int(g.hop[s_adj, ei])))
            else:
                survivors.append(ev)
        self.active = survivors
        self.trace.casualties_at[t] += deaths
        self.trace.in_los_at[t] += in_los

    def _remove(self, ev: _Evacuee, t: int, died: bool, detail=None) -> None:
        g = self.g
        if ev.state == AT_NODE:
            self.node_res[ev.node].release(ev.id)
            self.node_count[g.index_of(ev.node)] -= 1
        elif ev.state == ON_EDGE and ev.holds_edge_token:
            self.edge_res[ev.edge].release(ev.id)
        if ev.queued_on is not None:
            ev.queued_on.leave_queue(ev.id)
            ev.queued_on = None
        ev.state = DEAD if died else ESCAPED
        self._log(t, ev.id, "death" if died else "escape", detail)

    def _record_occupancy(self, t: int) -> None:
        self.trace.occupancy[t] = self.node_count

    def _should_replan(self, t: int, shooter_node: int) -> bool:
        if t == 0:
            return True
        if self.cfg.replan_policy == "every_k_seconds":
            return t % self.cfg.replan_k == 0
        return shooter_node != self.prev_shooter_node

    def _dwell_hold(self, t: int, seen: int) -> int:
        """Seconds the observed node stays occupied before the walk starts.

        A shooter reported at a room sits out the rest of the dwell; one
        reported on the final approach to a target room has the whole
        dwell ahead. Anything else diffuses immediately.
        """
        s = self.shooter
        if self.g.nodes[seen].kind != "room":
            return 0
        if s.node == seen and s.dwell_last > t:
            return s.dwell_last - t
        if s.edge is not None and s.edge[1] == seen and s.target == seen:
            return s.arrive_t + SHOOTER_DWELL_S - 1 - t
        return 0

    def _seeded_ledger(self, t: int) -> CapacityLedger:
        """Fresh ledger minus the footprints of evacuees already in transit.

        A replan reroutes the people standing at nodes; anyone mid-edge
        keeps their old schedule, so its remaining cells must read as
        taken or the new plan books strangers into the same seconds.
        Cells may go negative where execution already drifted past the
        old bookings; the planner only tests for room left.
        """
        g = self.g
        horizon = t + self.planner_params.window(t) + g.max_dur
        ledger = CapacityLedger(g, horizon_s=horizon)
        for ev in self.active:
            if ev.state != ON_EDGE:
                continue
            a, b = ev.edge
            if not g.edge(a, b).is_door:
                ei = g.dedge_index[(a, b)]
                for s in range(max(t + 1, ev.entry_t), ev.final_t + 1):
                    ledger.edge_avail[ei, s] -= 1
            tail = Route(steps=ev.route[ev.step + 1:], depart_t=ev.arrive_t)
            for kind, key, s in route_footprint(g, tail):
                if s > horizon:
                    break
                if kind == "node":
                    ledger.node_avail[g.index_of(key), s] -= 1
                else:
                    ledger.edge_avail[g.dedge_index[key], s] -= 1
        return ledger

    def _replan(self, t: int, shooter_node: int) -> None:
        cfg = self.cfg
        g = self.g
        at_node = [ev for ev in self.active if ev.state == AT_NODE]
        if not at_node:
            return
        if cfg.planner == "natural_response":
            for ev in at_node:
                # Someone who went to ground stays there; the heuristic
                # only redirects people still trying to get out.
                if ev.sheltered:
                    continue
                key = (ev.node, shooter_node)
                steps = self._nr_memo.get(key)
                if steps is None:
                    steps = plan_natural_response(
                        g, ev.node, shooter_node, self.nr_params).steps
                    self._nr_memo[key] = steps
                self._assign(ev, steps)
                if (g.hop_distance(ev.node, shooter_node)
                        < self.nr_params.d_threshold):
                    ev.sheltered = True
            return
        lookahead = self.planner_params.window(t)
        if lookahead < 1:
            return
        harm = smear_harm(propagate_location(
            g, shooter_node, lookahead + g.max_dur,
            hold_s=self._dwell_hold(t, shooter_node)))
        if cfg.planner == "naive_asters":
            nodes = sorted({ev.node for ev in at_node})
            routes = plan_naive_bulk(g, harm, t, nodes, self.planner_params,
                                     self._naive_ledger)
            for ev in at_node:
                self._assign(ev, routes[ev.node].steps)
            return
        occupancy: dict[int, int] = {}
        for ev in at_node:
            occupancy[ev.node] = occupancy.get(ev.node, 0) + 1
        plan = plan_ccasters(g, occupancy, shooter_node, self.planner_params,
                             t0=t, harm=harm, ledger=self._seeded_ledger(t))
        import os
        if os.environ.get("EGRESS_DEBUG_T") == str(t):
            print(f"[debug] t={t} seen={shooter_node} "
                  f"hold={self._dwell_hold(t, shooter_node)}")
            for v in sorted(plan.assignments):
                for route, k in plan.assignments[v]:
                    print(f"[debug]   node {v:3d} k={k} v={route.value:8.1f} "
                          f"{route.steps[:14]}")
        for v, routes in plan.assignments.items():
            takers = [ev for ev in at_node if ev.node == v]
            i = 0
            for route, k in routes:
                for ev in takers[i:i + k]:
                    self._assign(ev, route.steps)
                i += k

    def _assign(self, ev: _Evacuee, steps: tuple[int, ...]) -> None:
        if ev.queued_on is not None:
            ev.queued_on.leave_queue(ev.id)
            ev.queued_on = None
        ev.route = steps
        ev.step = 0

    def _evacuee_phase(self, t: int) -> None:
        g = self.g
        for r in self.door_res:
            r.held.clear()
        for ev in self.active:
            ev.acted = False
        progressed = True
        while progressed:
            progressed = False
            for ev in self.active:
                if ev.acted:
                    continue
                if ev.state == ON_EDGE:
                    if t + 1 < ev.arrive_t:
                        ev.acted = True
                        continue
                    dest = ev.edge[1]
                    if self._request(self.node_res[dest], ev, t):
                        if ev.holds_edge_token:
                            self.edge_res[ev.edge].release(ev.id)
                            ev.holds_edge_token = False
                        ev.state = AT_NODE
                        ev.node = dest
                        ev.edge = None
                        ev.step += 1
                        ev.acted = True
                        progressed = True
                        if g.nodes[dest].kind == "exit":
                            self._escape(ev, t + 1)
                        else:
                            self.node_count[g.index_of(dest)] += 1
                    continue
                # at a node
                if ev.route is None or ev.step >= len(ev.route) - 1:
                    ev.acted = True
                    continue
                nxt = ev.route[ev.step + 1]
                if nxt == ev.node:
                    ev.step += 1
                    ev.acted = True
                    continue
                if (ev.node, nxt) not in self.edge_res:
                    ev.acted = True  # stale route after a reroute; idle
                    continue
                res = self.edge_res[(ev.node, nxt)]
                if self._request(res, ev, t):
                    self.node_res[ev.node].release(ev.id)
                    self.node_count[g.index_of(ev.node)] -= 1
                    d = g.edge(ev.node, nxt).sojourn_s
                    ev.edge = (ev.node, nxt)
                    ev.entry_t = t + 1
                    ev.final_t = t + d
                    ev.arrive_t = t + 1 + d
                    ev.holds_edge_token = not g.edge(ev.node, nxt).is_door
                    ev.state = ON_EDGE
                    ev.node = None
                    ev.acted = True
                    progressed = True
        self.active = [ev for ev in self.active if ev.state != ESCAPED]

    def _escape(self, ev: _Evacuee, t_arrival: int) -> None:
        self.node_res[ev.node].release(ev.id)
        ev.state = ESCAPED
        if ev.queued_on is not None:
            ev.queued_on.leave_queue(ev.id)
            ev.queued_on = None
        slot = min(t_arrival, self.horizon)
        self.trace.escapes_at[slot] += 1
        self._log(t_arrival, ev.id, "escape", None)

    def _assert_capacity(self, t: int) -> None:
        g = self.g
        for v in g.nodes:
            if self.node_count[g.index_of(v)] > g.nodes[v].max_occupancy:
                raise AssertionError(
                    f"node {v} over capacity at t={t}")
        edge_bodies: dict[tuple[int, int], int] = {}
        door_entries: dict[tuple[int, int], int] = {}
        for ev in self.active:
            if ev.state != ON_EDGE:
                continue
            e = self.g.edge(*ev.edge)
            if e.is_door:
                if ev.entry_t == t:
                    door_entries[ev.edge] = door_entries.get(ev.edge, 0) + 1
            else:
                edge_bodies[ev.edge] = edge_bodies.get(ev.edge, 0) + 1
        for (a, b), n in edge_bodies.items():
            if n > self.g.edge(a, b).capacity:
                raise AssertionError(f"edge {a}->{b} over capacity at t={t}")
        for (a, b), n in door_entries.items():
            if n > self.g.edge(a, b).throughput_per_s:
                raise AssertionError(f"door {a}->{b} over throughput at t={t}")

    def run(self) -> SimResult:
        t = 0
        while True:
            self._record_occupancy(t)
            self._log(t, -1, "shooter",
                      (self.shooter.adjudication_node(t), self.shooter.node))
            self._adjudicate_all(t)
            self._assert_capacity(t)
            if not self.active or t >= self.horizon:
                self.trace.ended_at = t
                break
            # Step the shooter before planning: routes price the position
            # the monitoring system reports, not the one he just left.
            shooter_step(self.g, self.shooter, t)
            seen = self.shooter.adjudication_node(t + 1)
            try:
                if self._should_replan(t, seen):
                    self._replan(t, seen)
            except Exception as err:
                raise PlannerFailure(
                    f"planner failed at t={t}: {err}",
                    collect_metrics(self.trace)) from err
            self.prev_shooter_node = seen
            self._evacuee_phase(t)
            t += 1
        return collect_metrics(self.trace)


def run_simulation(cfg: ScenarioConfig) -> SimResult:
    """Run one scenario to completion; deterministic in (cfg, seed)."""
    return _Engine(cfg).run()
