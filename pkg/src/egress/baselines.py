"""Comparison planners.

Naive planning is the same value iteration as the capacity-aware
planner but against a ledger with effectively infinite capacity, so
every node's evacuees pile onto the single globally optimal route.
Natural response is a rule-of-thumb model of untrained behavior: run
for an exit that does not lead toward the shooter when the shooter is
far, hide in the nearest room when the shooter is close.
"""
from __future__ import annotations

from dataclasses import dataclass

from .building_graph import BuildingGraph, shortest_path
from .planner import (CapacityLedger, PlannerParams, Route, _PlanContext,
                      _run_vi, _unroll)
from .threat import HarmField

__all__ = [
    "NaturalResponseParams",
    "plan_naive_asters",
    "plan_naive_bulk",
    "plan_natural_response",
]


@dataclass
class NaturalResponseParams:
    d_threshold: int = 7


def plan_naive_bulk(g: BuildingGraph, h: HarmField, t0: int,
                    starts: list[int],
                    params: PlannerParams | None = None,
                    ledger: CapacityLedger | None = None) -> dict[int, Route]:
    """Uncapacitated optimal routes for many start nodes at once.

    The value table ignores occupancy, so one backward induction serves
    every start node; only the greedy unroll differs.
    """
    params = params or PlannerParams()
    ctx = _PlanContext(g, h, t0, params)
    if ledger is None:
        ledger = CapacityLedger.unconstrained(
            g, horizon_s=t0 + ctx.lookahead + g.max_dur)
    values, choices = _run_vi(ctx, ledger)
    return {v: _unroll(ctx, values, choices, v) for v in starts}


def plan_naive_asters(g: BuildingGraph, h: HarmField, start: int, t0: int,
                      params: PlannerParams | None = None) -> Route:
    """Optimal route pretending capacity never binds."""
    if start not in g.nodes:
        raise ValueError(f"unknown start node {start}")
    return plan_naive_bulk(g, h, t0, [start], params)[start]


def plan_natural_response(g: BuildingGraph, evac_node: int, shooter_node: int,
                          params: NaturalResponseParams | None = None,
                          *, t0: int = 0) -> Route:
    """Run-or-hide heuristic for one evacuee.

    With the shooter at least d_threshold hops away, head for the
    nearest exit whose route does not start by closing the hop distance
    (ties: the exit whose first step backs off furthest, then lowest
    id). A dead-end room has no such route, since its only move closes
    the distance by one; people still flee, so the filter relaxes to
    the nearest exit under the same tie-break. Closer than that, stay
    hidden if already in a room, otherwise slip into the nearest
    adjacent room, or freeze when there is none.
    """
    p = params or NaturalResponseParams()
    if evac_node not in g.nodes or shooter_node not in g.nodes:
        raise ValueError("unknown node for natural response")
    if g.nodes[evac_node].kind == "exit":
        return Route(steps=(evac_node,), depart_t=t0)
    d = g.hop_distance(evac_node, shooter_node)
    if d >= p.d_threshold:
        admissible = None
        fallback = None
        for x in g.exits:
            try:
                path, secs = shortest_path(g, evac_node, x)
            except ValueError:
                continue
            first_d = g.hop_distance(path[1], shooter_node)
            key = (secs, -first_d, x)
            if fallback is None or key < fallback[0]:
                fallback = (key, path)
            if first_d < d:
                continue
            if admissible is None or key < admissible[0]:
                admissible = (key, path)
        chosen = admissible or fallback
        if chosen is not None:
            return Route(steps=tuple(chosen[1]), depart_t=t0)
        return Route(steps=(evac_node,), depart_t=t0)
    if g.nodes[evac_node].kind == "room":
        return Route(steps=(evac_node,), depart_t=t0)
    rooms = [(g.edge(evac_node, w).sojourn_s, w)
             for w in g.adjacency[evac_node] if g.nodes[w].kind == "room"]
    if not rooms:
        return Route(steps=(evac_node,), depart_t=t0)
    _, room = min(rooms)
    return Route(steps=(evac_node, room), depart_t=t0)
