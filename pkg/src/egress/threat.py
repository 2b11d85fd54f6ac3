"""Shooter threat model: location propagation and harm fields.

The shooter's whereabouts are tracked as a probability mass over nodes
and directed edges. From a known location the mass diffuses as a lazy
random walk: each second the mass sitting at a node splits evenly
between staying and committing to each incident edge, and committed
mass walks the edge for its sojourn time before arriving at the far
node. Harm then smears each node's peak mass across everything in its
line of sight, because being seen matters more than being near.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .building_graph import BuildingGraph

__all__ = [
    "LocationField",
    "HarmField",
    "propagate_location",
    "smear_harm",
    "transition_harm_probability",
]


@dataclass
class LocationField:
    """Shooter presence mass per second.

    node_mass[t, i] indexes nodes by position (id - 1); edge_mass[t, e]
    indexes directed edges in the graph's sorted order. Total mass is
    conserved at 1 for every second.
    """
    graph: BuildingGraph
    horizon_s: int
    node_mass: np.ndarray
    edge_mass: np.ndarray

    def mass(self, t: int, entity) -> float:
        """Mass at second t for a node id or an (a, b) directed edge."""
        if isinstance(entity, tuple):
            return float(self.edge_mass[t, self.graph.dedge_index[entity]])
        return float(self.node_mass[t, self.graph.index_of(entity)])

    def edge_total(self, t: int, a: int, b: int) -> float:
        """Combined mass moving either way on the edge between a and b."""
        return (float(self.edge_mass[t, self.graph.dedge_index[(a, b)]]) +
                float(self.edge_mass[t, self.graph.dedge_index[(b, a)]]))

    def total(self, t: int) -> float:
        return float(self.node_mass[t].sum() + self.edge_mass[t].sum())

    def write_csv(self, path) -> None:
        g = self.graph
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["entity"] + list(range(self.horizon_s + 1)))
            for i in range(g.n):
                w.writerow([f"N{g.id_of(i)}"] +
                           [f"{v:.6f}" for v in self.node_mass[:, i]])
            for e in range(len(g.e_tail)):
                a = g.id_of(int(g.e_tail[e]))
                b = g.id_of(int(g.e_head[e]))
                w.writerow([f"E{a}->{b}"] +
                           [f"{v:.6f}" for v in self.edge_mass[:, e]])


@dataclass
class HarmField:
    """Per-node probability of harm per second, clamped to [0, 1]."""
    graph: BuildingGraph
    horizon_s: int
    harm: np.ndarray  # (horizon_s + 1, n)

    def at(self, t: int, node_id: int) -> float:
        return float(self.harm[t, self.graph.index_of(node_id)])

    def write_csv(self, path) -> None:
        g = self.graph
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node"] + list(range(self.horizon_s + 1)))
            for i in range(g.n):
                w.writerow([f"N{g.id_of(i)}"] +
                           [f"{v:.6f}" for v in self.harm[:, i]])


def propagate_location(g: BuildingGraph, node_s: int, horizon_s: int,
                       hold_s: int = 0) -> LocationField:
    """Diffuse unit mass from the shooter's node over horizon_s seconds.

    hold_s pins the mass at node_s for that many leading seconds before
    the walk starts. A shooter seen entering a room stays through the
    dwell, so the field should not leak into the corridor until the
    earliest second a departure is possible.
    """
    if node_s not in g.nodes:
        raise ValueError(f"unknown shooter node {node_s}")
    if horizon_s < 0:
        raise ValueError("horizon_s must be non-negative")
    m = len(g.e_tail)
    hold = min(max(hold_s, 0), horizon_s)
    steps = horizon_s - hold
    node_mass = np.zeros((horizon_s + 1, g.n))
    slot_mass = np.zeros((horizon_s + 1, g.total_slots))
    tail_node = np.zeros((steps + 1, g.n))
    tail_slot = np.zeros((steps + 1, g.total_slots))
    tail_node[0, g.index_of(node_s)] = 1.0
    _kernels.propagate_kernel(steps, g.adj_ptr, g.adj_eidx, g.e_head,
                              g.e_dur, g.slot_off, tail_node, tail_slot)
    node_mass[: hold + 1, g.index_of(node_s)] = 1.0
    node_mass[hold:] = tail_node
    slot_mass[hold:] = tail_slot
    edge_mass = np.add.reduceat(slot_mass, g.slot_off[:-1], axis=1) \
        if m else np.zeros((horizon_s + 1, 0))
    return LocationField(graph=g, horizon_s=horizon_s,
                         node_mass=node_mass, edge_mass=edge_mass)


def smear_harm(field: LocationField) -> HarmField:
    """Project location mass into per-node harm via line of sight.

    A node's own threat level is the max of its node mass and the mass on
    any incident directed edge. Harm at n is the highest threat level of
    any node that can see n.
    """
    g = field.graph
    tmax = field.horizon_s
    threat = field.node_mass.copy()
    if len(g.e_tail):
        incident = field.edge_mass[:, g.inc_eidx]
        for v in range(g.n):
            lo, hi = g.inc_ptr[v], g.inc_ptr[v + 1]
            if hi > lo:
                np.maximum(threat[:, v], incident[:, lo:hi].max(axis=1),
                           out=threat[:, v])
    harm = np.zeros_like(threat)
    for t in range(tmax + 1):
        contrib = np.where(g.los_mat, threat[t][:, None], 0.0)
        harm[t] = contrib.max(axis=0)
    np.clip(harm, 0.0, 1.0, out=harm)
    return HarmField(graph=g, horizon_s=tmax, harm=harm)


def transition_harm_probability(h: HarmField, from_node: int, to_node: int,
                                depart_t: int) -> float:
    """Probability of encountering harm while taking one action at depart_t.

    Staying exposes the evacuee to the origin's harm for one second.
    Moving exposes it to the origin for the departure second, then for
    each second on the edge to the worse of the two endpoint harms.
    Computed as one minus the product of per-second survival, in second
    order, exactly as the planner kernel does.
    """
    g = h.graph
    if from_node == to_node:
        if depart_t + 1 > h.horizon_s + 1:
            raise ValueError("departure beyond harm field horizon")
        return 1.0 - (1.0 - h.harm[depart_t, g.index_of(from_node)])
    if (from_node, to_node) not in g.dedge_index:
        raise ValueError(f"no edge from {from_node} to {to_node}")
    d = g.edge(from_node, to_node).sojourn_s
    if depart_t + d > h.horizon_s:
        raise ValueError("transition runs past harm field horizon")
    a = g.index_of(from_node)
    b = g.index_of(to_node)
    surv = 1.0 - h.harm[depart_t, a]
    for s in range(depart_t + 1, depart_t + d + 1):
        surv *= 1.0 - max(h.harm[s, a], h.harm[s, b])
    return float(1.0 - surv)
