"""Hot numeric loops.

Plain nopython-compatible functions, compiled with numba when it is
importable and run as ordinary Python otherwise. No fastmath and no
reassociation: the jitted and interpreted paths perform the same IEEE
operations in the same order, so results are bit-identical either way.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True)(fn)

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    def _jit(fn):
        return fn

    HAVE_NUMBA = False


@_jit
def propagate_kernel(horizon, adj_ptr, adj_eidx, e_head, e_dur, slot_off,
                     node_mass, slot_mass):
    """Roll shooter location mass forward one second at a time.

    node_mass: (horizon+1, n) with row 0 preset to the start distribution.
    slot_mass: (horizon+1, total_slots), row 0 zeros. Slot r of a directed
    edge (offset slot_off[e] + r) holds mass that arrives at the head node
    after r+1 more seconds. Mass at a node splits evenly between staying
    put and committing to each outgoing edge.
    """
    n = node_mass.shape[1]
    n_edges = e_head.shape[0]
    for t in range(horizon):
        cur_n = node_mass[t]
        cur_s = slot_mass[t]
        new_n = node_mass[t + 1]
        new_s = slot_mass[t + 1]
        for e in range(n_edges):
            off = slot_off[e]
            d = e_dur[e]
            new_n[e_head[e]] += cur_s[off]
            for r in range(d - 1):
                new_s[off + r] = cur_s[off + r + 1]
        for v in range(n):
            m = cur_n[v]
            if m <= 0.0:
                continue
            deg = adj_ptr[v + 1] - adj_ptr[v]
            share = m / (1.0 + deg)
            new_n[v] += share
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                e = adj_eidx[k]
                new_s[slot_off[e] + e_dur[e] - 1] += share


@_jit
def harm_prob_kernel(depart_count, harm, e_tail, e_head, e_dur, is_exit,
                     ph_stay, ph_move):
    """Precompute transition harm probabilities for every depart offset.

    harm is indexed by seconds since the planning instant. An action taken
    during second tau is first exposed at tau + 1: a stay risks one second
    at the node; a move rides out the origin's harm until the last transit
    second, takes the head's harm there, and stands one settling second at
    the head before the next action prices anything. Arriving at an exit
    skips the settling second, because outside is out of reach. Probability
    of harm is one minus the product of per-second survival.
    """
    n = ph_stay.shape[0]
    n_edges = e_tail.shape[0]
    for tau in range(depart_count):
        for v in range(n):
            ph_stay[v, tau] = harm[tau + 1, v]
        for e in range(n_edges):
            a = e_tail[e]
            b = e_head[e]
            d = e_dur[e]
            surv = 1.0
            for s in range(tau + 1, tau + d):
                surv *= 1.0 - harm[s, a]
            surv *= 1.0 - harm[tau + d, b]
            if not is_exit[b]:
                surv *= 1.0 - harm[tau + d + 1, b]
            ph_move[e, tau] = 1.0 - surv


@_jit
def value_iteration_kernel(lookahead, t0, adj_ptr, adj_eidx, e_head, e_dur,
                           exit_secs, is_exit, node_avail, edge_avail, ph_stay,
                           ph_move, stay_reward, move_reward, penalty_max,
                           values, choices):
    """Backward induction over (node, seconds-from-now) states.

    values: (n, lookahead+1), row of zeros preset at the horizon column.
    choices[v, tau]: -2 no feasible action, -1 stay, else the directed
    edge index taken. Capacity arrays are indexed by absolute second.
    Exits absorb: whoever reached one is outside, collecting the living
    reward without harm or occupancy, and never walks back in.
    An action is only admissible when its landing state itself has a
    finite value, so routes never dead-end short of the horizon.
    Ties go to the first exitward move (one whose head is strictly
    nearer an exit in seconds), then to staying, then to the
    lowest-numbered neighbor. Leaving now or later is value-neutral in
    a calm stretch, and only the exitward preference keeps the greedy
    unroll from idling through it.
    """
    n = values.shape[0]
    neg_inf = -np.inf
    for tau in range(lookahead - 1, -1, -1):
        t = t0 + tau
        for v in range(n):
            if is_exit[v]:
                values[v, tau] = stay_reward[v] + values[v, tau + 1]
                choices[v, tau] = -1
                continue
            stay_q = neg_inf
            can_stay = False
            if node_avail[v, t + 1] > 0 and values[v, tau + 1] > neg_inf:
                ph = ph_stay[v, tau]
                stay_q = ph * penalty_max + (1.0 - ph) * (
                    stay_reward[v] + values[v, tau + 1])
                can_stay = True
            best = stay_q
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                e = adj_eidx[k]
                d = e_dur[e]
                land = tau + d + 1
                if land > lookahead:
                    continue
                if edge_avail[e, t + 1] <= 0:
                    continue
                w = e_head[e]
                if node_avail[w, t + d + 1] <= 0:
                    continue
                if values[w, land] <= neg_inf:
                    continue
                ph = ph_move[e, tau]
                q = ph * penalty_max + (1.0 - ph) * (
                    move_reward[e] + values[w, land])
                if q > best:
                    best = q
            if best <= neg_inf:
                values[v, tau] = neg_inf
                choices[v, tau] = -2
                continue
            arg = -2
            for k in range(adj_ptr[v], adj_ptr[v + 1]):
                e = adj_eidx[k]
                d = e_dur[e]
                land = tau + d + 1
                if land > lookahead:
                    continue
                if edge_avail[e, t + 1] <= 0:
                    continue
                w = e_head[e]
                if node_avail[w, t + d + 1] <= 0:
                    continue
                if values[w, land] <= neg_inf:
                    continue
                ph = ph_move[e, tau]
                q = ph * penalty_max + (1.0 - ph) * (
                    move_reward[e] + values[w, land])
                if q == best and exit_secs[w] < exit_secs[v]:
                    arg = e
                    break
            if arg == -2:
                if can_stay and stay_q == best:
                    arg = -1
                else:
                    for k in range(adj_ptr[v], adj_ptr[v + 1]):
                        e = adj_eidx[k]
                        d = e_dur[e]
                        land = tau + d + 1
                        if land > lookahead:
                            continue
                        if edge_avail[e, t + 1] <= 0:
                            continue
                        w = e_head[e]
                        if node_avail[w, t + d + 1] <= 0:
                            continue
                        if values[w, land] <= neg_inf:
                            continue
                        ph = ph_move[e, tau]
                        q = ph * penalty_max + (1.0 - ph) * (
                            move_reward[e] + values[w, land])
                        if q == best:
                            arg = e
                            break
            values[v, tau] = best
            choices[v, tau] = arg
