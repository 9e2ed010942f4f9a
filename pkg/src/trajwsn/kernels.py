"""Hot inner loops, each in a numba and a pure-numpy flavour.

Public names (``pairwise_trajectory_distances``, ``leader_labels``,
``sweep_threshold``, ``refine_medoids``, ``round_events``) dispatch on ``_accel.USE_NUMBA``.
The ``*_nb`` / ``*_np`` variants stay importable so tests and
``benchmarks/bench_kernels.py`` can pit them against each other.

Trajectories enter the distance kernels packed as a padded ``(T, L, 2)``
float array plus a ``(T,)`` int array of true lengths.
"""
from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit


# --------------------------------------------------------------------------
# pairwise trajectory dissimilarity


@njit
def _pairwise_nb(pts, lens):
    n = lens.shape[0]
    ow = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            s = 0.0
            for a in range(lens[i]):
                best = np.inf
                for b in range(lens[j]):
                    dx = pts[i, a, 0] - pts[j, b, 0]
                    dy = pts[i, a, 1] - pts[j, b, 1]
                    d = np.sqrt(dx * dx + dy * dy)
                    if d < best:
                        best = d
                s += best
            ow[i, j] = s / lens[i]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = ow[i, j] if ow[i, j] >= ow[j, i] else ow[j, i]
    return out


def _pairwise_np(pts, lens):
    n, L, _ = pts.shape
    valid = np.arange(L)[None, :] < lens[:, None]  # (n, L)
    diff = pts[:, :, None, None, :] - pts[None, None, :, :, :]  # (n, L, n, L, 2)
    d = np.sqrt(diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1])
    d = np.where(valid[None, None, :, :], d, np.inf)
    nearest = d.min(axis=3)  # (n, L, n)
    nearest = np.where(valid[:, :, None], nearest, 0.0)
    ow = nearest.sum(axis=1) / lens[:, None]
    np.fill_diagonal(ow, 0.0)
    return np.maximum(ow, ow.T)


def pairwise_trajectory_distances(pts, lens):
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    lens = np.ascontiguousarray(lens, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _pairwise_nb(pts, lens)
    return _pairwise_np(pts, lens)


# --------------------------------------------------------------------------
# sequential leader clustering


@njit
def _leader_nb(dist, threshold):
    n = dist.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    k = 0
    for i in range(n):
        if labels[i] != -1:
            continue
        labels[i] = k
        for j in range(i + 1, n):
            if labels[j] == -1 and dist[i, j] <= threshold:
                labels[j] = k
        k += 1
    return labels, k


def _leader_np(dist, threshold):
    n = dist.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    k = 0
    for i in range(n):
        if labels[i] != -1:
            continue
        join = (labels == -1) & (dist[i] <= threshold)
        join[: i + 1] = False
        labels[i] = k
        labels[join] = k
        k += 1
    return labels, k


def leader_labels(dist, threshold):
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    if _accel.USE_NUMBA:
        return _leader_nb(dist, float(threshold))
    return _leader_np(dist, float(threshold))


@njit
def _leader_count_nb(dist, threshold, stop_at):
    # cluster count of a leader pass, cut short once it reaches stop_at
    n = dist.shape[0]
    taken = np.zeros(n, dtype=np.bool_)
    k = 0
    for i in range(n):
        if taken[i]:
            continue
        k += 1
        if k >= stop_at:
            return k
        for j in range(i + 1, n):
            if not taken[j] and dist[i, j] <= threshold:
                taken[j] = True
    return k


@njit
def _sweep_nb(dist, candidates, target):
    for c in range(candidates.shape[0]):
        if _leader_count_nb(dist, candidates[c], target) >= target:
            return c
    return -1


def _sweep_np(dist, candidates, target):
    for c in range(candidates.shape[0]):
        _, k = _leader_np(dist, candidates[c])
        if k >= target:
            return c
    return -1


def sweep_threshold(dist, candidates, target):
    """Index of the first entry of ``candidates`` whose leader pass gives at
    least ``target`` clusters, or -1. Callers pass candidates descending."""
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    candidates = np.ascontiguousarray(candidates, dtype=np.float64)
    if _accel.USE_NUMBA:
        return int(_sweep_nb(dist, candidates, int(target)))
    return _sweep_np(dist, candidates, int(target))


# --------------------------------------------------------------------------
# medoid refinement: nearest-representative assignment, then per-cluster
# medoid (ties to the lowest id), until the representatives stop moving


@njit
def _refine_nb(dist, rep_idx, ids, max_sweeps):
    n = dist.shape[0]
    k = rep_idx.shape[0]
    reps = rep_idx.copy()
    labels = np.zeros(n, dtype=np.int64)
    costs = np.zeros(max_sweeps)
    for sweep in range(max_sweeps):
        for i in range(n):
            best = 0
            for c in range(1, k):
                if dist[i, reps[c]] < dist[i, reps[best]]:
                    best = c
            labels[i] = best
        for c in range(k):
            labels[reps[c]] = c
        new = np.empty(k, dtype=np.int64)
        for c in range(k):
            arg = -1
            best_sum = np.inf
            for i in range(n):
                if labels[i] != c:
                    continue
                s = 0.0
                for j in range(n):
                    if labels[j] == c:
                        s += dist[i, j]
                if s < best_sum or (s == best_sum and ids[i] < ids[arg]):
                    best_sum = s
                    arg = i
            new[c] = arg
        total = 0.0
        for i in range(n):
            total += dist[i, new[labels[i]]]
        costs[sweep] = total
        same = True
        for c in range(k):
            if new[c] != reps[c]:
                same = False
        if same:
            return labels, reps, sweep + 1, True, costs[: sweep + 1]
        reps = new
    return labels, reps, max_sweeps, False, costs


def medoid_np(dist, idx, ids):
    """Member of ``idx`` with the least summed distance to the others; ties
    to the lowest ``ids`` entry."""
    sums = np.zeros(len(idx))
    # column-by-column accumulation matches the compiled summation order
    for j in idx:
        sums += dist[idx, j]
    tied = idx[sums == sums.min()]
    return int(tied[np.argmin(ids[tied])])


def _refine_np(dist, rep_idx, ids, max_sweeps):
    n = dist.shape[0]
    k = len(rep_idx)
    reps = rep_idx.copy()
    labels = np.zeros(n, dtype=np.int64)
    costs = []
    rows = np.arange(n)
    for sweep in range(max_sweeps):
        labels = np.argmin(dist[:, reps], axis=1)
        labels[reps] = np.arange(k)
        new = np.empty(k, dtype=np.int64)
        for c in range(k):
            new[c] = medoid_np(dist, np.flatnonzero(labels == c), ids)
        costs.append(0.0)
        for i in rows:
            costs[-1] += dist[i, new[labels[i]]]
        if np.array_equal(new, reps):
            return labels, reps, sweep + 1, True, np.array(costs)
        reps = new
    return labels, reps, max_sweeps, False, np.array(costs)


def refine_medoids(dist, rep_idx, ids, max_sweeps):
    """Returns ``(labels, rep_idx, sweeps, converged, cost_per_sweep)``."""
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    rep_idx = np.ascontiguousarray(rep_idx, dtype=np.int64)
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _refine_nb(dist, rep_idx, ids, int(max_sweeps))
    return _refine_np(dist, rep_idx, ids, int(max_sweeps))


# --------------------------------------------------------------------------
# one round of member -> head -> base station traffic
#
# Energy is drawn event by event: members in nid order (each successful send
# is immediately received by its head), then each head in nid order
# aggregates and forwards. A node that cannot cover an event is drained to
# zero, dies, and the event fails.


def _round_py(energy, alive, head_of, is_head, d_head, d_bs, bits, e_tx, e_rx, e_da, eps1, eps2, d0):
    n = energy.shape[0]
    received = np.zeros(n, dtype=np.int64)
    spent = 0.0
    rx = bits * e_rx
    for i in range(n):
        if not alive[i] or is_head[i] or head_of[i] < 0:
            continue
        d = d_head[i]
        if d < d0:
            cost = bits * (e_tx + eps1 * d * d)
        else:
            cost = bits * (e_tx + eps2 * d * d * d * d)
        if energy[i] >= cost:
            energy[i] -= cost
            spent += cost
            if energy[i] <= 0.0:
                energy[i] = 0.0
                alive[i] = False
        else:
            spent += energy[i]
            energy[i] = 0.0
            alive[i] = False
            continue
        h = head_of[i]
        if not alive[h]:
            continue
        if energy[h] >= rx:
            energy[h] -= rx
            spent += rx
            received[h] += 1
            if energy[h] <= 0.0:
                energy[h] = 0.0
                alive[h] = False
        else:
            spent += energy[h]
            energy[h] = 0.0
            alive[h] = False
    packets = 0
    for h in range(n):
        if not alive[h] or not is_head[h]:
            continue
        agg = bits * (received[h] + 1) * e_da
        if energy[h] >= agg:
            energy[h] -= agg
            spent += agg
            if energy[h] <= 0.0:
                energy[h] = 0.0
                alive[h] = False
                continue
        else:
            spent += energy[h]
            energy[h] = 0.0
            alive[h] = False
            continue
        d = d_bs[h]
        if d < d0:
            cost = bits * (e_tx + eps1 * d * d)
        else:
            cost = bits * (e_tx + eps2 * d * d * d * d)
        if energy[h] >= cost:
            energy[h] -= cost
            spent += cost
            packets += 1
            if energy[h] <= 0.0:
                energy[h] = 0.0
                alive[h] = False
        else:
            spent += energy[h]
            energy[h] = 0.0
            alive[h] = False
    return packets, spent


_round_nb = njit(_round_py)


def _tx_cost_vec(bits, d, e_tx, eps1, eps2, d0):
    return np.where(d < d0, bits * (e_tx + eps1 * d * d), bits * (e_tx + eps2 * d * d * d * d))


def _round_np(energy, alive, head_of, is_head, d_head, d_bs, bits, e_tx, e_rx, e_da, eps1, eps2, d0):
    """Vectorised round. Falls back to a python event loop when any node
    could run dry this round, so death ordering matches the compiled path."""
    n = energy.shape[0]
    members = alive & ~is_head & (head_of >= 0)
    heads = alive & is_head
    rx = bits * e_rx
    m_idx = np.flatnonzero(members)
    m_cost = _tx_cost_vec(bits, d_head[m_idx], e_tx, eps1, eps2, d0)
    counts = np.bincount(head_of[m_idx], minlength=n)
    h_idx = np.flatnonzero(heads)
    agg = bits * (counts[h_idx] + 1) * e_da
    h_tx = _tx_cost_vec(bits, d_bs[h_idx], e_tx, eps1, eps2, d0)
    h_total = counts[h_idx] * rx + agg + h_tx

    # small margin: the event loop compares running balances, not totals
    margin = 1.0 - 1e-9
    at_risk = np.any(m_cost >= margin * energy[m_idx]) or np.any(h_total >= margin * energy[h_idx])
    # members must point at live heads for the fast path to be exact
    at_risk = at_risk or not np.all(heads[head_of[m_idx]])
    if at_risk:
        return _round_py(energy, alive, head_of, is_head, d_head, d_bs, bits, e_tx, e_rx, e_da, eps1, eps2, d0)

    energy[m_idx] -= m_cost
    spent = m_cost.sum()
    # repeated subtraction keeps the float result identical to the event loop
    left = counts[h_idx].copy()
    while np.any(left > 0):
        sel = h_idx[left > 0]
        energy[sel] -= rx
        left -= 1
    energy[h_idx] -= agg
    energy[h_idx] -= h_tx
    spent += (counts[h_idx] * rx).sum() + agg.sum() + h_tx.sum()
    return len(h_idx), float(spent)


def round_events(energy, alive, head_of, is_head, d_head, d_bs, bits, radio):
    """Run one round in place on ``energy``/``alive``; return (packets, spent)."""
    args = (energy, alive, head_of, is_head, d_head, d_bs, float(bits),
            radio.e_tx, radio.e_rx, radio.e_da, radio.eps1, radio.eps2, radio.d0)
    if _accel.USE_NUMBA:
        packets, spent = _round_nb(*args)
        return int(packets), float(spent)
    packets, spent = _round_np(*args)
    return int(packets), float(spent)
