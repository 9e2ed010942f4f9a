"""Round-based network simulation.

Per round: (re-)election if due, one data round (every live member sends one
message to its head; each head fuses its members' messages with its own
reading and forwards one message to the base station), then head rotation.
Control traffic (hello paths, election broadcast, rotation notices) is paid
through the same radio model. Node state lives in flat numpy arrays indexed
by node id.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .clustering import cluster_trajectories
from .config import SimConfig
from .energy import DEFAULT_RADIO, FieldParams, RadioParams, optimal_cluster_count, rx_energy
from .trajectory import Point2D, Trajectory

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    nid: int
    pos: Point2D
    energy: float
    alive: bool
    role: str  # "head" | "member"
    cluster: int | None  # head nid


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    alive_count: int
    packets_delivered_total: int
    energy_spent_this_round: float
    residual_energy_total: float
    head_rotations: int
    reclusterings: int


class NetworkState:
    def __init__(self, pos, base_station, initial_energy, rng_seed=0):
        self.pos = np.asarray(pos, dtype=np.float64).reshape(-1, 2)
        n = len(self.pos)
        self.base_station = np.asarray(base_station, dtype=np.float64)
        self.initial_energy = float(initial_energy)
        self.energy = np.full(n, self.initial_energy)
        self.alive = np.ones(n, dtype=bool)
        self.head_of = np.full(n, -1, dtype=np.int64)
        self.is_head = np.zeros(n, dtype=bool)
        self.d_head = np.zeros(n)
        diff = self.pos - self.base_station
        self.d_bs = np.sqrt(diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1])
        self.fallback = np.zeros(n, dtype=bool)
        self.round = 0
        self.rng_seed = rng_seed
        self.packets_total = 0
        self.pending_election = True
        # per-round accumulators, flushed by close_round()
        self.spent = 0.0
        self.rotations = 0
        self.reclusterings = 0

    @property
    def n(self) -> int:
        return len(self.pos)

    def node(self, nid: int) -> Node:
        cluster = int(self.head_of[nid]) if self.head_of[nid] >= 0 and self.alive[nid] else None
        return Node(nid, Point2D(*self.pos[nid]), float(self.energy[nid]), bool(self.alive[nid]),
                    "head" if self.is_head[nid] else "member", cluster)

    @property
    def nodes(self) -> list[Node]:
        return [self.node(i) for i in range(self.n)]

    @property
    def clusters(self) -> dict[int, list[int]]:
        """Live head nid -> sorted live member nids (head excluded)."""
        out = {int(h): [] for h in np.flatnonzero(self.is_head & self.alive)}
        for i in np.flatnonzero(self.alive & ~self.is_head):
            h = int(self.head_of[i])
            if h in out:
                out[h].append(int(i))
        return out

    def drain(self, cost) -> float:
        """Debit a per-node cost vector from live nodes; nodes that cannot
        cover it are emptied and die. Returns the energy actually drawn."""
        cost = np.where(self.alive, np.broadcast_to(cost, self.energy.shape), 0.0)
        paid = np.minimum(cost, self.energy)
        self.energy -= paid
        died = self.alive & (cost > 0) & (self.energy <= 0.0)
        self.energy[died] = 0.0
        self.alive[died] = False
        drawn = float(paid.sum())
        self.spent += drawn
        return drawn

    def close_round(self) -> RoundMetrics:
        m = RoundMetrics(self.round, int(self.alive.sum()), self.packets_total, self.spent,
                         float(self.energy.sum()), self.rotations, self.reclusterings)
        self.spent = 0.0
        self.rotations = 0
        self.reclusterings = 0
        return m


def _tx_vec(bits, d, radio: RadioParams):
    return kernels._tx_cost_vec(float(bits), np.asarray(d, dtype=np.float64), radio.e_tx, radio.eps1, radio.eps2,
                                radio.d0)


def deploy(n: int, side: float, bs=None, seed: int = 0, initial_energy: float = 2.0) -> NetworkState:
    """``n`` sensors uniform on ``[0, side]^2``; base station defaults to
    ``(side/2, side + 40)``."""
    if n < 1 or not side > 0:
        raise ValueError("deploy needs n >= 1 and side > 0")
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, side, size=(n, 2))
    if bs is None:
        bs = (side / 2, side + 40.0)
    return NetworkState(pos, bs, initial_energy, rng_seed=seed)


def _next_hops(state: NetworkState, radio_range: float):
    """Greedy geographic forwarding: each node hands off to the neighbour in
    range that is closest to the base station, provided it is strictly closer
    than the node itself. -1 means deliver straight to the base station."""
    idx = np.flatnonzero(state.alive)
    p = state.pos[idx]
    dbs = state.d_bs[idx]
    diff = p[:, None, :] - p[None, :, :]
    d = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
    ok = (d <= radio_range) & (dbs[None, :] < dbs[:, None])
    score = np.where(ok, dbs[None, :], np.inf)
    best = np.argmin(score, axis=1)
    has = np.isfinite(score[np.arange(len(idx)), best]) & (dbs > radio_range)
    nxt = np.full(state.n, -1, dtype=np.int64)
    nxt[idx[has]] = idx[best[has]]
    return idx, nxt


def build_trajectories(state: NetworkState, radio_range: float, control_bits: int = 200,
                       radio: RadioParams = DEFAULT_RADIO) -> list[Trajectory]:
    """Hello path of every live node towards the base station.

    Each path lists the originating node then every relay, base station
    excluded. A node that is out of base-station range with no closer
    neighbour sends directly (long-range fallback, recorded in
    ``state.fallback``). Every hop of every hello packet is charged.
    """
    if not radio_range > 0:
        raise ValueError("radio_range must be > 0")
    idx, nxt = _next_hops(state, radio_range)
    state.fallback[:] = False
    paths: dict[int, tuple[int, ...]] = {}
    for i in idx[np.argsort(state.d_bs[idx], kind="stable")]:
        j = nxt[i]
        paths[int(i)] = (int(i),) + paths[int(j)] if j >= 0 else (int(i),)
        if j < 0 and state.d_bs[i] > radio_range:
            state.fallback[i] = True

    sent = np.zeros(state.n)
    for path in paths.values():
        for v in path:
            sent[v] += 1
    # every copy a node sends, except its own hello, was first received
    received = np.where(sent > 0, sent - 1, 0.0)
    hop = np.where(nxt >= 0, np.sqrt(((state.pos - state.pos[np.maximum(nxt, 0)]) ** 2).sum(axis=1)), state.d_bs)
    if control_bits > 0:
        cost = sent * _tx_vec(control_bits, hop, radio) + received * rx_energy(control_bits, radio)
        state.drain(cost)
    return [Trajectory._trusted(i, state.pos[list(paths[i])], paths[i]) for i in sorted(paths)]


def assign_to_heads(state: NetworkState, heads) -> None:
    """Make ``heads`` the head set; every other live node joins the nearest
    head (ties to the lowest head nid)."""
    heads = np.array(sorted(int(h) for h in heads), dtype=np.int64)
    state.is_head[:] = False
    state.head_of[:] = -1
    state.d_head[:] = 0.0
    if len(heads) == 0:
        return
    state.is_head[heads] = True
    state.head_of[heads] = heads
    members = np.flatnonzero(state.alive & ~state.is_head)
    if len(members):
        diff = state.pos[members][:, None, :] - state.pos[heads][None, :, :]
        d = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
        k = np.argmin(d, axis=1)
        state.head_of[members] = heads[k]
        state.d_head[members] = d[np.arange(len(members)), k]


def _max_energy_node(state: NetworkState, candidates) -> int:
    candidates = np.asarray(candidates, dtype=np.int64)
    e = state.energy[candidates]
    return int(candidates[np.flatnonzero(e == e.max())[0]])


def _broadcast(state: NetworkState, control_bits: int, radio: RadioParams) -> None:
    if control_bits > 0:
        state.drain(np.full(state.n, rx_energy(control_bits, radio)))


def target_cluster_count(state: NetworkState, side: float, d1: float, radio: RadioParams) -> int:
    n_alive = int(state.alive.sum())
    return optimal_cluster_count(FieldParams(max(n_alive, 1), side, d1), radio)[1]


def elect_cluster_heads(state: NetworkState, trajectories, threshold=None, target_clusters=None,
                        control_bits: int = 200, radio: RadioParams = DEFAULT_RADIO) -> NetworkState:
    """Cluster the hello paths; every live node on a representative path
    becomes a head and the rest join their nearest head."""
    if not state.alive.any():
        raise ValueError("no live node to elect")
    trajectories = [t for t in trajectories if state.alive[t.tid]]
    heads: set[int] = set()
    if trajectories:
        _, reps = cluster_trajectories(trajectories, threshold=threshold, target_clusters=target_clusters)
        by_id = {t.tid: t for t in trajectories}
        heads = {v for r in reps.reps for v in by_id[r].nodes if state.alive[v]}
    if not heads:
        heads = {_max_energy_node(state, np.flatnonzero(state.alive))}
    assign_to_heads(state, heads)
    _broadcast(state, control_bits, radio)
    state.pending_election = False
    state.reclusterings += 1
    return state


def leach_baseline_elect(state: NetworkState, p_head: float, rng, control_bits: int = 200,
                         radio: RadioParams = DEFAULT_RADIO) -> NetworkState:
    """Every live node independently becomes head with probability ``p_head``.

    ``rng`` is a numpy Generator or an int seed. One uniform draw is consumed
    per node (dead or alive) so the stream stays aligned across rounds.
    """
    if not 0 < p_head <= 1:
        raise ValueError("p_head must lie in (0, 1]")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    draw = rng.random(state.n)
    heads = np.flatnonzero(state.alive & (draw < p_head))
    if len(heads) == 0 and state.alive.any():
        heads = [_max_energy_node(state, np.flatnonzero(state.alive))]
    assign_to_heads(state, heads)
    _broadcast(state, control_bits, radio)
    state.reclusterings += 1
    return state


def run_round(state: NetworkState, bits: int, radio: RadioParams = DEFAULT_RADIO) -> int:
    """One data round in place. Returns packets delivered this round."""
    state.round += 1
    if not state.alive.any():
        return 0
    packets, spent = kernels.round_events(state.energy, state.alive, state.head_of, state.is_head, state.d_head,
                                          state.d_bs, bits, radio)
    state.packets_total += packets
    state.spent += spent
    return packets


def maybe_rotate_heads(state: NetworkState, below_member_mean: bool = True, min_fraction: float = 0.05,
                       control_bits: int = 200, radio: RadioParams = DEFAULT_RADIO) -> int:
    """Hand the head role to the richest live member wherever the head is dead
    or has fallen below the rotation threshold. Returns rotations made; any
    rotation schedules a full re-election."""
    rotations = 0
    floor = min_fraction * state.initial_energy
    member_mask = state.alive & ~state.is_head & (state.head_of >= 0)
    cost = np.zeros(state.n)
    rx = rx_energy(control_bits, radio)
    counts = np.bincount(state.head_of[member_mask], minlength=state.n)
    sums = np.bincount(state.head_of[member_mask], weights=state.energy[member_mask], minlength=state.n)
    for h in np.flatnonzero(state.is_head):
        if state.alive[h]:
            if counts[h] == 0:
                continue
            low = state.energy[h] < floor or (below_member_mean and state.energy[h] * counts[h] < sums[h])
            if not low:
                continue
        elif counts[h] == 0:
            state.is_head[h] = False  # dissolved
            continue
        members = np.flatnonzero(member_mask & (state.head_of == h))
        new = _max_energy_node(state, members)
        if control_bits > 0:
            if state.alive[h]:
                reach = np.sqrt(((state.pos[members] - state.pos[h]) ** 2).sum(axis=1)).max()
                cost[h] += _tx_vec(control_bits, reach, radio)
                cost[members] += rx
            cost[new] += _tx_vec(control_bits, state.d_bs[new], radio)
        state.is_head[h] = False
        state.is_head[new] = True
        group = np.append(members, h) if state.alive[h] else members
        state.head_of[group] = new
        state.head_of[new] = new
        state.d_head[group] = np.sqrt(((state.pos[group] - state.pos[new]) ** 2).sum(axis=1))
        state.d_head[new] = 0.0
        rotations += 1
    # notices are paid after every decision is made, in one debit
    if rotations and control_bits > 0:
        state.drain(cost)
    if rotations:
        state.pending_election = True
    state.rotations += rotations
    return rotations


def baseline_p_head(cfg: SimConfig) -> float:
    if cfg.p_head is not None:
        return cfg.p_head
    _, m = optimal_cluster_count(cfg.field_params, cfg.radio)
    return min(1.0, m / cfg.n_nodes)


def run_simulation(cfg: SimConfig, seed: int | None = None, algorithm: str = "trajectory") -> list[RoundMetrics]:
    """Deploy, then iterate rounds until every node is dead or
    ``cfg.max_rounds`` is reached. A pure function of ``(cfg, seed)``."""
    if algorithm not in ("trajectory", "leach"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    seed = cfg.seed_list[0] if seed is None else seed
    radio = cfg.radio
    state = deploy(cfg.n_nodes, cfg.side_m, cfg.base_station, seed, cfg.initial_energy_j)
    leach_rng = np.random.default_rng((seed, 1))
    p_head = baseline_p_head(cfg)
    fixed = cfg.threshold_m if cfg.threshold_mode == "fixed" else None
    metrics: list[RoundMetrics] = []
    for r in range(1, cfg.max_rounds + 1):
        if not state.alive.any():
            break
        if algorithm == "trajectory":
            if state.pending_election or (r - 1) % cfg.reelect_period == 0:
                trajs = build_trajectories(state, cfg.radio_range_m, cfg.control_bits, radio)
                target = None
                if cfg.threshold_mode == "sweep":
                    target = target_cluster_count(state, cfg.side_m, cfg.d1_m, radio)
                if state.alive.any():
                    elect_cluster_heads(state, trajs, fixed, target, cfg.control_bits, radio)
        else:
            leach_baseline_elect(state, p_head, leach_rng, cfg.control_bits, radio)
        run_round(state, cfg.message_bits, radio)
        if algorithm == "trajectory":
            maybe_rotate_heads(state, cfg.rotate_below_member_mean, cfg.rotate_min_fraction, cfg.control_bits, radio)
        state.round = r
        metrics.append(state.close_round())
    return metrics
