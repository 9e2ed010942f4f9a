"""The compiled and pure-numpy kernels must agree."""
import numpy as np
import pytest

from trajwsn import _accel, kernels
from trajwsn.config import SimConfig
from trajwsn.energy import DEFAULT_RADIO
from trajwsn.simulation import run_simulation

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def both(monkeypatch, fn, *args):
    out = []
    for flag in (True, False):
        monkeypatch.setattr(_accel, "USE_NUMBA", flag)
        copied = [a.copy() if isinstance(a, np.ndarray) else a for a in args]
        out.append((fn(*copied), copied))
    return out


def random_padded(rng, n):
    lens = rng.integers(1, 7, size=n)
    pts = np.zeros((n, lens.max(), 2))
    for i, k in enumerate(lens):
        pts[i, :k] = rng.uniform(0, 100, size=(k, 2))
    return pts, lens.astype(np.int64)


@pytest.mark.parametrize("seed", range(10))
def test_pairwise(monkeypatch, seed):
    pts, lens = random_padded(np.random.default_rng(seed), 12)
    (a, _), (b, _) = both(monkeypatch, kernels.pairwise_trajectory_distances, pts, lens)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.array_equal(a, a.T) and np.array_equal(b, b.T)


@pytest.mark.parametrize("seed", range(10))
def test_leader_sweep_refine(monkeypatch, seed):
    rng = np.random.default_rng(seed)
    pts, lens = random_padded(rng, 15)
    monkeypatch.setattr(_accel, "USE_NUMBA", True)
    dist = kernels.pairwise_trajectory_distances(pts, lens)
    thr = float(rng.uniform(0, dist.max()))
    (la, _), (lb, _) = both(monkeypatch, kernels.leader_labels, dist, thr)
    assert np.array_equal(la[0], lb[0]) and la[1] == lb[1]

    cand = np.unique(dist)[::-1].copy()
    (sa, _), (sb, _) = both(monkeypatch, kernels.sweep_threshold, dist, cand, 4)
    assert sa == sb

    ids = np.arange(15, dtype=np.int64)
    reps = np.sort(rng.choice(15, size=4, replace=False)).astype(np.int64)
    (ra, _), (rb, _) = both(monkeypatch, kernels.refine_medoids, dist, reps, ids, 100)
    assert np.array_equal(ra[0], rb[0]) and np.array_equal(ra[1], rb[1])
    assert ra[2:4] == rb[2:4]
    assert np.array_equal(np.asarray(ra[4]), np.asarray(rb[4]))


def random_round_state(rng, n, tight):
    pos = rng.uniform(0, 100, size=(n, 2))
    bs = np.array([50.0, 140.0])
    d_bs = np.sqrt(((pos - bs) ** 2).sum(axis=1))
    alive = rng.random(n) > 0.1
    is_head = (rng.random(n) < 0.15) & alive
    if not is_head.any():
        is_head[np.flatnonzero(alive)[:1]] = True
    heads = np.flatnonzero(is_head)
    head_of = np.full(n, -1, dtype=np.int64)
    d_head = np.zeros(n)
    for i in range(n):
        if is_head[i]:
            head_of[i] = i
        elif len(heads):
            h = heads[rng.integers(len(heads))]
            head_of[i] = h
            d_head[i] = np.sqrt(((pos[i] - pos[h]) ** 2).sum())
    if tight:
        # some nodes can barely pay, some exactly, some not at all
        energy = rng.choice([1e-4, 3e-4, 6e-4, 1e-3, 2.0], size=n)
    else:
        energy = rng.uniform(0.5, 2.0, size=n)
    energy = np.where(alive, energy, 0.0)
    return energy, alive, head_of, is_head, d_head, d_bs


@pytest.mark.parametrize("seed", range(30))
@pytest.mark.parametrize("tight", [False, True])
def test_round_events(monkeypatch, seed, tight):
    state = random_round_state(np.random.default_rng(seed), 40, tight)
    (pa, ca), (pb, cb) = both(monkeypatch, kernels.round_events, *state, 4128, DEFAULT_RADIO)
    assert pa[0] == pb[0]
    assert pa[1] == pytest.approx(pb[1], rel=1e-12, abs=1e-18)
    assert np.array_equal(ca[0], cb[0])  # energy
    assert np.array_equal(ca[1], cb[1])  # alive


def test_exact_budget_member_survives_event_then_dies(monkeypatch):
    # one member pays exactly its tx cost
    cost = kernels._tx_cost_vec(4128.0, np.array([10.0]), 50e-9, 10e-12, 0.0013e-12, DEFAULT_RADIO.d0)[0]
    energy = np.array([2.0, cost])
    alive = np.array([True, True])
    head_of = np.array([0, 0])
    is_head = np.array([True, False])
    d_head = np.array([0.0, 10.0])
    d_bs = np.array([50.0, 55.0])
    for flag in (True, False):
        monkeypatch.setattr(_accel, "USE_NUMBA", flag)
        e, a = energy.copy(), alive.copy()
        packets, _ = kernels.round_events(e, a, head_of, is_head, d_head, d_bs, 4128, DEFAULT_RADIO)
        assert packets == 1
        assert a.tolist() == [True, False] and e[1] == 0.0
        # head received and fused two messages
        expect = 2.0 - 4128 * 50e-9 - 4128 * 5e-9 * 2 - 4128 * (50e-9 + 10e-12 * 50 * 50)
        assert e[0] == pytest.approx(expect, rel=1e-12)


def test_short_simulation_identical(monkeypatch):
    cfg = SimConfig(n_nodes=30, max_rounds=40, initial_energy_j=0.02)
    runs = {}
    for flag in (True, False):
        monkeypatch.setattr(_accel, "USE_NUMBA", flag)
        runs[flag] = {a: run_simulation(cfg, 3, a) for a in ("trajectory", "leach")}
    for a in ("trajectory", "leach"):
        x, y = runs[True][a], runs[False][a]
        assert [m.alive_count for m in x] == [m.alive_count for m in y]
        assert [m.packets_delivered_total for m in x] == [m.packets_delivered_total for m in y]
        assert [m.head_rotations for m in x] == [m.head_rotations for m in y]
        np.testing.assert_allclose([m.residual_energy_total for m in x], [m.residual_energy_total for m in y],
                                   rtol=1e-12)
