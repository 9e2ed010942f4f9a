"""Time the compiled kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--rounds 300]

Compilation happens once before timing (and is cached on disk afterwards).
"""
import argparse
import time

import numpy as np

from trajwsn import _accel, kernels
from trajwsn.config import SimConfig
from trajwsn.energy import DEFAULT_RADIO
from trajwsn.simulation import build_trajectories, deploy, elect_cluster_heads, run_simulation


def best_of(fn, repeat=5):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(rounds):
    state = deploy(100, 100.0, seed=1)
    trajs = build_trajectories(state, 30.0, control_bits=0)
    elect_cluster_heads(state, trajs, target_clusters=7, control_bits=0)
    lens = np.array([len(t.points) for t in trajs], dtype=np.int64)
    pts = np.zeros((len(trajs), lens.max(), 2))
    for i, t in enumerate(trajs):
        pts[i, : lens[i]] = t.points
    dist = kernels.pairwise_trajectory_distances(pts, lens)
    cand = np.unique(dist)[::-1].copy()
    ids = np.arange(len(trajs), dtype=np.int64)
    reps = np.array([0, 20, 40, 60, 80, 99], dtype=np.int64)

    def one_round():
        e = state.energy.copy()
        a = state.alive.copy()
        kernels.round_events(e, a, state.head_of, state.is_head, state.d_head, state.d_bs, 4128, DEFAULT_RADIO)

    cfg = SimConfig(max_rounds=rounds)
    return {
        "pairwise distances (100 paths)": lambda: kernels.pairwise_trajectory_distances(pts, lens),
        "leader pass": lambda: kernels.leader_labels(dist, float(np.median(dist))),
        "threshold sweep (M=7)": lambda: kernels.sweep_threshold(dist, cand, 7),
        "medoid refinement": lambda: kernels.refine_medoids(dist, reps, ids, 100),
        "data round": one_round,
        f"trajectory simulation, {rounds} rounds": lambda: run_simulation(cfg, 1, "trajectory"),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=300)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    results = {}
    for flag in (True, False):
        _accel.USE_NUMBA = flag
        for name, fn in workloads(args.rounds).items():
            fn()  # warm-up / compile
            results.setdefault(name, []).append(best_of(fn, 1 if "simulation" in name else 5))
    print(f"{'workload':<40}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, (nb, npy) in results.items():
        print(f"{name:<40}{nb * 1e3:>10.3f}ms{npy * 1e3:>10.3f}ms{npy / nb:>9.1f}x")


if __name__ == "__main__":
    main()
