"""Threshold leader clustering, medoid representatives, and the
assign/update loop that refines them to a fixed point."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .trajectory import DissimilarityMatrix, Trajectory, TrajectoryError, build_dissimilarity_matrix

MAX_SWEEPS = 100


class ClusteringError(ValueError):
    pass


class ReclusterError(RuntimeError):
    """Raised when the assign/update loop fails to settle within the cap."""

    def __init__(self, message, assignment, reps):
        super().__init__(message)
        self.assignment = assignment
        self.reps = reps


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray  # labels[i] is the cluster of matrix row i
    k: int

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)


@dataclass(frozen=True)
class RepresentativeSet:
    reps: tuple[int, ...]  # trajectory id per cluster, in cluster order

    def __len__(self):
        return len(self.reps)


def initial_clusters(matrix: DissimilarityMatrix, threshold: float) -> ClusterAssignment:
    """Single sequential leader pass in row order.

    Each unlabelled row seeds a cluster and pulls in every later unlabelled
    row within ``threshold`` of the seed (inclusive).
    """
    if not threshold >= 0:
        raise ClusteringError(f"threshold must be >= 0, got {threshold}")
    labels, k = kernels.leader_labels(matrix.values, threshold)
    return ClusterAssignment(labels, int(k))


def representative_of(cluster_members: Sequence[int], matrix: DissimilarityMatrix) -> int:
    """The member with the smallest summed dissimilarity to the rest of its
    cluster. Ties go to the lowest trajectory id."""
    if len(cluster_members) == 0:
        raise ClusteringError("cannot pick a representative of an empty cluster")
    idx = np.array(sorted(matrix.index_of(t) for t in cluster_members), dtype=np.int64)
    return matrix.ids[kernels.medoid_np(matrix.values, idx, np.array(matrix.ids))]


def assignment_cost(matrix: DissimilarityMatrix, labels: np.ndarray, rep_idx: Sequence[int]) -> float:
    rep_idx = np.asarray(rep_idx, dtype=np.int64)
    return float(matrix.values[np.arange(matrix.n), rep_idx[labels]].sum())


def recluster(matrix: DissimilarityMatrix, reps: RepresentativeSet, max_sweeps: int = MAX_SWEEPS,
              trace: list | None = None):
    """Alternate nearest-representative assignment and medoid update until the
    representatives stop changing.

    Assignment ties go to the lower cluster index, and a representative is
    always kept in its own cluster. ``trace``, if given, receives the total
    cost after every sweep.
    """
    if len(reps) == 0:
        raise ClusteringError("recluster needs at least one representative")
    rep_idx = np.array([matrix.index_of(r) for r in reps.reps], dtype=np.int64)
    if len(set(rep_idx.tolist())) != len(rep_idx):
        raise ClusteringError("representatives must be distinct")
    labels, rep_idx, _, converged, costs = kernels.refine_medoids(
        matrix.values, rep_idx, np.array(matrix.ids, dtype=np.int64), max_sweeps)
    if trace is not None:
        trace.extend(float(c) for c in costs)
    assignment = ClusterAssignment(np.asarray(labels), len(rep_idx))
    final = RepresentativeSet(tuple(matrix.ids[i] for i in rep_idx))
    if not converged:
        raise ReclusterError(f"representatives still changing after {max_sweeps} sweeps", assignment, final)
    return assignment, final


def default_threshold(matrix: DissimilarityMatrix) -> float:
    return 0.5 * float(matrix.values.max())


def sweep_threshold(matrix: DissimilarityMatrix, target_clusters: int) -> float:
    """Largest distinct matrix value whose leader pass yields at least
    ``target_clusters`` clusters; 0 when even that is out of reach."""
    if target_clusters < 1:
        raise ClusteringError(f"target cluster count must be >= 1, got {target_clusters}")
    candidates = np.unique(matrix.values)[::-1]
    c = kernels.sweep_threshold(matrix.values, candidates, target_clusters)
    return float(candidates[c]) if c >= 0 else 0.0


def cluster_matrix(matrix: DissimilarityMatrix, threshold: float):
    init = initial_clusters(matrix, threshold)
    ids = np.array(matrix.ids)
    reps = RepresentativeSet(tuple(matrix.ids[kernels.medoid_np(matrix.values, init.members(c), ids)]
                                   for c in range(init.k)))
    return recluster(matrix, reps)


def cluster_trajectories(ts: Sequence[Trajectory], threshold: float | None = None,
                         target_clusters: int | None = None):
    """Full pipeline: dissimilarity matrix, leader pass, medoids, refinement.

    With neither ``threshold`` nor ``target_clusters`` the threshold is half
    the largest pairwise dissimilarity. ``target_clusters`` selects it by
    sweep instead.
    """
    if len(ts) == 0:
        raise TrajectoryError("no trajectories to cluster")
    matrix = build_dissimilarity_matrix(ts)
    if threshold is None:
        threshold = sweep_threshold(matrix, target_clusters) if target_clusters else default_threshold(matrix)
    return cluster_matrix(matrix, threshold)
