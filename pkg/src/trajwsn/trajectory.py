"""Trajectories and the mean one-way nearest-vertex dissimilarity between them.

A trajectory is an ordered run of 2-D vertices. The one-way distance from
``t1`` to ``t2`` averages, over the vertices of ``t1``, the distance to the
nearest vertex of ``t2``; the symmetric dissimilarity is the larger of the
two one-way values. Vertices only: segments between them are ignored.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels


class TrajectoryError(ValueError):
    """Empty trajectory, empty collection, or malformed trajectory file."""


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float


@dataclass(frozen=True)
class Trajectory:
    """``points`` is an ``(m, 2)`` float array, m >= 1.

    ``nodes`` optionally records which sensor sits at each vertex; the
    simulator uses it to turn a representative path back into node ids.
    """

    tid: int
    points: np.ndarray
    nodes: tuple[int, ...] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if len(pts) == 0:
            raise TrajectoryError(f"trajectory {self.tid} has no points")
        if not np.all(np.isfinite(pts)):
            raise TrajectoryError(f"trajectory {self.tid} has non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.nodes is not None:
            nodes = tuple(int(v) for v in self.nodes)
            if len(nodes) != len(pts):
                raise TrajectoryError(f"trajectory {self.tid}: {len(nodes)} node ids for {len(pts)} points")
            object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return len(self.points)

    @classmethod
    def _trusted(cls, tid, points, nodes):
        # skips validation; callers guarantee a finite (m, 2) array, m >= 1
        t = object.__new__(cls)
        object.__setattr__(t, "tid", tid)
        object.__setattr__(t, "points", points)
        object.__setattr__(t, "nodes", nodes)
        return t

    @classmethod
    def from_points(cls, tid: int, points: Iterable, nodes=None) -> "Trajectory":
        pts = [(p.x, p.y) if isinstance(p, Point2D) else tuple(p) for p in points]
        return cls(tid, np.array(pts, dtype=np.float64).reshape(-1, 2), nodes)


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric, zero-diagonal, non-negative. ``ids[i]`` is the tid of row i."""

    values: np.ndarray
    ids: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.ids)

    def index_of(self, tid: int) -> int:
        try:
            return self.ids.index(tid)
        except ValueError:
            raise TrajectoryError(f"trajectory id {tid} not in matrix") from None


def _as_array(t) -> np.ndarray:
    if isinstance(t, Trajectory):
        return t.points
    pts = np.asarray(t, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise TrajectoryError("empty trajectory")
    return pts


def _nearest(points: np.ndarray, other: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - other[None, :, :]
    d = np.sqrt(diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1])
    return d.min(axis=1)


def point_to_trajectory_distance(p, t) -> float:
    """Euclidean distance from ``p`` to the closest vertex of ``t``."""
    q = np.asarray((p.x, p.y) if isinstance(p, Point2D) else p, dtype=np.float64).reshape(1, 2)
    return float(_nearest(q, _as_array(t))[0])


def one_way_distance(t1, t2) -> float:
    a = _as_array(t1)
    return float(_nearest(a, _as_array(t2)).sum() / len(a))


def trajectory_distance(t1, t2) -> float:
    return max(one_way_distance(t1, t2), one_way_distance(t2, t1))


def pack(ts: Sequence[Trajectory]) -> tuple[np.ndarray, np.ndarray]:
    """Pad a collection into the ``(T, L, 2)`` / ``(T,)`` layout the kernels use."""
    lens = np.array([len(t) for t in ts], dtype=np.int64)
    pts = np.zeros((len(ts), int(lens.max()), 2))
    for i, t in enumerate(ts):
        pts[i, : len(t)] = t.points
    return pts, lens


def build_dissimilarity_matrix(ts: Sequence[Trajectory]) -> DissimilarityMatrix:
    if len(ts) == 0:
        raise TrajectoryError("cannot build a dissimilarity matrix from no trajectories")
    ids = tuple(t.tid for t in ts)
    if len(set(ids)) != len(ids):
        raise TrajectoryError("trajectory ids must be unique")
    pts, lens = pack(ts)
    values = kernels.pairwise_trajectory_distances(pts, lens)
    values.setflags(write=False)
    return DissimilarityMatrix(values, ids)


def read_trajectories_csv(path) -> list[Trajectory]:
    """Read ``tid,seq,x,y`` rows into trajectories ordered by tid, then seq."""
    rows: dict[int, list[tuple[int, float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"tid", "seq", "x", "y"} - set(reader.fieldnames or ())
        if missing:
            raise TrajectoryError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.setdefault(int(row["tid"]), []).append((int(row["seq"]), float(row["x"]), float(row["y"])))
            except (TypeError, ValueError) as exc:
                raise TrajectoryError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise TrajectoryError(f"{path}: no trajectories")
    out = []
    for tid in sorted(rows):
        verts = sorted(rows[tid])
        out.append(Trajectory(tid, np.array([(x, y) for _, x, y in verts])))
    return out


def write_trajectories_csv(ts: Iterable[Trajectory], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tid", "seq", "x", "y"])
        for t in ts:
            for seq, (x, y) in enumerate(t.points):
                w.writerow([t.tid, seq, repr(float(x)), repr(float(y))])
