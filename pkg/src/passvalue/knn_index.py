"""Origin-destination grid index over labelled subsequences with DTW k-NN queries."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .events import PITCH_LENGTH, PITCH_WIDTH, PitchPoint
from .possession import Subsequence
from .traj import PASS_DURATION, Trajectory, batch_distance, interpolate

INDEX_MAGIC = b"PVIDX\x00"
INDEX_VERSION = 1


@dataclass(frozen=True)
class GridSpec:
    cell_length: float = 15.0
    cell_width: float = 17.0
    pitch_length: float = PITCH_LENGTH
    pitch_width: float = PITCH_WIDTH

    def __post_init__(self):
        if not (0 < self.cell_length <= self.pitch_length and 0 < self.cell_width <= self.pitch_width):
            raise ValueError("cell sizes must fit at least one cell on the pitch")

    @property
    def n_cols(self) -> int:
        return math.ceil(self.pitch_length / self.cell_length - 1e-9)

    @property
    def n_rows(self) -> int:
        return math.ceil(self.pitch_width / self.cell_width - 1e-9)

    @property
    def n_cells(self) -> int:
        return self.n_cols * self.n_rows

    @property
    def n_clusters(self) -> int:
        return self.n_cells ** 2

    def cell_of(self, p: PitchPoint) -> tuple[int, int]:
        x, y = p
        if not (0 <= x <= self.pitch_length and 0 <= y <= self.pitch_width):
            raise ValueError(f"point ({x}, {y}) is off the pitch")
        return (min(int(x // self.cell_length), self.n_cols - 1),
                min(int(y // self.cell_width), self.n_rows - 1))

    def cell_index(self, p: PitchPoint) -> int:
        col, row = self.cell_of(p)
        return col * self.n_rows + row

    def neighbours(self, cell: int) -> list[int]:
        """The up-to-eight cells surrounding ``cell``, in ascending index order."""
        col, row = divmod(cell, self.n_rows)
        out = []
        for dc in (-1, 0, 1):
            for dr in (-1, 0, 1):
                c, r = col + dc, row + dr
                if (dc or dr) and 0 <= c < self.n_cols and 0 <= r < self.n_rows:
                    out.append(c * self.n_rows + r)
        return sorted(out)


DEFAULT_GRID = GridSpec()


def cell_of(p: PitchPoint, grid: GridSpec = DEFAULT_GRID) -> tuple[int, int]:
    return grid.cell_of(p)


def cluster_key(sub, grid: GridSpec = DEFAULT_GRID) -> int:
    """``origin * n_cells + destination`` from first start and last end location."""
    events = getattr(sub, "events", sub)
    origin = grid.cell_index(events[0].start)
    dest = grid.cell_index(events[-1].end)
    return origin * grid.n_cells + dest


@dataclass
class ClusterIndex:
    grid: GridSpec
    clustered: bool
    flat_x: np.ndarray
    flat_y: np.ndarray
    offsets: np.ndarray
    labels: np.ndarray
    seq_ids: np.ndarray
    keys: np.ndarray
    clusters: dict[int, np.ndarray] = field(default_factory=dict)
    final_duration: float = PASS_DURATION

    def __post_init__(self):
        if not self.clusters:
            self.clusters = _group(self.keys)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def global_mean_label(self) -> float:
        return float(self.labels.mean()) if len(self.labels) else 0.0

    @property
    def counts(self) -> dict[int, int]:
        return {k: len(v) for k, v in self.clusters.items()}

    def trajectory(self, i: int) -> Trajectory:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return Trajectory(self.flat_x[lo:hi], self.flat_y[lo:hi])

    def key_for(self, sub) -> int:
        return cluster_key(sub, self.grid) if self.clustered else 0

    def candidates(self, key: int, exclude: int | None = None) -> np.ndarray | None:
        """Stored positions searched for a query with cluster ``key``.

        Falls back to the same-origin clusters whose destination cell borders
        the query's when its own cluster is empty; ``None`` means no stored
        candidate is reachable and the global mean applies.
        """
        pool = self._members(key, exclude)
        if len(pool) or not self.clustered:
            return pool if len(pool) else None
        origin, dest = divmod(key, self.grid.n_cells)
        near = [self._members(origin * self.grid.n_cells + d, exclude) for d in self.grid.neighbours(dest)]
        pool = np.concatenate(near) if near else pool
        return pool if len(pool) else None

    def _members(self, key: int, exclude: int | None) -> np.ndarray:
        m = self.clusters.get(key)
        if m is None:
            return np.empty(0, dtype=np.int64)
        if exclude is not None:
            m = m[self.seq_ids[m] != exclude]
        return m


def _group(keys: np.ndarray) -> dict[int, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    uniq, starts = np.unique(keys[order], return_index=True)
    bounds = list(starts[1:]) + [len(order)]
    return {int(k): order[s:e].astype(np.int64) for k, s, e in zip(uniq, starts, bounds)}


def _from_trajectories(trajs: Sequence[Trajectory], labels, seq_ids, keys, grid, clustered,
                       final_duration=PASS_DURATION) -> ClusterIndex:
    lengths = np.fromiter((len(t) for t in trajs), dtype=np.int64, count=len(trajs))
    offsets = np.zeros(len(trajs) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    flat_x = np.concatenate([t.xs for t in trajs]) if trajs else np.empty(0)
    flat_y = np.concatenate([t.ys for t in trajs]) if trajs else np.empty(0)
    return ClusterIndex(grid, clustered, flat_x.astype(float), flat_y.astype(float), offsets,
                        np.asarray(labels, dtype=float), np.asarray(seq_ids, dtype=np.int64),
                        np.asarray(keys, dtype=np.int64), final_duration=final_duration)


def build_index(subs: Iterable[Subsequence], grid: GridSpec = DEFAULT_GRID, *,
                clustered: bool = True, final_duration: float = PASS_DURATION) -> ClusterIndex:
    """Store every labelled subsequence's trajectory in its origin-destination cluster.

    With ``clustered=False`` all subsequences share one cluster, which turns
    queries into exhaustive search.
    """
    trajs, labels, seq_ids, keys = [], [], [], []
    for sub in subs:
        if not 0.0 <= sub.label <= 1.0:
            raise ValueError(f"label {sub.label} outside [0, 1]")
        trajs.append(interpolate(sub.events, final_duration))
        labels.append(sub.label)
        seq_ids.append(sub.parent)
        keys.append(cluster_key(sub, grid) if clustered else 0)
    return _from_trajectories(trajs, labels, seq_ids, keys, grid, clustered, final_duration)


def nearest_labels(index: ClusterIndex, traj: Trajectory, key: int, *,
                   exclude: int | None = None, stats: dict | None = None) -> np.ndarray | None:
    """Labels of the searched pool ordered by distance (ties in insertion order)."""
    pool = index.candidates(key, exclude)
    if pool is None:
        return None
    d = batch_distance(traj, index.flat_x, index.flat_y, index.offsets, pool)
    if stats is not None:
        stats["distance_computations"] = stats.get("distance_computations", 0) + len(pool)
    # pool is in insertion order, so a stable sort breaks ties by insertion
    order = np.argsort(d, kind="stable")
    return index.labels[pool[order]]


def mean_of_first(sorted_labels: np.ndarray | None, k: int, fallback: float) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    if sorted_labels is None or len(sorted_labels) == 0:
        return fallback
    m = min(k, len(sorted_labels))
    return float(sorted_labels[:m].sum() / m)


def expected_reward(index: ClusterIndex, query, k: int = 10, *,
                    exclude: int | None = None, stats: dict | None = None) -> float:
    """Mean label of the ``k`` nearest stored subsequences in the query's cluster.

    ``query`` is a :class:`Subsequence` or a list of events. A cluster with
    fewer than ``k`` members contributes all of them; see
    :meth:`ClusterIndex.candidates` for the empty-cluster fallback.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    traj = interpolate(query, index.final_duration)
    labels = nearest_labels(index, traj, index.key_for(query), exclude=exclude, stats=stats)
    return mean_of_first(labels, k, index.global_mean_label)


def save_index(index: ClusterIndex, path) -> None:
    """Write the versioned binary cache (header, then one block per cluster)."""
    g = index.grid
    with open(path, "wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<I", INDEX_VERSION))
        fh.write(struct.pack("<?IIdddddQId", index.clustered, g.n_cols, g.n_rows, g.cell_length,
                             g.cell_width, g.pitch_length, g.pitch_width, index.final_duration,
                             len(index), len(index.clusters), index.global_mean_label))
        lengths = np.diff(index.offsets)
        for key in sorted(index.clusters):
            members = index.clusters[key]
            fh.write(struct.pack("<QQ", key, len(members)))
            fh.write(members.astype("<u8").tobytes())
            fh.write(index.seq_ids[members].astype("<i8").tobytes())
            fh.write(index.labels[members].astype("<f8").tobytes())
            fh.write(lengths[members].astype("<u4").tobytes())
            for arr in (index.flat_x, index.flat_y):
                fh.write(np.concatenate([arr[index.offsets[i]:index.offsets[i + 1]] for i in members])
                         .astype("<f8").tobytes())


def load_index(path) -> ClusterIndex:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(INDEX_MAGIC):
        raise ValueError(f"{path}: not an index cache file")
    pos = len(INDEX_MAGIC)
    (version,) = struct.unpack_from("<I", data, pos)
    if version != INDEX_VERSION:
        raise ValueError(f"{path}: index cache version {version}, expected {INDEX_VERSION}")
    pos += 4
    head = struct.Struct("<?IIdddddQId")
    (clustered, n_cols, n_rows, cl, cw, pl, pw, final_duration,
     n_stored, n_clusters, _) = head.unpack_from(data, pos)
    pos += head.size
    grid = GridSpec(cl, cw, pl, pw)
    if (grid.n_cols, grid.n_rows) != (n_cols, n_rows):
        raise ValueError(f"{path}: grid dimensions do not match cell sizes")
    trajs: list = [None] * n_stored
    labels = np.zeros(n_stored)
    seq_ids = np.zeros(n_stored, dtype=np.int64)
    keys = np.zeros(n_stored, dtype=np.int64)
    for _ in range(n_clusters):
        key, count = struct.unpack_from("<QQ", data, pos)
        pos += 16

        def take(dtype, n):
            nonlocal pos
            arr = np.frombuffer(data, dtype=dtype, count=n, offset=pos)
            pos += arr.nbytes
            return arr

        members = take("<u8", count).astype(np.int64)
        sids, labs, lens = take("<i8", count), take("<f8", count), take("<u4", count).astype(np.int64)
        total = int(lens.sum())
        xs, ys = take("<f8", total), take("<f8", total)
        cut = np.concatenate([[0], np.cumsum(lens)])
        for j, i in enumerate(members):
            trajs[i] = Trajectory(xs[cut[j]:cut[j + 1]].copy(), ys[cut[j]:cut[j + 1]].copy())
        labels[members], seq_ids[members], keys[members] = labs, sids, key
    if pos != len(data):
        raise ValueError(f"{path}: trailing bytes in index cache")
    return _from_trajectories(trajs, labels, seq_ids, keys, grid, clustered, final_duration)
