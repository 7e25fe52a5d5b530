"""Ball trajectories sampled once per second, and DTW distances between them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .events import Event

PASS_DURATION = 1.5  # seconds assumed for a pass with no following event


@dataclass(frozen=True, eq=False)
class Trajectory:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("trajectory needs matching xs/ys with at least two samples")

    def __len__(self) -> int:
        return len(self.xs)


def anchors(events: Sequence[Event], final_duration: float = PASS_DURATION):
    """Time-stamped ball positions through which the path is interpolated.

    Every event contributes ``(t, start)``. An event that moves the ball also
    contributes ``(t_next, end)``, where ``t_next`` is the following event's
    timestamp, or ``t + final_duration`` for the last event.
    """
    pts = []
    for j, e in enumerate(events):
        pts.append((e.timestamp, e.start.x, e.start.y))
        if e.end != e.start:
            t_end = events[j + 1].timestamp if j + 1 < len(events) else e.timestamp + final_duration
            pts.append((t_end, e.end.x, e.end.y))
    return np.asarray(pts, dtype=float).reshape(-1, 3)


def interpolate(events: Sequence[Event], final_duration: float = PASS_DURATION) -> Trajectory:
    """Sample the piecewise-linear ball path at one-second steps.

    Samples fall at ``t0, t0 + 1, ...`` and the final anchor is always
    included; a path shorter than a second yields its first and last anchors.
    Accepts a :class:`~passvalue.possession.Subsequence` or a list of events.
    """
    events = getattr(events, "events", events)
    if not events:
        raise ValueError("cannot interpolate an empty subsequence")
    pts = anchors(events, final_duration)
    ts = pts[:, 0]
    if np.any(np.diff(ts) < 0):
        raise ValueError("anchor timestamps are not monotone")
    t0, t1 = ts[0], ts[-1]
    steps = t0 + np.arange(math.floor(t1 - t0) + 1, dtype=float)
    if steps[-1] < t1:
        steps = np.append(steps, t1)
    if len(steps) < 2:
        return Trajectory(pts[[0, -1], 1].copy(), pts[[0, -1], 2].copy())
    k = np.searchsorted(ts, steps, side="right") - 1
    k = np.minimum(k, len(ts) - 1)
    nxt = np.minimum(k + 1, len(ts) - 1)
    span = ts[nxt] - ts[k]
    w = np.where(span > 0, (steps - ts[k]) / np.where(span > 0, span, 1.0), 0.0)
    xs = pts[k, 1] + w * (pts[nxt, 1] - pts[k, 1])
    ys = pts[k, 2] + w * (pts[nxt, 2] - pts[k, 2])
    # endpoints are exact anchors, not interpolated values
    xs[0], ys[0] = pts[0, 1], pts[0, 2]
    xs[-1], ys[-1] = pts[-1, 1], pts[-1, 2]
    return Trajectory(xs, ys)


@njit(cache=True, nogil=True)
def _dtw_into(a, flat, lo, hi, prev, cur):
    # DTW of a against flat[lo:hi]; prev/cur are caller-owned rolling rows
    m = hi - lo
    prev[0] = abs(a[0] - flat[lo])
    for j in range(1, m):
        prev[j] = prev[j - 1] + abs(a[0] - flat[lo + j])
    for i in range(1, a.shape[0]):
        ai = a[i]
        cur[0] = prev[0] + abs(ai - flat[lo])
        for j in range(1, m):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = best + abs(ai - flat[lo + j])
        prev, cur = cur, prev
    return prev[m - 1]


@njit(cache=True, nogil=True)
def _dtw(a, b):
    m = b.shape[0]
    return _dtw_into(a, b, 0, m, np.empty(m), np.empty(m))


@njit(cache=True, nogil=True)
def _batch_distance(qx, qy, flat_x, flat_y, offsets, members):
    width = 1
    for r in range(members.shape[0]):
        i = members[r]
        if offsets[i + 1] - offsets[i] > width:
            width = offsets[i + 1] - offsets[i]
    prev = np.empty(width)
    cur = np.empty(width)
    out = np.empty(members.shape[0])
    for r in range(members.shape[0]):
        i = members[r]
        lo, hi = offsets[i], offsets[i + 1]
        out[r] = _dtw_into(qx, flat_x, lo, hi, prev, cur) + _dtw_into(qy, flat_y, lo, hi, prev, cur)
    return out


def dtw_distance(a, b) -> float:
    """Unconstrained DTW with absolute-difference step cost."""
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or len(a) == 0 or len(b) == 0:
        raise ValueError("dtw_distance needs two non-empty 1-D series")
    return float(_dtw(a, b))


def subseq_distance(p: Trajectory, q: Trajectory) -> float:
    """Per-axis DTW on x and y, summed."""
    return dtw_distance(p.xs, q.xs) + dtw_distance(p.ys, q.ys)


def batch_distance(query: Trajectory, flat_x: np.ndarray, flat_y: np.ndarray,
                   offsets: np.ndarray, members: np.ndarray) -> np.ndarray:
    """:func:`subseq_distance` from ``query`` to each stored trajectory in ``members``.

    Stored trajectory ``i`` occupies ``flat_x[offsets[i]:offsets[i + 1]]``.
    """
    return _batch_distance(np.ascontiguousarray(query.xs, dtype=float),
                           np.ascontiguousarray(query.ys, dtype=float),
                           flat_x, flat_y, offsets, np.asarray(members, dtype=np.int64))
