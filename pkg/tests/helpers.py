"""Event factories and independent reference implementations used as test oracles.

Nothing here imports the package's algorithms; oracles are written from the
definitions so that agreement with the package is meaningful.
"""

from __future__ import annotations

import math

import numpy as np

from passvalue.events import Event, EventKind, PitchPoint, SubKind, default_taxonomy

TAX = default_taxonomy()

# (criterion number, passed, summary) rows reported at the end of the run
ACCEPTANCE: list[tuple[int, bool, str]] = []


def ev(t, team=1, kind="Pass", start=(50.0, 34.0), end=None, *, player=None, half=1, game=1,
       subkind=None):
    kind = EventKind(kind)
    if subkind is None:
        subkind = {EventKind.PASS: SubKind.OPEN_PLAY, EventKind.SHOT: SubKind.OPEN_PLAY}.get(kind, SubKind.NONE)
    subkind = SubKind(subkind)
    type_code, subtype_code = TAX.codes_for(kind, subkind)
    start = PitchPoint(*start)
    end = start if end is None else PitchPoint(*end)
    return Event(game, half, float(t), team, player if player is not None else 100 + team, kind, subkind,
                 start, end, type_code, subtype_code)


def passes(n, team=1, t0=0.0, dt=2.0, x0=20.0, dx=5.0, y=34.0, **kw):
    """n chained passes moving the ball dx metres forward each."""
    out = []
    for i in range(n):
        xa, xb = x0 + i * dx, x0 + (i + 1) * dx
        out.append(ev(t0 + i * dt, team, "Pass", (xa, y), (xb, y), **kw))
    return out


# --- DTW -------------------------------------------------------------------

def dtw_paths(n, m):
    """Every monotone boundary-matching path with steps (1,0), (0,1), (1,1)."""
    def walk(i, j, path):
        if (i, j) == (n - 1, m - 1):
            yield path
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                yield from walk(a, b, path + [(a, b)])
    yield from walk(0, 0, [(0, 0)])


def dtw_bruteforce(a, b):
    return min(sum(abs(a[i] - b[j]) for i, j in p) for p in dtw_paths(len(a), len(b)))


def dtw_full_matrix(a, b):
    n, m = len(a), len(b)
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            D[i, j] = abs(a[i - 1] - b[j - 1]) + min(D[i - 1, j], D[i, j - 1], D[i - 1, j - 1])
    return float(D[n, m])


def knn_bruteforce(query, stored, labels, k):
    """Mean label of the k nearest (x, y) trajectories under summed per-axis DTW.

    Ties keep insertion order.
    """
    d = [dtw_full_matrix(query[0], s[0]) + dtw_full_matrix(query[1], s[1]) for s in stored]
    order = sorted(range(len(stored)), key=lambda i: (d[i], i))
    take = order[:k]
    return sum(labels[i] for i in take) / len(take)


# --- geometry ----------------------------------------------------------------

def angle_by_sampling(x, y, n=200_000):
    """Subtended goal angle from summed small angles along the goal mouth."""
    ys = np.linspace(34 - 3.66, 34 + 3.66, n)
    ang = np.arctan2(ys - y, 105.0 - x)
    return float(np.sum(np.abs(np.diff(np.unwrap(ang)))))


def angle_by_cosines(x, y):
    a = math.hypot(105 - x, 34 - 3.66 - y)
    b = math.hypot(105 - x, 34 + 3.66 - y)
    c = 2 * 3.66
    return math.acos(max(-1.0, min(1.0, (a * a + b * b - c * c) / (2 * a * b))))


# --- trees -----------------------------------------------------------------

def best_split_bruteforce(X, g, h, rows, lam, mcw):
    """Exhaustive split search at one node: (gain, feature, threshold) or None."""
    G, H = g[rows].sum(), h[rows].sum()
    parent = G * G / (H + lam)
    best = None
    for f in range(X.shape[1]):
        values = sorted(set(X[rows, f]))
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2
            left = rows[X[rows, f] < thr]
            right = rows[X[rows, f] >= thr]
            HL, HR = h[left].sum(), h[right].sum()
            if HL < mcw or HR < mcw:
                continue
            GL, GR = g[left].sum(), g[right].sum()
            gain = (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent) / 2
            # relative 1e-9 tie tolerance: the earlier feature/threshold wins
            if gain > 0 and (best is None or gain > best[0] * (1 + 1e-9)):
                best = (gain, f, thr)
    return best


def tree_bruteforce(X, g, h, depth, lam=1e-4, mcw=1e-5):
    """Recursive exact-greedy regression tree; returns a predict function."""
    def build(rows, d):
        split = best_split_bruteforce(X, g, h, rows, lam, mcw) if d < depth and len(rows) > 1 else None
        if split is None:
            return -g[rows].sum() / (h[rows].sum() + lam)
        _, f, thr = split
        return (f, thr, build(rows[X[rows, f] < thr], d + 1), build(rows[X[rows, f] >= thr], d + 1))

    root = build(np.arange(len(X)), 0)

    def predict(x):
        node = root
        while isinstance(node, tuple):
            f, thr, lt, rt = node
            node = lt if x[f] < thr else rt
        return node

    return predict


# --- outcomes ----------------------------------------------------------------

def entropy(p):
    return -sum(q * math.log(q) for q in p)


def verdict(n: int, ok: bool, summary: str) -> None:
    """Record and print one acceptance line, then fail the test if needed."""
    ACCEPTANCE.append((n, bool(ok), summary))
    print(f"criterion {n} {'PASS' if ok else 'FAIL'}: {summary}")
    assert ok, summary

