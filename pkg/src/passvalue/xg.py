"""Expected-goals model: gradient-boosted regression trees on shot location.

Trees are grown level-wise with exact greedy split search over the four
location features, logistic loss and Newton leaf weights. Gradients and the
regulariser are expressed per unit of training weight, so duplicating the
training set leaves the fitted model unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .events import PITCH_WIDTH, PITCH_LENGTH, Event, EventKind, SubKind

GOAL_CENTER = (PITCH_LENGTH, PITCH_WIDTH / 2)
GOAL_HALF_WIDTH = 3.66
DEFAULT_PENALTY_RATE = 0.76
MODEL_FORMAT = "passvalue-gbt"
MODEL_VERSION = 1
GAIN_TIE_RTOL = 1e-9  # split gains this close (relative) count as tied


class ShotFeatures(NamedTuple):
    x: float
    y: float
    dist: float
    angle: float


def shot_angle(x: float, y: float) -> float:
    """Angle in radians subtended by the goal posts at ``(x, y)``.

    Zero exactly at a post; pi strictly between the posts on the goal line.
    """
    gx, gy = GOAL_CENTER
    ux, uy = gx - x, gy - GOAL_HALF_WIDTH - y
    vx, vy = gx - x, gy + GOAL_HALF_WIDTH - y
    cross = ux * vy - uy * vx
    dot = ux * vx + uy * vy
    return math.atan2(abs(cross), dot)


def shot_features(shot: Event) -> ShotFeatures:
    if shot.kind is not EventKind.SHOT:
        raise ValueError(f"expected a shot, got {shot.kind.value}")
    x, y = shot.start
    gx, gy = GOAL_CENTER
    return ShotFeatures(x, y, math.hypot(gx - x, gy - y), shot_angle(x, y))


def feature_matrix(shots: Iterable[Event]) -> np.ndarray:
    rows = [shot_features(s) for s in shots]
    return np.asarray(rows, dtype=float).reshape(-1, 4)


@dataclass
class Tree:
    feature: np.ndarray    # -1 marks a leaf
    threshold: np.ndarray  # go left when x < threshold
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(X), dtype=np.int64)
        while True:
            feat = self.feature[idx]
            inner = feat >= 0
            if not inner.any():
                return self.value[idx]
            rows = np.nonzero(inner)[0]
            go_left = X[rows, feat[rows]] < self.threshold[idx[rows]]
            idx[rows] = np.where(go_left, self.left[idx[rows]], self.right[idx[rows]])

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(np.asarray(d["feature"], dtype=np.int64), np.asarray(d["threshold"], dtype=float),
                   np.asarray(d["left"], dtype=np.int64), np.asarray(d["right"], dtype=np.int64),
                   np.asarray(d["value"], dtype=float))


@dataclass
class GbtModel:
    base_score: float
    learning_rate: float = 0.01
    max_depth: int = 5
    trees: list[Tree] = field(default_factory=list)
    penalty_rate: float = DEFAULT_PENALTY_RATE

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, 4)
        out = np.full(len(X), self.base_score)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def to_json(self) -> str:
        return json.dumps({
            "format": MODEL_FORMAT, "version": MODEL_VERSION,
            "base_score": self.base_score, "learning_rate": self.learning_rate,
            "max_depth": self.max_depth, "penalty_rate": self.penalty_rate,
            "trees": [t.to_dict() for t in self.trees],
        })

    @classmethod
    def from_json(cls, text: str) -> "GbtModel":
        d = json.loads(text)
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model format {d.get('format')!r} v{d.get('version')!r}")
        return cls(d["base_score"], d["learning_rate"], d["max_depth"],
                   [Tree.from_dict(t) for t in d["trees"]], d["penalty_rate"])

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "GbtModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _grow_tree(X, orders, g, h, max_depth, reg_lambda, min_child_weight) -> Tree:
    n, n_feat = X.shape
    feature, threshold, left, right = [-1], [0.0], [-1], [-1]
    node = np.zeros(n, dtype=np.int64)
    G_node, H_node = [g.sum()], [h.sum()]
    frontier = [0]
    for _ in range(max_depth):
        if not frontier:
            break
        lo = frontier[0]  # frontier node ids are contiguous
        width = len(frontier)
        best_gain = np.zeros(width)
        best_feat = np.full(width, -1)
        best_thr = np.zeros(width)
        G_par = np.asarray(G_node[lo:lo + width])
        H_par = np.asarray(H_node[lo:lo + width])
        parent_score = G_par ** 2 / (H_par + reg_lambda)
        for f in range(n_feat):
            o = orders[f]
            local = node[o] - lo
            keep = (local >= 0) & (local < width)
            o = o[keep]
            local = local[keep].astype(np.int16)
            # radix sort on small ints keeps the per-feature value order within each node
            o = o[np.argsort(local, kind="stable")]
            local = node[o] - lo
            xs = X[o, f]
            Gc = np.cumsum(g[o])
            Hc = np.cumsum(h[o])
            starts = np.searchsorted(local, np.arange(width))
            G_before = np.where(starts > 0, Gc[np.maximum(starts - 1, 0)], 0.0)
            H_before = np.where(starts > 0, Hc[np.maximum(starts - 1, 0)], 0.0)
            GL = Gc - G_before[local]
            HL = Hc - H_before[local]
            GR = G_par[local] - GL
            HR = H_par[local] - HL
            valid = np.zeros(len(o), dtype=bool)
            if len(o) > 1:
                valid[:-1] = (local[:-1] == local[1:]) & (xs[:-1] < xs[1:])
            valid &= (HL >= min_child_weight) & (HR >= min_child_weight)
            if not valid.any():
                continue
            gain = np.full(len(o), -np.inf)
            gain[valid] = (GL[valid] ** 2 / (HL[valid] + reg_lambda)
                           + GR[valid] ** 2 / (HR[valid] + reg_lambda)
                           - parent_score[local[valid]]) / 2
            node_max = np.full(width, -np.inf)
            np.maximum.at(node_max, local[valid], gain[valid])
            # equal partitions can differ in the last bits; treat near-equal gains as ties
            hit = valid & (gain >= node_max[local] - GAIN_TIE_RTOL * np.abs(node_max[local]))
            nodes_hit, first = np.unique(local[hit], return_index=True)
            pos = np.nonzero(hit)[0][first]
            better = node_max[nodes_hit] > best_gain[nodes_hit] * (1 + GAIN_TIE_RTOL)
            nodes_hit, pos = nodes_hit[better], pos[better]
            best_gain[nodes_hit] = node_max[nodes_hit]
            best_feat[nodes_hit] = f
            mid = (xs[pos] + xs[pos + 1]) / 2
            best_thr[nodes_hit] = np.where(xs[pos] < mid, mid, xs[pos + 1])
        new_frontier = []
        for j in range(width):
            nid = lo + j
            if best_feat[j] < 0:
                continue
            f, thr = int(best_feat[j]), float(best_thr[j])
            feature[nid], threshold[nid] = f, thr
            members = np.nonzero(node == nid)[0]
            go_left = X[members, f] < thr
            for side, mask in (("l", go_left), ("r", ~go_left)):
                cid = len(feature)
                feature.append(-1)
                threshold.append(0.0)
                left.append(-1)
                right.append(-1)
                G_node.append(g[members[mask]].sum())
                H_node.append(h[members[mask]].sum())
                node[members[mask]] = cid
                new_frontier.append(cid)
                if side == "l":
                    left[nid] = cid
                else:
                    right[nid] = cid
        frontier = new_frontier
    G_arr, H_arr = np.asarray(G_node), np.asarray(H_node)
    value = -G_arr / (H_arr + reg_lambda)
    return Tree(np.asarray(feature, dtype=np.int64), np.asarray(threshold),
                np.asarray(left, dtype=np.int64), np.asarray(right, dtype=np.int64), value)


def train_xg(
    X,
    y,
    *,
    n_estimators: int = 500,
    learning_rate: float = 0.01,
    max_depth: int = 5,
    reg_lambda: float = 1e-4,
    min_child_weight: float = 1e-5,
    penalty_rate: float = DEFAULT_PENALTY_RATE,
) -> GbtModel:
    """Fit a boosted-tree scoring-probability model.

    Parameters
    ----------
    X : array-like, shape (n, 4)
        Rows of :class:`ShotFeatures`.
    y : array-like, shape (n,)
        1 for a goal, 0 otherwise.
    reg_lambda, min_child_weight : float
        L2 leaf penalty and minimum child hessian, both per unit of training
        weight (mean-loss scale).

    Split search is deterministic: ties go to the lowest feature index and
    then the lowest threshold.
    """
    X = np.asarray(X, dtype=float).reshape(-1, 4)
    y = np.asarray(y, dtype=float).ravel()
    if len(X) != len(y):
        raise ValueError("X and y lengths differ")
    pos = y.sum()
    if pos == 0 or pos == len(y):
        raise ValueError("training shots must include both goals and misses")
    rate = pos / len(y)
    model = GbtModel(math.log(rate / (1 - rate)), learning_rate, max_depth, [], penalty_rate)
    orders = [np.argsort(X[:, f], kind="stable") for f in range(X.shape[1])]
    raw = np.full(len(y), model.base_score)
    n = len(y)
    for _ in range(n_estimators):
        p = _sigmoid(raw)
        g = (p - y) / n
        h = p * (1 - p) / n
        tree = _grow_tree(X, orders, g, h, max_depth, reg_lambda, min_child_weight)
        model.trees.append(tree)
        raw += learning_rate * tree.predict(X)
    return model


def predict_xg(model: GbtModel, features) -> float | np.ndarray:
    """Scoring probability for one feature row or an (n, 4) array."""
    arr = np.asarray(features, dtype=float)
    out = model.predict_proba(arr.reshape(-1, 4))
    return float(out[0]) if arr.ndim == 1 else out


def shot_probability(model: GbtModel, shot: Event) -> float:
    """xG for a shot event; penalties bypass the trees."""
    if shot.subkind is SubKind.PENALTY:
        return model.penalty_rate
    return predict_xg(model, shot_features(shot))


def shot_probabilities(model: GbtModel, shots: Sequence[Event]) -> np.ndarray:
    """Vectorised :func:`shot_probability`."""
    out = np.full(len(shots), model.penalty_rate)
    rest = [i for i, s in enumerate(shots) if s.subkind is not SubKind.PENALTY]
    if rest:
        out[rest] = model.predict_proba(feature_matrix(shots[i] for i in rest))
    return out


def extract_shots(events: Sequence[Event]) -> list[tuple[Event, int]]:
    """Shots of one game with a goal flag (a same-team goal marker follows)."""
    out = []
    for i, e in enumerate(events):
        if e.kind is not EventKind.SHOT:
            continue
        nxt = events[i + 1] if i + 1 < len(events) else None
        scored = nxt is not None and nxt.kind is EventKind.GOAL and nxt.team_id == e.team_id
        out.append((e, int(scored)))
    return out


def fit_shot_model(shots: Sequence[tuple[Event, int]], **kwargs) -> GbtModel:
    """Train on open-play and set-piece shots; penalties set the penalty rate."""
    pens = [g for s, g in shots if s.subkind is SubKind.PENALTY]
    rest = [(s, g) for s, g in shots if s.subkind is not SubKind.PENALTY]
    kwargs.setdefault("penalty_rate", sum(pens) / len(pens) if pens else DEFAULT_PENALTY_RATE)
    X = feature_matrix(s for s, _ in rest)
    y = np.array([g for _, g in rest], dtype=float)
    return train_xg(X, y, **kwargs)
