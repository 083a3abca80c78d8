"""Exact nearest-state search over the observation set: k-d tree plus a linear-scan oracle.

Both search paths compute per-row distances through the same helper, so the tree
and the oracle agree bit-exactly on distances; ties are always broken by the
smallest canonical position (the (rollout_id, t) order of the observation set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .env import State

_LEAF_SIZE = 32


class Metric(str, Enum):
    L1 = "L1"
    L2 = "L2"


@dataclass(frozen=True)
class NearestResult:
    state: State
    dist: float
    canonical_pos: int


def _as_query(s: State, weights: np.ndarray | None) -> np.ndarray:
    q = np.array(s.as_tuple(), dtype=np.float64)
    if weights is not None:
        q = q * weights
    return q


def _row_costs(points: np.ndarray, q: np.ndarray, metric: Metric) -> np.ndarray:
    """Per-row comparison cost: L1 distance, or squared L2 (monotone in L2)."""
    d = points - q
    if metric is Metric.L1:
        return np.abs(d).sum(axis=1)
    return (d * d).sum(axis=1)


def _public_dist(cost: float, metric: Metric) -> float:
    return cost if metric is Metric.L1 else math.sqrt(cost)


def _prepare_points(states: list[State], weights=None) -> tuple[np.ndarray, np.ndarray | None]:
    if not states:
        raise ValueError("states must be non-empty")
    pts = np.array([s.as_tuple() for s in states], dtype=np.float64)
    w = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (4,) or not np.all(w > 0):
            raise ValueError("weights must be four positive values")
        pts = pts * w
    return pts, w


class LinearIndex:
    """Brute-force oracle with the same interface and tie-breaking as StateIndex."""

    def __init__(self, states: list[State], metric: Metric = Metric.L1, weights=None):
        self.states = list(states)
        self.metric = Metric(metric)
        self.points, self.weights = _prepare_points(self.states, weights)

    def __len__(self) -> int:
        return len(self.states)

    def nearest(self, s: State, exclude: int = -1) -> NearestResult:
        q = _as_query(s, self.weights)
        costs = _row_costs(self.points, q, self.metric)
        if 0 <= exclude < len(costs):
            costs = costs.copy()
            costs[exclude] = np.inf
        i = int(np.argmin(costs))
        return NearestResult(self.states[i], _public_dist(float(costs[i]), self.metric), i)


class StateIndex:
    """k-d tree over the canonical state list with rectangle lower bounds.

    Leaves hold up to _LEAF_SIZE rows sorted by canonical position and are scanned
    vectorized; a subtree is pruned only when its bounding-box lower bound strictly
    exceeds the current best cost, so equal-distance candidates stay reachable and
    the canonical tie-break is exact.
    """

    def __init__(self, states: list[State], metric: Metric = Metric.L1, weights=None):
        self.states = list(states)
        self.metric = Metric(metric)
        self.points, self.weights = _prepare_points(self.states, weights)
        n = len(self.states)
        # Node storage built by _build; plain lists keep per-node access cheap.
        self._split_dim: list[int] = []
        self._split_val: list[float] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._bb_lo: list[tuple[float, float, float, float]] = []
        self._bb_hi: list[tuple[float, float, float, float]] = []
        self._leaf_rows: list[np.ndarray | None] = []
        self._leaf_pts: list[np.ndarray | None] = []
        self._root = self._build(np.arange(n, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.states)

    def _new_node(self) -> int:
        node = len(self._split_dim)
        self._split_dim.append(-1)
        self._split_val.append(0.0)
        self._left.append(-1)
        self._right.append(-1)
        self._bb_lo.append((0.0, 0.0, 0.0, 0.0))
        self._bb_hi.append((0.0, 0.0, 0.0, 0.0))
        self._leaf_rows.append(None)
        self._leaf_pts.append(None)
        return node

    def _build(self, rows: np.ndarray) -> int:
        node = self._new_node()
        pts = self.points[rows]
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        self._bb_lo[node] = tuple(lo.tolist())
        self._bb_hi[node] = tuple(hi.tolist())
        if len(rows) <= _LEAF_SIZE:
            ordered = np.sort(rows)
            self._leaf_rows[node] = ordered
            self._leaf_pts[node] = self.points[ordered]
            return node
        dim = int(np.argmax(hi - lo))
        mid = len(rows) // 2
        order = np.argpartition(pts[:, dim], mid)
        rows = rows[order]
        self._split_dim[node] = dim
        self._split_val[node] = float(self.points[rows[mid], dim])
        left = self._build(rows[:mid])
        right = self._build(rows[mid:])
        self._left[node] = left
        self._right[node] = right
        return node

    def _bound(self, node: int, q: tuple[float, ...]) -> float:
        lo = self._bb_lo[node]
        hi = self._bb_hi[node]
        total = 0.0
        if self.metric is Metric.L1:
            for i in range(4):
                v = q[i]
                if v < lo[i]:
                    total += lo[i] - v
                elif v > hi[i]:
                    total += v - hi[i]
        else:
            for i in range(4):
                v = q[i]
                if v < lo[i]:
                    d = lo[i] - v
                    total += d * d
                elif v > hi[i]:
                    d = v - hi[i]
                    total += d * d
        return total

    def nearest(self, s: State, exclude: int = -1) -> NearestResult:
        """Global minimizer of the metric over all points, ties to the smallest
        canonical position; exclude skips one canonical position (leave-one-out)."""
        q_arr = _as_query(s, self.weights)
        q = tuple(q_arr.tolist())
        metric = self.metric
        best_cost = math.inf
        best_pos = len(self.states)
        stack = [self._root]
        while stack:
            node = stack.pop()
            if self._bound(node, q) > best_cost:
                continue
            rows = self._leaf_rows[node]
            if rows is not None:
                costs = _row_costs(self._leaf_pts[node], q_arr, metric)
                if exclude >= 0:
                    mask = rows == exclude
                    if mask.any():
                        costs = costs.copy()
                        costs[mask] = np.inf
                j = int(np.argmin(costs))
                cost = float(costs[j])
                pos = int(rows[j])
                if cost < best_cost or (cost == best_cost and pos < best_pos):
                    best_cost = cost
                    best_pos = pos
                continue
            if q[self._split_dim[node]] < self._split_val[node]:
                near, far = self._left[node], self._right[node]
            else:
                near, far = self._right[node], self._left[node]
            stack.append(far)
            stack.append(near)
        return NearestResult(self.states[best_pos], _public_dist(best_cost, metric), best_pos)


def build_index(states: list[State], metric: Metric = Metric.L1, weights=None) -> StateIndex:
    return StateIndex(states, metric, weights)


def metric_distance(a: State, b: State, metric: Metric = Metric.L1, weights=None) -> float:
    """State-to-state distance through the same row helper the indexes use."""
    metric = Metric(metric)
    w = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
    pa = _as_query(a, w)[None, :]
    qb = _as_query(b, w)
    return _public_dist(float(_row_costs(pa, qb, metric)[0]), metric)
