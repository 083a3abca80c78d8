"""Distance-threshold out-of-distribution detection against the observation set."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .env import State
from .projection import Metric, StateIndex, build_index

EPSILON_FLOOR = 1e-6


@dataclass(frozen=True)
class DetectorCalibration:
    quantile: float
    leave_one_out: bool
    n_states: int
    # sorted distances the threshold was read from; kept for reporting
    distances: tuple[float, ...] = ()


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detector sharing its spatial index with the projection step.

    A state is out-of-distribution iff its minimum metric distance to the
    reference states strictly exceeds epsilon; the boundary counts as
    in-distribution.
    """

    index: StateIndex
    epsilon: float
    calibration: DetectorCalibration | None = None

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if len(self.index) == 0:
            raise ValueError("reference states must be non-empty")

    @property
    def metric(self) -> Metric:
        return self.index.metric

    @property
    def reference_states(self) -> list[State]:
        return self.index.states

    def min_distance(self, s: State) -> float:
        return self.index.nearest(s).dist

    def is_ood(self, s: State) -> bool:
        return self.min_distance(s) > self.epsilon


def leave_one_out_distances(index: StateIndex) -> list[float]:
    """Nearest-neighbor distance of each reference state to the rest of the set.

    Exclusion is by canonical position, so duplicated states see each other at
    distance zero.
    """
    return [index.nearest(index.states[i], exclude=i).dist for i in range(len(index))]


def _order_statistic(sorted_values: list[float], q: float, n: int) -> float:
    # ceil with a small negative nudge so exact-integer products (0.99*1000)
    # are not pushed up a rank by float representation error.
    k = min(n, max(1, math.ceil(q * n - 1e-9)))
    return sorted_values[k - 1]


def calibrate(
    states: list[State],
    metric: Metric = Metric.L1,
    q: float = 0.99,
    index: StateIndex | None = None,
) -> DetectorModel:
    """Set epsilon to the q-quantile of leave-one-out nearest-neighbor distances.

    Degenerate sets (all-duplicate states) are floored at EPSILON_FLOOR rather
    than rejected; fewer than two states is an error.
    """
    if len(states) < 2:
        raise ValueError("calibration requires at least 2 states")
    if not 0.0 < q <= 1.0:
        raise ValueError("quantile must lie in (0, 1]")
    if index is None:
        index = build_index(states, metric)
    elif index.metric is not Metric(metric) or len(index) != len(states):
        raise ValueError("provided index does not match the calibration states/metric")
    distances = sorted(leave_one_out_distances(index))
    eps = max(_order_statistic(distances, q, len(distances)), EPSILON_FLOOR)
    calibration = DetectorCalibration(
        quantile=q, leave_one_out=True, n_states=len(states), distances=tuple(distances)
    )
    return DetectorModel(index=index, epsilon=eps, calibration=calibration)
