"""Simulated user, closest-observed-state expectation model, and predictability metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .control import ControlStack, StepDecision, UserCommand, compose
from .env import State, Vec2, clamp
from .projection import Metric, metric_distance


@dataclass(frozen=True)
class SubgoalPlan:
    """The user's waypoint sequence: subgoals (possibly outside the workspace)
    followed by the in-workspace primary goal."""

    subgoals: tuple[Vec2, ...]
    primary_goal: Vec2
    reach_radius: float = 0.05

    def __post_init__(self) -> None:
        if not self.reach_radius > 0:
            raise ValueError("reach radius must be positive")

    @property
    def total_subgoals(self) -> int:
        return len(self.subgoals)


@dataclass
class PlanProgress:
    """Per-session progress through a plan; the target index never decreases."""

    next_index: int = 0
    primary_reached: bool = False


def current_target(plan: SubgoalPlan, progress: PlanProgress) -> Vec2:
    if progress.next_index < len(plan.subgoals):
        return plan.subgoals[progress.next_index]
    return plan.primary_goal


def advance_progress(plan: SubgoalPlan, progress: PlanProgress, agent: Vec2) -> None:
    """Advance past every target within the reach radius of the agent."""
    while not progress.primary_reached:
        target = current_target(plan, progress)
        if math.hypot(agent.x - target.x, agent.y - target.y) > plan.reach_radius:
            return
        if progress.next_index < len(plan.subgoals):
            progress.next_index += 1
        else:
            progress.primary_reached = True


def sim_user_command(
    s: State,
    plan: SubgoalPlan,
    progress: PlanProgress,
    user_axes: frozenset[str] = frozenset({"x"}),
    gain: float = 1.0,
    a_max: float = 0.05,
) -> UserCommand:
    """Proportional position controller on the user-owned axes toward the current target."""
    target = current_target(plan, progress)
    values = {}
    if "x" in user_axes:
        values["x"] = clamp(gain * (target.x - s.agent.x), -a_max, a_max)
    if "y" in user_axes:
        values["y"] = clamp(gain * (target.y - s.agent.y), -a_max, a_max)
    return UserCommand(values)


@dataclass(frozen=True)
class ExpectationModel:
    """The user's predicted next state under the closest-observed-state assumption.

    Prediction projects onto the nearest observed state only when the shared
    detector flags the current state; familiar states are predicted with the
    policy's actual behavior. Shares index, detector, policy and environment
    with the loop under test so the projection and tie-breaking are identical.
    """

    stack: ControlStack

    @property
    def metric(self) -> Metric:
        return self.stack.index.metric

    def expected_next(self, s: State, u: UserCommand) -> State:
        stack = self.stack
        if stack.detector.is_ood(s):
            basis = stack.index.nearest(s).state
        else:
            basis = s
        action = compose(u, stack.policy.act(basis), u.partition)
        return stack.env.step(s, action)

    def predictability_gap(self, decision: StepDecision) -> float:
        """Distance between the predicted and the realized next state; >= 0."""
        expected = self.expected_next(decision.input_state, decision.user_command)
        return metric_distance(expected, decision.next_state, self.metric, self.stack.index.weights)

    def predictability_witness(self, s: State, u: UserCommand) -> Optional[State]:
        """Search the observation set for a state whose substituted policy query
        brings the realized next state at least as close to the prediction as
        querying the real state does; the best candidate is returned only if it
        actually satisfies that inequality (re-checked with the scalar path)."""
        stack = self.stack
        env = stack.env
        w_next = self.expected_next(s, u)
        p = u.partition
        lhs_next = env.step(s, compose(u, stack.policy.act(s), p))
        lhs = metric_distance(w_next, lhs_next, self.metric, stack.index.weights)

        candidate = self._argmin_substituted(s, u, w_next)
        rhs_next = env.step(s, compose(u, stack.policy.act(candidate), p))
        rhs = metric_distance(w_next, rhs_next, self.metric, stack.index.weights)
        if rhs <= lhs:
            return candidate
        return None

    def _candidate_actions(self) -> np.ndarray:
        """Policy actions for every reference state, computed once per model.

        Reference states are in-workspace by construction, where every policy
        kind reduces to the clamped proportional pull, so the actions come from
        one array expression that matches act() bit-exactly.
        """
        cached = getattr(self, "_acts", None)
        if cached is None:
            stack = self.stack
            pts = np.array([st.as_tuple() for st in stack.index.states], dtype=np.float64)
            a_max = stack.env.a_max
            gain = stack.policy.spec.gain
            cached = np.minimum(np.maximum(gain * (pts[:, 2:4] - pts[:, 0:2]), -a_max), a_max)
            object.__setattr__(self, "_acts", cached)
        return cached

    def _argmin_substituted(self, s: State, u: UserCommand, w_next: State) -> State:
        """Vectorized brute force over the full observation set."""
        stack = self.stack
        env = stack.env
        acts = self._candidate_actions()
        composed = acts.copy()
        if "x" in u.axes:
            composed[:, 0] = u.value("x")
        if "y" in u.axes:
            composed[:, 1] = u.value("y")
        w = env.workspace
        world_lo = np.array([w.world_min.x, w.world_min.y])
        world_hi = np.array([w.world_max.x, w.world_max.y])
        next_agents = np.minimum(np.maximum(np.array([s.agent.x, s.agent.y]) + composed, world_lo), world_hi)
        next_full = np.concatenate(
            [next_agents, np.broadcast_to(np.array([s.goal.x, s.goal.y]), (len(acts), 2))], axis=1
        )
        target = np.array(w_next.as_tuple(), dtype=np.float64)
        weights = stack.index.weights
        if weights is not None:
            next_full = next_full * weights
            target = target * weights
        diff = next_full - target
        if self.metric is Metric.L1:
            costs = np.abs(diff).sum(axis=1)
        else:
            costs = (diff * diff).sum(axis=1)
        return stack.index.states[int(np.argmin(costs))]


@dataclass
class RunMetrics:
    """Per-run summary record, also the metrics file schema."""

    subgoals_reached: int
    total_subgoals: int
    primary_goal_reached: bool
    steps: int
    mean_gap: float
    max_gap: float
    ood_step_count: int

    @property
    def success(self) -> bool:
        return self.primary_goal_reached and self.subgoals_reached == self.total_subgoals

    def to_dict(self) -> dict:
        return {
            "subgoals_reached": self.subgoals_reached,
            "total_subgoals": self.total_subgoals,
            "primary_goal_reached": self.primary_goal_reached,
            "steps": self.steps,
            "mean_gap": self.mean_gap,
            "max_gap": self.max_gap,
            "ood_step_count": self.ood_step_count,
        }


@dataclass
class GapAccumulator:
    gaps: list[float] = field(default_factory=list)

    def add(self, gap: float) -> None:
        self.gaps.append(gap)

    @property
    def mean(self) -> float:
        return sum(self.gaps) / len(self.gaps) if self.gaps else 0.0

    @property
    def max(self) -> float:
        return max(self.gaps) if self.gaps else 0.0
