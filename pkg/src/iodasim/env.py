"""2D continuous goal-navigation environment: point-mass dynamics, reward variants, workspace geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class EnvVariant(str, Enum):
    UNCONSTRAINED = "UNCONSTRAINED"
    LEAVE_PENALTY = "LEAVE_PENALTY"
    FREEZE_Y_OUTSIDE = "FREEZE_Y_OUTSIDE"


def _require_finite(label: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{label} requires finite values, got {v!r}")


def clamp(v: float, lo: float, hi: float) -> float:
    """Single clamp implementation shared by dynamics, policies and the user controller."""
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite("Vec2", self.x, self.y)


@dataclass(frozen=True)
class State:
    """Agent position plus commanded goal; the 4-vector every component exchanges."""

    agent: Vec2
    goal: Vec2

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.agent.x, self.agent.y, self.goal.x, self.goal.y)


@dataclass(frozen=True)
class Action:
    dx: float
    dy: float

    def __post_init__(self) -> None:
        _require_finite("Action", self.dx, self.dy)


@dataclass(frozen=True)
class WorkspaceSpec:
    """Axis-aligned workspace rectangle strictly inside the world rectangle."""

    min: Vec2
    max: Vec2
    world_min: Vec2
    world_max: Vec2

    def __post_init__(self) -> None:
        if not (self.min.x < self.max.x and self.min.y < self.max.y):
            raise ValueError("workspace min must be strictly below max componentwise")
        if not (
            self.world_min.x < self.min.x
            and self.world_min.y < self.min.y
            and self.max.x < self.world_max.x
            and self.max.y < self.world_max.y
        ):
            raise ValueError("workspace must lie strictly inside the world rectangle")


def in_workspace(p: Vec2, w: WorkspaceSpec) -> bool:
    """Closed-rectangle test: boundary points count as inside."""
    return w.min.x <= p.x <= w.max.x and w.min.y <= p.y <= w.max.y


DEFAULT_WORKSPACE = WorkspaceSpec(
    min=Vec2(0.0, 0.0),
    max=Vec2(1.0, 1.0),
    world_min=Vec2(-0.5, -0.5),
    world_max=Vec2(1.5, 1.5),
)


@dataclass(frozen=True)
class NavEnv:
    """Immutable environment configuration plus pure dynamics/reward functions.

    Dynamics clamp to the world rectangle and never terminate; the reward is the
    negative Euclidean goal distance minus per-variant penalties for being outside
    the workspace.
    """

    variant: EnvVariant = EnvVariant.UNCONSTRAINED
    workspace: WorkspaceSpec = DEFAULT_WORKSPACE
    a_max: float = 0.05
    c_leave: float = 1.0
    c_ymove: float = 10.0
    goal_tolerance: float = 0.02
    episode_cap: int = 400

    def in_workspace(self, p: Vec2) -> bool:
        return in_workspace(p, self.workspace)

    def make_state(self, agent: Vec2, goal: Vec2) -> State:
        """Construct a state, enforcing the goal-in-workspace / agent-in-world invariants."""
        w = self.workspace
        if not in_workspace(goal, w):
            raise ValueError(f"goal {goal} lies outside the workspace")
        if not (w.world_min.x <= agent.x <= w.world_max.x and w.world_min.y <= agent.y <= w.world_max.y):
            raise ValueError(f"agent {agent} lies outside the world bounds")
        return State(agent=agent, goal=goal)

    def step(self, s: State, a: Action) -> State:
        """Additive point-mass dynamics, clamped to the world rectangle; goal unchanged."""
        if abs(a.dx) > self.a_max or abs(a.dy) > self.a_max:
            raise ValueError(f"action {a} exceeds the per-step magnitude bound {self.a_max}")
        w = self.workspace
        agent = Vec2(
            clamp(s.agent.x + a.dx, w.world_min.x, w.world_max.x),
            clamp(s.agent.y + a.dy, w.world_min.y, w.world_max.y),
        )
        return State(agent=agent, goal=s.goal)

    def goal_distance(self, s: State) -> float:
        return math.hypot(s.agent.x - s.goal.x, s.agent.y - s.goal.y)

    def reward(self, s: State, a: Action) -> float:
        """Negative goal distance minus variant penalties; always <= 0."""
        r = -self.goal_distance(s)
        if not self.in_workspace(s.agent):
            if self.variant is EnvVariant.LEAVE_PENALTY:
                r -= self.c_leave
            elif self.variant is EnvVariant.FREEZE_Y_OUTSIDE:
                r -= self.c_leave + self.c_ymove * abs(a.dy)
        return r

    def with_variant(self, variant: EnvVariant) -> "NavEnv":
        return replace(self, variant=variant)
