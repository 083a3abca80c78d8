"""Per-tick control loops: OOD detection, state projection, policy query, and
disjoint user/robot action composition, plus the no-projection baseline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .detector import DetectorModel
from .env import Action, NavEnv, State
from .errors import PipelineError
from .policies import Policy
from .projection import StateIndex

AXES = ("x", "y")


@dataclass(frozen=True)
class AxisPartition:
    """Disjoint split of the action axes between user and robot."""

    user_axes: frozenset[str]

    def __post_init__(self) -> None:
        if not self.user_axes <= set(AXES):
            raise ValueError(f"user axes must be a subset of {AXES}")

    @property
    def robot_axes(self) -> frozenset[str]:
        return frozenset(AXES) - self.user_axes


@dataclass(frozen=True, eq=True)
class UserCommand:
    """Per-tick user signal; populated only on the axes the user owns."""

    axes: Mapping[str, float]

    def __post_init__(self) -> None:
        if not set(self.axes) <= set(AXES):
            raise ValueError(f"command axes must be a subset of {AXES}")
        object.__setattr__(self, "axes", dict(self.axes))

    @property
    def partition(self) -> AxisPartition:
        return AxisPartition(frozenset(self.axes))

    def value(self, axis: str) -> float:
        return self.axes.get(axis, 0.0)


def zero_command(partition: AxisPartition) -> UserCommand:
    return UserCommand({axis: 0.0 for axis in partition.user_axes})


@dataclass(frozen=True)
class StepDecision:
    """Full audit record of one control tick."""

    t: int
    input_state: State
    ood: bool
    imagined_state: Optional[State]
    robot_action: Action
    user_command: UserCommand
    composed_action: Action
    next_state: State
    reward: float


def compose(u: UserCommand, a: Action, p: AxisPartition) -> Action:
    """Disjoint combination: user-axis components from u, robot-axis from a.

    No blending or scaling on any axis.
    """
    if not set(u.axes) <= p.user_axes:
        raise ValueError("command populates axes outside the user partition")
    dx = u.value("x") if "x" in p.user_axes else a.dx
    dy = u.value("y") if "y" in p.user_axes else a.dy
    return Action(dx, dy)


def _check_command(u: UserCommand, env: NavEnv) -> None:
    for axis, v in u.axes.items():
        if abs(v) > env.a_max:
            raise ValueError(f"user command {axis}={v} exceeds the magnitude bound {env.a_max}")


def ioda_step(
    s: State,
    u: UserCommand,
    policy: Policy,
    detector: DetectorModel,
    index: StateIndex,
    env: NavEnv,
    t: int = 0,
) -> StepDecision:
    """One projected-control tick.

    When the detector flags the state, the policy is queried at the nearest
    observed state instead; the transition always uses the real state. Pure in
    its inputs.
    """
    if detector.index is not index:
        raise PipelineError("detector and projection were assembled over different indexes")
    _check_command(u, env)
    ood = detector.is_ood(s)
    if ood:
        imagined: Optional[State] = index.nearest(s).state
        robot_action = policy.act(imagined)
    else:
        imagined = None
        robot_action = policy.act(s)
    composed = compose(u, robot_action, u.partition)
    next_state = env.step(s, composed)
    return StepDecision(
        t=t,
        input_state=s,
        ood=ood,
        imagined_state=imagined,
        robot_action=robot_action,
        user_command=u,
        composed_action=composed,
        next_state=next_state,
        reward=env.reward(s, composed),
    )


def baseline_step(
    s: State,
    u: UserCommand,
    policy: Policy,
    env: NavEnv,
    t: int = 0,
) -> StepDecision:
    """One tick with detection and projection skipped; the policy always sees the real state."""
    _check_command(u, env)
    robot_action = policy.act(s)
    composed = compose(u, robot_action, u.partition)
    next_state = env.step(s, composed)
    return StepDecision(
        t=t,
        input_state=s,
        ood=False,
        imagined_state=None,
        robot_action=robot_action,
        user_command=u,
        composed_action=composed,
        next_state=next_state,
        reward=env.reward(s, composed),
    )


@dataclass(frozen=True)
class ControlStack:
    """Assembled loop components, validated to share one environment and one
    observation set so the detector and the projection cannot disagree on it."""

    env: NavEnv
    policy: Policy
    detector: DetectorModel
    index: StateIndex

    def __post_init__(self) -> None:
        if self.policy.env != self.env:
            raise PipelineError("policy was bound to a different environment")
        if self.detector.index is not self.index:
            raise PipelineError("detector and projection must share one index over the same states")

    def ioda_step(self, s: State, u: UserCommand, t: int = 0) -> StepDecision:
        return ioda_step(s, u, self.policy, self.detector, self.index, self.env, t)

    def baseline_step(self, s: State, u: UserCommand, t: int = 0) -> StepDecision:
        return baseline_step(s, u, self.policy, self.env, t)
