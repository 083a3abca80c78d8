"""Goal-conditioned reference policies, including deterministic surrogates of out-of-workspace behavior."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .env import Action, NavEnv, State, clamp

_M64 = (1 << 64) - 1

# Grid used to quantize states before hashing; makes the sporadic surrogate
# piecewise-constant and therefore reproducible in tests.
SPORADIC_QUANTUM = 0.01


class PolicyKind(str, Enum):
    PROPORTIONAL_OPTIMAL = "PROPORTIONAL_OPTIMAL"
    VARIANT_B_SPORADIC = "VARIANT_B_SPORADIC"
    VARIANT_C_FREEZE = "VARIANT_C_FREEZE"


@dataclass(frozen=True)
class PolicySpec:
    kind: PolicyKind = PolicyKind.PROPORTIONAL_OPTIMAL
    gain: float = 1.0
    noise_seed: int = 0

    def __post_init__(self) -> None:
        if not self.gain > 0:
            raise ValueError("policy gain must be positive")


def _mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def sporadic_unit_fraction(noise_seed: int, s: State) -> float:
    """Deterministic hash of (seed, quantized state) mapped into [0, 1)."""
    h = _mix64(noise_seed & _M64)
    for v in s.as_tuple():
        h = _mix64(h ^ (round(v / SPORADIC_QUANTUM) & _M64))
    return h / 2.0**64


@dataclass(frozen=True)
class Policy:
    """A policy spec bound to an environment's geometry; act() is pure in (spec, state)."""

    spec: PolicySpec
    env: NavEnv

    def act(self, s: State) -> Action:
        return act(self.spec, s, self.env)


def act(spec: PolicySpec, s: State, env: NavEnv) -> Action:
    """Deterministic action for a state.

    Inside the workspace all kinds agree: proportional pull toward the goal,
    clamped per axis. Outside, VARIANT_C_FREEZE zeroes dy and steers x back
    toward the workspace, while VARIANT_B_SPORADIC moves at full magnitude in a
    hashed pseudo-random direction.
    """
    a_max = env.a_max
    inside = env.in_workspace(s.agent)
    if spec.kind is PolicyKind.PROPORTIONAL_OPTIMAL or inside:
        dx = clamp(spec.gain * (s.goal.x - s.agent.x), -a_max, a_max)
        dy = clamp(spec.gain * (s.goal.y - s.agent.y), -a_max, a_max)
        return Action(dx, dy)
    if spec.kind is PolicyKind.VARIANT_C_FREEZE:
        ws = env.workspace
        nearest_x = clamp(s.agent.x, ws.min.x, ws.max.x)
        dx = clamp(spec.gain * (nearest_x - s.agent.x), -a_max, a_max)
        return Action(dx, 0.0)
    theta = 2.0 * math.pi * sporadic_unit_fraction(spec.noise_seed, s)
    return Action(a_max * math.cos(theta), a_max * math.sin(theta))


def is_policy_optimal_rollout(policy: Policy, s0: State) -> bool:
    """True iff acting from s0 reaches the goal tolerance within the episode cap
    without the agent ever leaving the workspace."""
    env = policy.env
    if not env.in_workspace(s0.agent) or not env.in_workspace(s0.goal):
        return False
    s = s0
    for _ in range(env.episode_cap + 1):
        if not env.in_workspace(s.agent):
            return False
        if env.goal_distance(s) <= env.goal_tolerance:
            return True
        s = env.step(s, policy.act(s))
    return False
