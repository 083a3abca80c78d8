from __future__ import annotations

import math

import numpy as np
import pytest

from iodasim.env import (
    DEFAULT_WORKSPACE,
    Action,
    EnvVariant,
    NavEnv,
    State,
    Vec2,
    WorkspaceSpec,
    clamp,
    in_workspace,
)


def _clamp_oracle(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


def test_zero_action_is_identity(env_plain):
    s = State(Vec2(0.5, 0.5), Vec2(0.9, 0.9))
    nxt = env_plain.step(s, Action(0.0, 0.0))
    assert nxt == s


def test_step_is_additive(env_plain):
    s = State(Vec2(0.5, 0.5), Vec2(0.9, 0.9))
    nxt = env_plain.step(s, Action(0.05, -0.05))
    assert nxt.agent.x == pytest.approx(0.55)
    assert nxt.agent.y == pytest.approx(0.45)
    assert nxt.goal == s.goal


def test_step_clamps_to_world_bounds(env_plain):
    w = env_plain.workspace
    s = State(Vec2(w.world_max.x, w.world_max.y), Vec2(0.9, 0.9))
    nxt = env_plain.step(s, Action(0.05, 0.05))
    assert nxt.agent == s.agent


def test_step_matches_componentwise_clamp_oracle(env_plain):
    rng = np.random.default_rng(3)
    w = env_plain.workspace
    for _ in range(200):
        ax, ay = rng.uniform(-0.5, 1.5, 2)
        dx, dy = rng.uniform(-0.05, 0.05, 2)
        s = State(Vec2(float(ax), float(ay)), Vec2(0.5, 0.5))
        nxt = env_plain.step(s, Action(float(dx), float(dy)))
        assert nxt.agent.x == _clamp_oracle(s.agent.x + dx, w.world_min.x, w.world_max.x)
        assert nxt.agent.y == _clamp_oracle(s.agent.y + dy, w.world_min.y, w.world_max.y)


def test_step_is_deterministic(env_plain):
    s = State(Vec2(0.31, 0.62), Vec2(0.8, 0.2))
    a = Action(0.013, -0.041)
    assert env_plain.step(s, a) == env_plain.step(s, a)


def test_step_rejects_oversized_action(env_plain):
    s = State(Vec2(0.5, 0.5), Vec2(0.9, 0.9))
    with pytest.raises(ValueError):
        env_plain.step(s, Action(0.06, 0.0))


def test_vec2_rejects_non_finite():
    with pytest.raises(ValueError):
        Vec2(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Vec2(0.0, float("inf"))
    with pytest.raises(ValueError):
        Action(float("nan"), 0.0)


def test_reward_zero_at_goal(env_plain):
    s = State(Vec2(0.4, 0.4), Vec2(0.4, 0.4))
    assert env_plain.reward(s, Action(0.0, 0.0)) == 0.0


def test_reward_345_triangle(env_plain):
    s = State(Vec2(0.0, 0.0), Vec2(0.3, 0.4))
    assert env_plain.reward(s, Action(0.0, 0.0)) == -0.5


def test_reward_leave_penalty_recomputed_from_config(env_b):
    # agent outside the workspace at Euclidean goal distance 0.5
    s = State(Vec2(-0.3, 0.0), Vec2(0.0, 0.4))
    assert math.hypot(-0.3 - 0.0, 0.0 - 0.4) == 0.5
    expected = -0.5 - env_b.c_leave
    assert env_b.reward(s, Action(0.0, 0.0)) == expected


def test_reward_freeze_variant_charges_y_motion(env_c):
    s = State(Vec2(-0.3, 0.0), Vec2(0.0, 0.4))
    a = Action(0.0, 0.03)
    expected = -0.5 - env_c.c_leave - env_c.c_ymove * abs(a.dy)
    assert env_c.reward(s, a) == expected
    # dynamics are shared across variants
    assert env_c.step(s, a) == env_c.with_variant(EnvVariant.LEAVE_PENALTY).step(s, a)


def test_reward_never_positive(env_b):
    rng = np.random.default_rng(5)
    for _ in range(300):
        ax, ay = rng.uniform(-0.5, 1.5, 2)
        gx, gy = rng.uniform(0.0, 1.0, 2)
        dx, dy = rng.uniform(-0.05, 0.05, 2)
        s = State(Vec2(float(ax), float(ay)), Vec2(float(gx), float(gy)))
        r = env_b.reward(s, Action(float(dx), float(dy)))
        assert r <= 0.0
        if r == 0.0:
            assert s.agent == s.goal


def test_in_workspace_closed_boundary():
    w = DEFAULT_WORKSPACE
    assert in_workspace(Vec2(0.5, 0.5), w)
    assert in_workspace(Vec2(0.0, 0.0), w)
    assert in_workspace(Vec2(1.0, 1.0), w)
    assert not in_workspace(Vec2(1.01, 0.5), w)
    assert not in_workspace(Vec2(0.5, -0.01), w)


def test_workspace_spec_validation():
    with pytest.raises(ValueError):
        WorkspaceSpec(Vec2(0, 0), Vec2(0, 1), Vec2(-1, -1), Vec2(2, 2))
    with pytest.raises(ValueError):
        WorkspaceSpec(Vec2(0, 0), Vec2(2, 2), Vec2(-1, -1), Vec2(2, 2))


def test_make_state_enforces_invariants(env_plain):
    with pytest.raises(ValueError):
        env_plain.make_state(Vec2(0.5, 0.5), Vec2(1.2, 0.5))
    with pytest.raises(ValueError):
        env_plain.make_state(Vec2(2.0, 0.5), Vec2(0.5, 0.5))
    s = env_plain.make_state(Vec2(-0.2, 0.5), Vec2(0.5, 0.5))
    assert s.agent.x == -0.2


def test_clamp_helper():
    assert clamp(0.5, 0.0, 1.0) == 0.5
    assert clamp(-0.1, 0.0, 1.0) == 0.0
    assert clamp(1.7, 0.0, 1.0) == 1.0
