"""Collection and persistence of the optimal-rollout observation set."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .env import Action, EnvVariant, NavEnv, State, Vec2
from .errors import CollectionError, RolloutFormatError
from .policies import Policy, PolicyKind, PolicySpec

FILE_VERSION = 1


@dataclass(frozen=True)
class StepRecord:
    rollout_id: int
    t: int
    state: State
    action: Action
    reward: float


@dataclass(frozen=True)
class RolloutMeta:
    policy: PolicySpec
    variant: EnvVariant
    seed: int
    version: int = FILE_VERSION


@dataclass(frozen=True)
class RolloutSet:
    """Ordered step records in (rollout_id, t) order; immutable after collection or load."""

    records: tuple[StepRecord, ...]
    meta: RolloutMeta

    def __len__(self) -> int:
        return len(self.records)


def _sample_start_goal(rng: np.random.Generator, env: NavEnv, min_separation: float) -> tuple[Vec2, Vec2]:
    ws = env.workspace
    while True:
        sx = float(rng.uniform(ws.min.x, ws.max.x))
        sy = float(rng.uniform(ws.min.y, ws.max.y))
        gx = float(rng.uniform(ws.min.x, ws.max.x))
        gy = float(rng.uniform(ws.min.y, ws.max.y))
        if math.hypot(gx - sx, gy - sy) >= min_separation:
            return Vec2(sx, sy), Vec2(gx, gy)


def rollout_records(policy: Policy, start: Vec2, goal: Vec2, rollout_id: int = 0) -> list[StepRecord]:
    """Run one rollout and record every visited state with its action and reward.

    The arrival state is recorded too (with the action the policy would take
    there), so a start-at-goal rollout has length 1. Raises CollectionError if
    the rollout leaves the workspace or misses the goal within the episode cap.
    """
    env = policy.env
    s = env.make_state(start, goal)
    records: list[StepRecord] = []
    t = 0
    while True:
        if not env.in_workspace(s.agent):
            raise CollectionError(f"rollout {rollout_id} left the workspace at step {t}")
        a = policy.act(s)
        records.append(StepRecord(rollout_id, t, s, a, env.reward(s, a)))
        if env.goal_distance(s) <= env.goal_tolerance:
            return records
        if t >= env.episode_cap:
            raise CollectionError(
                f"rollout {rollout_id} did not reach its goal within {env.episode_cap} steps"
            )
        s = env.step(s, a)
        t += 1


def collect(policy: Policy, n_rollouts: int, seed: int, min_separation: float = 0.1) -> RolloutSet:
    """Collect n_rollouts seeded rollouts of the policy from random in-workspace
    (start, goal) pairs.

    Every rollout must stay in the workspace and reach the goal tolerance within
    the episode cap; anything else signals a misconfigured policy/env pairing and
    raises CollectionError.
    """
    if n_rollouts < 1:
        raise ValueError("n_rollouts must be >= 1")
    env = policy.env
    rng = np.random.default_rng(seed)
    records: list[StepRecord] = []
    for rid in range(n_rollouts):
        start, goal = _sample_start_goal(rng, env, min_separation)
        records.extend(rollout_records(policy, start, goal, rid))
    meta = RolloutMeta(policy=policy.spec, variant=env.variant, seed=seed)
    return RolloutSet(records=tuple(records), meta=meta)


def all_states(rollout_set: RolloutSet) -> list[State]:
    """States in (rollout_id, t) order; this is the canonical tie-breaking order."""
    return [rec.state for rec in rollout_set.records]


def states_array(rollout_set: RolloutSet) -> np.ndarray:
    """Canonical states as an (n, 4) float64 array of [x, y, gx, gy] rows."""
    return np.array([rec.state.as_tuple() for rec in rollout_set.records], dtype=np.float64)


def _meta_dict(meta: RolloutMeta) -> dict:
    return {
        "meta": {
            "policy": {
                "kind": meta.policy.kind.value,
                "gain": meta.policy.gain,
                "noise_seed": meta.policy.noise_seed,
            },
            "variant": meta.variant.value,
            "seed": meta.seed,
            "version": meta.version,
        }
    }


def save(rollout_set: RolloutSet, path: str | Path) -> None:
    """Write the line-delimited rollout file; floats survive the round trip bit-exactly."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(_meta_dict(rollout_set.meta), separators=(",", ":")) + "\n")
        for rec in rollout_set.records:
            row = {
                "rollout_id": rec.rollout_id,
                "t": rec.t,
                "state": list(rec.state.as_tuple()),
                "action": [rec.action.dx, rec.action.dy],
                "reward": rec.reward,
            }
            fh.write(json.dumps(row, separators=(",", ":")) + "\n")


def _parse_meta(obj: dict) -> RolloutMeta:
    meta = obj["meta"]
    spec = PolicySpec(
        kind=PolicyKind(meta["policy"]["kind"]),
        gain=float(meta["policy"]["gain"]),
        noise_seed=int(meta["policy"]["noise_seed"]),
    )
    return RolloutMeta(
        policy=spec,
        variant=EnvVariant(meta["variant"]),
        seed=int(meta["seed"]),
        version=int(meta["version"]),
    )


def load(path: str | Path, env: NavEnv | None = None) -> RolloutSet:
    """Load a rollout file, re-validating the set invariants.

    Rejected on: malformed lines (reported with their line number), non-contiguous
    step indices, non-dense rollout ids, out-of-workspace agents, and rollouts
    whose final state misses the goal tolerance.
    """
    path = Path(path)
    records: list[StepRecord] = []
    meta: RolloutMeta | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RolloutFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if lineno == 1:
                if "meta" not in obj:
                    raise RolloutFormatError("line 1: missing meta header")
                try:
                    meta = _parse_meta(obj)
                except (KeyError, ValueError) as exc:
                    raise RolloutFormatError(f"line 1: bad meta header ({exc})") from exc
                continue
            try:
                state = State(Vec2(*map(float, obj["state"][:2])), Vec2(*map(float, obj["state"][2:4])))
                rec = StepRecord(
                    rollout_id=int(obj["rollout_id"]),
                    t=int(obj["t"]),
                    state=state,
                    action=Action(float(obj["action"][0]), float(obj["action"][1])),
                    reward=float(obj["reward"]),
                )
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise RolloutFormatError(f"line {lineno}: bad record ({exc})") from exc
            records.append(rec)
    if meta is None:
        raise RolloutFormatError("empty file: missing meta header")
    if env is None:
        env = NavEnv(variant=meta.variant)
    _validate_records(records, env)
    return RolloutSet(records=tuple(records), meta=meta)


def _validate_records(records: list[StepRecord], env: NavEnv) -> None:
    expected_rid = 0
    expected_t = 0
    prev: StepRecord | None = None
    for rec in records:
        if rec.rollout_id == expected_rid + 1:
            if prev is not None and env.goal_distance(prev.state) > env.goal_tolerance:
                raise RolloutFormatError(f"rollout {expected_rid} does not end at its goal")
            expected_rid += 1
            expected_t = 0
        if rec.rollout_id != expected_rid or rec.t != expected_t:
            raise RolloutFormatError(
                f"non-contiguous records: expected rollout {expected_rid} t {expected_t}, "
                f"got rollout {rec.rollout_id} t {rec.t}"
            )
        if not env.in_workspace(rec.state.agent):
            raise RolloutFormatError(f"rollout {rec.rollout_id} t {rec.t}: agent outside the workspace")
        if not in_ws_goal(rec.state, env):
            raise RolloutFormatError(f"rollout {rec.rollout_id} t {rec.t}: goal outside the workspace")
        expected_t += 1
        prev = rec
    if prev is not None and env.goal_distance(prev.state) > env.goal_tolerance:
        raise RolloutFormatError(f"rollout {prev.rollout_id} does not end at its goal")


def in_ws_goal(s: State, env: NavEnv) -> bool:
    return env.in_workspace(s.goal)
