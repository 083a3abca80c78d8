"""Scenario execution shared by the batch CLI and the live session service."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .config import ScenarioConfig
from .control import AxisPartition, ControlStack, StepDecision, UserCommand, zero_command
from .detector import DetectorModel, calibrate
from .env import Vec2
from .errors import RolloutFormatError
from .policies import Policy
from .projection import StateIndex, build_index
from .rollouts import RolloutSet, all_states
from .simuser import (
    ExpectationModel,
    GapAccumulator,
    PlanProgress,
    RunMetrics,
    SubgoalPlan,
    advance_progress,
    sim_user_command,
)

TRAJECTORY_VERSION = 1


def build_reference_assets(config: ScenarioConfig, rollout_set: RolloutSet) -> tuple[StateIndex, DetectorModel]:
    """The heavy read-only pieces of a stack: spatial index plus calibrated detector.

    Immutable once built, so they can be shared across runs and sessions over
    the same observation set.
    """
    states = all_states(rollout_set)
    weights = None if config.projection_weights == (1.0, 1.0, 1.0, 1.0) else config.projection_weights
    index = build_index(states, config.detector_metric, weights)
    if config.detector_epsilon is not None:
        detector = DetectorModel(index=index, epsilon=config.detector_epsilon)
    else:
        detector = calibrate(states, config.detector_metric, config.detector_quantile, index=index)
    return index, detector


def assemble_stack(
    config: ScenarioConfig,
    rollout_set: RolloutSet,
    run_seed: Optional[int] = None,
    assets: Optional[tuple[StateIndex, DetectorModel]] = None,
) -> ControlStack:
    """Build the validated env/policy/detector/index assembly for one run."""
    env = config.build_env()
    policy = Policy(config.build_policy_spec(run_seed), env)
    index, detector = assets if assets is not None else build_reference_assets(config, rollout_set)
    return ControlStack(env=env, policy=policy, detector=detector, index=index)


def reseed_stack(stack: ControlStack, config: ScenarioConfig, run_seed: int) -> ControlStack:
    """Cheap per-seed variant of an assembled stack; index and detector are shared."""
    spec = config.build_policy_spec(run_seed)
    if spec == stack.policy.spec:
        return stack
    return replace(stack, policy=Policy(spec, stack.env))


def check_rollouts_compatible(config: ScenarioConfig, rollout_set: RolloutSet) -> None:
    meta = rollout_set.meta
    if meta.variant is not config.variant:
        raise RolloutFormatError(
            f"rollout file was collected for variant {meta.variant.value}, "
            f"config wants {config.variant.value}"
        )
    if meta.policy.kind is not config.policy_kind:
        raise RolloutFormatError(
            f"rollout file was collected under policy {meta.policy.kind.value}, "
            f"config wants {config.policy_kind.value}"
        )


class ScenarioLoop:
    """One session's control loop: stepping, plan progress and metrics.

    The policy is commanded with the primary goal for the whole run; the subgoal
    plan only sequences the user's own axis targets. Plan advancement is checked
    against the true (possibly outside-workspace) targets.
    """

    def __init__(
        self,
        stack: ControlStack,
        plan: SubgoalPlan,
        partition: AxisPartition,
        start: Vec2,
        ioda_enabled: bool = True,
        episode_cap: Optional[int] = None,
    ):
        self.stack = stack
        self.plan = plan
        self.partition = partition
        self.ioda_enabled = ioda_enabled
        self.episode_cap = stack.env.episode_cap if episode_cap is None else episode_cap
        self.progress = PlanProgress()
        self.expectation = ExpectationModel(stack)
        self.decisions: list[StepDecision] = []
        self.gaps = GapAccumulator()
        self.ood_flags: list[bool] = []
        self._start = start
        self.state = stack.env.make_state(start, plan.primary_goal)

    @property
    def t(self) -> int:
        return len(self.decisions)

    @property
    def done(self) -> bool:
        return self.progress.primary_reached or self.t >= self.episode_cap

    def set_ioda(self, enabled: bool) -> None:
        self.ioda_enabled = enabled

    def tick(self, u: UserCommand) -> StepDecision:
        """Advance exactly one step with the given user command."""
        if self.done:
            raise RuntimeError("scenario already finished")
        if self.ioda_enabled:
            dec = self.stack.ioda_step(self.state, u, t=self.t)
            ood = dec.ood
        else:
            dec = self.stack.baseline_step(self.state, u, t=self.t)
            # The baseline records ood=False by contract; the metrics still
            # report how often the detector would have fired.
            ood = self.stack.detector.is_ood(dec.input_state)
        self.decisions.append(dec)
        self.ood_flags.append(ood)
        self.gaps.add(self.expectation.predictability_gap(dec))
        self.state = dec.next_state
        advance_progress(self.plan, self.progress, self.state.agent)
        return dec

    def scripted_command(self, gain: float = 1.0) -> UserCommand:
        if not self.partition.user_axes:
            return zero_command(self.partition)
        return sim_user_command(
            self.state,
            self.plan,
            self.progress,
            user_axes=self.partition.user_axes,
            gain=gain,
            a_max=self.stack.env.a_max,
        )

    def run_scripted(self, gain: float = 1.0) -> list[StepDecision]:
        while not self.done:
            self.tick(self.scripted_command(gain))
        return self.decisions

    def reset(self) -> None:
        self.progress = PlanProgress()
        self.decisions = []
        self.gaps = GapAccumulator()
        self.ood_flags = []
        self.state = self.stack.env.make_state(self._start, self.plan.primary_goal)

    def metrics(self) -> RunMetrics:
        return RunMetrics(
            subgoals_reached=min(self.progress.next_index, self.plan.total_subgoals),
            total_subgoals=self.plan.total_subgoals,
            primary_goal_reached=self.progress.primary_reached,
            steps=self.t,
            mean_gap=self.gaps.mean,
            max_gap=self.gaps.max,
            ood_step_count=sum(self.ood_flags),
        )


def run_scenario(
    config: ScenarioConfig,
    rollout_set: RolloutSet,
    seed: Optional[int] = None,
    stack: Optional[ControlStack] = None,
) -> ScenarioLoop:
    """Execute the scripted scenario to completion and return the finished loop.

    Passing a pre-assembled stack skips index build and calibration; only the
    policy seed is refreshed for the run.
    """
    run_seed = config.seed if seed is None else seed
    check_rollouts_compatible(config, rollout_set)
    if stack is None:
        stack = assemble_stack(config, rollout_set, run_seed)
    else:
        stack = reseed_stack(stack, config, run_seed)
    loop = ScenarioLoop(
        stack,
        config.build_plan(),
        config.build_partition(),
        Vec2(*config.start),
        ioda_enabled=config.ioda_enabled,
        episode_cap=config.episode_cap,
    )
    loop.run_scripted(config.user_gain)
    return loop


@dataclass(frozen=True)
class TrajectoryMeta:
    mode: str
    variant: str
    seed: int
    version: int = TRAJECTORY_VERSION


def _decision_row(dec: StepDecision) -> dict:
    return {
        "t": dec.t,
        "state": list(dec.input_state.as_tuple()),
        "ood": dec.ood,
        "imagined": list(dec.imagined_state.as_tuple()) if dec.imagined_state is not None else None,
        "robot_action": [dec.robot_action.dx, dec.robot_action.dy],
        "user": dict(dec.user_command.axes),
        "composed": [dec.composed_action.dx, dec.composed_action.dy],
        "next_state": list(dec.next_state.as_tuple()),
        "reward": dec.reward,
    }


def write_trajectory(path: str | Path, decisions: list[StepDecision], meta: TrajectoryMeta) -> None:
    """Line-delimited decision log with a version-tagged header, byte-stable for a fixed run."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        header = {"meta": {"mode": meta.mode, "variant": meta.variant, "seed": meta.seed, "version": meta.version}}
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for dec in decisions:
            fh.write(json.dumps(_decision_row(dec), separators=(",", ":")) + "\n")


def write_metrics(path: str | Path, metrics: RunMetrics) -> None:
    Path(path).write_text(json.dumps(metrics.to_dict(), separators=(",", ":")) + "\n", encoding="utf-8")


def write_calibration_summary(path: str | Path, detector: DetectorModel) -> None:
    calibration = detector.calibration
    summary: dict = {
        "epsilon": detector.epsilon,
        "metric": detector.metric.value,
        "quantile": calibration.quantile if calibration else None,
        "n_states": len(detector.reference_states),
    }
    if calibration and calibration.distances:
        ordered = calibration.distances
        n = len(ordered)

        def q(p: float) -> float:
            k = min(n, max(1, int(p * n + 0.5)))
            return ordered[k - 1]

        summary["loo_quantiles"] = {"0.5": q(0.5), "0.9": q(0.9), "0.99": q(0.99), "1.0": ordered[-1]}
    Path(path).write_text(json.dumps(summary, separators=(",", ":")) + "\n", encoding="utf-8")
