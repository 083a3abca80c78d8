"""Shared-control 2D navigation workbench with out-of-distribution state projection."""

from .config import ScenarioConfig, format_config, load_config, parse_config
from .control import (
    AxisPartition,
    ControlStack,
    StepDecision,
    UserCommand,
    baseline_step,
    compose,
    ioda_step,
    zero_command,
)
from .detector import DetectorModel, calibrate
from .env import Action, EnvVariant, NavEnv, State, Vec2, WorkspaceSpec, in_workspace
from .policies import Policy, PolicyKind, PolicySpec, act, is_policy_optimal_rollout
from .projection import LinearIndex, Metric, StateIndex, build_index, metric_distance
from .rollouts import RolloutSet, StepRecord, all_states, collect, load, save, states_array
from .runner import ScenarioLoop, assemble_stack, run_scenario
from .simuser import (
    ExpectationModel,
    PlanProgress,
    RunMetrics,
    SubgoalPlan,
    advance_progress,
    current_target,
    sim_user_command,
)

__all__ = [
    "Action",
    "AxisPartition",
    "ControlStack",
    "DetectorModel",
    "EnvVariant",
    "ExpectationModel",
    "LinearIndex",
    "Metric",
    "NavEnv",
    "PlanProgress",
    "Policy",
    "PolicyKind",
    "PolicySpec",
    "RolloutSet",
    "RunMetrics",
    "ScenarioConfig",
    "ScenarioLoop",
    "State",
    "StateIndex",
    "StepDecision",
    "StepRecord",
    "SubgoalPlan",
    "UserCommand",
    "Vec2",
    "WorkspaceSpec",
    "act",
    "advance_progress",
    "all_states",
    "assemble_stack",
    "baseline_step",
    "build_index",
    "calibrate",
    "collect",
    "compose",
    "current_target",
    "format_config",
    "in_workspace",
    "ioda_step",
    "is_policy_optimal_rollout",
    "load",
    "load_config",
    "metric_distance",
    "parse_config",
    "run_scenario",
    "save",
    "sim_user_command",
    "states_array",
    "zero_command",
]
