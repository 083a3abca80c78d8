"""Scenario configuration: a flat dotted-key text format that fully determines a run."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

from .control import AxisPartition
from .env import EnvVariant, NavEnv, Vec2, WorkspaceSpec
from .errors import ConfigError
from .policies import PolicyKind, PolicySpec
from .projection import Metric
from .simuser import SubgoalPlan


@dataclass(frozen=True)
class ScenarioConfig:
    variant: EnvVariant = EnvVariant.FREEZE_Y_OUTSIDE
    workspace: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)
    world: tuple[float, float, float, float] = (-0.5, -0.5, 1.5, 1.5)
    a_max: float = 0.05
    c_leave: float = 1.0
    c_ymove: float = 10.0
    goal_tolerance: float = 0.02

    policy_kind: PolicyKind = PolicyKind.VARIANT_C_FREEZE
    policy_gain: float = 1.0
    policy_noise_seed: int = 0

    n_rollouts: int = 1000
    min_separation: float = 0.1
    collect_seed: int = 7

    detector_metric: Metric = Metric.L1
    detector_quantile: float = 0.99
    detector_epsilon: Optional[float] = None

    projection_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    user_axes: tuple[str, ...] = ("x",)

    subgoals: tuple[tuple[float, float], ...] = ((-0.25, 0.35), (-0.25, 0.75))
    primary_goal: tuple[float, float] = (0.2, 0.9)
    reach_radius: float = 0.05
    user_gain: float = 1.0

    start: tuple[float, float] = (0.05, 0.05)
    episode_cap: int = 400
    ioda_enabled: bool = True
    seed: int = 0

    rollouts_path: str = "out/rollouts.jsonl"
    out_dir: str = "out"

    tick_hz: float = 20.0
    hold_ticks: int = 10

    def build_env(self) -> NavEnv:
        wx0, wy0, wx1, wy1 = self.workspace
        ux0, uy0, ux1, uy1 = self.world
        workspace = WorkspaceSpec(
            min=Vec2(wx0, wy0),
            max=Vec2(wx1, wy1),
            world_min=Vec2(ux0, uy0),
            world_max=Vec2(ux1, uy1),
        )
        return NavEnv(
            variant=self.variant,
            workspace=workspace,
            a_max=self.a_max,
            c_leave=self.c_leave,
            c_ymove=self.c_ymove,
            goal_tolerance=self.goal_tolerance,
            episode_cap=self.episode_cap,
        )

    def build_policy_spec(self, run_seed: Optional[int] = None) -> PolicySpec:
        """Policy spec for a run; the sporadic surrogate's seed mixes in the run seed."""
        seed = self.policy_noise_seed
        if run_seed is not None:
            seed ^= run_seed
        return PolicySpec(kind=self.policy_kind, gain=self.policy_gain, noise_seed=seed)

    def build_plan(self) -> SubgoalPlan:
        return SubgoalPlan(
            subgoals=tuple(Vec2(x, y) for x, y in self.subgoals),
            primary_goal=Vec2(*self.primary_goal),
            reach_radius=self.reach_radius,
        )

    def build_partition(self) -> AxisPartition:
        return AxisPartition(frozenset(self.user_axes))

    def validate(self) -> "ScenarioConfig":
        env = self.build_env()
        if not env.in_workspace(Vec2(*self.primary_goal)):
            raise ConfigError("plan.primary must lie inside the workspace")
        if not env.in_workspace(Vec2(*self.start)):
            raise ConfigError("run.start must lie inside the workspace")
        self.build_partition()
        self.build_plan()
        self.build_policy_spec()
        if self.n_rollouts < 0:
            raise ConfigError("rollouts.n must be non-negative")
        if not 0.0 < self.detector_quantile <= 1.0:
            raise ConfigError("detector.quantile must lie in (0, 1]")
        if self.detector_epsilon is not None and not self.detector_epsilon > 0:
            raise ConfigError("detector.epsilon must be positive")
        if any(w <= 0 for w in self.projection_weights):
            raise ConfigError("projection.weights must be positive")
        if self.episode_cap < 1:
            raise ConfigError("run.episode_cap must be >= 1")
        if not self.tick_hz > 0:
            raise ConfigError("service.tick_hz must be positive")
        if self.hold_ticks < 1:
            raise ConfigError("service.hold_ticks must be >= 1")
        return self


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "1", "yes"):
        return True
    if t in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _fmt_bool(v: bool) -> str:
    return "on" if v else "off"


def _parse_floats(text: str, n: int) -> tuple[float, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != n:
        raise ValueError(f"expected {n} comma-separated values, got {len(parts)}")
    return tuple(float(p) for p in parts)


def _fmt_floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def _parse_points(text: str) -> tuple[tuple[float, float], ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(tuple(_parse_floats(part, 2)) for part in text.split(";") if part.strip())


def _fmt_points(points) -> str:
    return ";".join(_fmt_floats(p) for p in points)


def _parse_axes(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in parts:
        if p not in ("x", "y"):
            raise ValueError(f"unknown axis {p!r}")
    return parts


def _parse_epsilon(text: str) -> Optional[float]:
    return None if text.strip().lower() == "auto" else float(text)


def _fmt_epsilon(v: Optional[float]) -> str:
    return "auto" if v is None else repr(float(v))


@dataclass(frozen=True)
class _Key:
    attr: str
    parse: Callable[[str], object]
    fmt: Callable[[object], str]


_KEYS: dict[str, _Key] = {
    "env.variant": _Key("variant", EnvVariant, lambda v: v.value),
    "env.workspace": _Key("workspace", lambda t: _parse_floats(t, 4), _fmt_floats),
    "env.world": _Key("world", lambda t: _parse_floats(t, 4), _fmt_floats),
    "env.a_max": _Key("a_max", _parse_float, _fmt_float),
    "env.c_leave": _Key("c_leave", _parse_float, _fmt_float),
    "env.c_ymove": _Key("c_ymove", _parse_float, _fmt_float),
    "env.goal_tolerance": _Key("goal_tolerance", _parse_float, _fmt_float),
    "policy.kind": _Key("policy_kind", PolicyKind, lambda v: v.value),
    "policy.gain": _Key("policy_gain", _parse_float, _fmt_float),
    "policy.noise_seed": _Key("policy_noise_seed", _parse_int, str),
    "rollouts.n": _Key("n_rollouts", _parse_int, str),
    "rollouts.min_separation": _Key("min_separation", _parse_float, _fmt_float),
    "rollouts.collect_seed": _Key("collect_seed", _parse_int, str),
    "detector.metric": _Key("detector_metric", Metric, lambda v: v.value),
    "detector.quantile": _Key("detector_quantile", _parse_float, _fmt_float),
    "detector.epsilon": _Key("detector_epsilon", _parse_epsilon, _fmt_epsilon),
    "projection.weights": _Key("projection_weights", lambda t: _parse_floats(t, 4), _fmt_floats),
    "control.user_axes": _Key("user_axes", _parse_axes, lambda v: ",".join(v)),
    "plan.subgoals": _Key("subgoals", _parse_points, _fmt_points),
    "plan.primary": _Key("primary_goal", lambda t: _parse_floats(t, 2), _fmt_floats),
    "plan.reach_radius": _Key("reach_radius", _parse_float, _fmt_float),
    "plan.user_gain": _Key("user_gain", _parse_float, _fmt_float),
    "run.start": _Key("start", lambda t: _parse_floats(t, 2), _fmt_floats),
    "run.episode_cap": _Key("episode_cap", _parse_int, str),
    "run.ioda": _Key("ioda_enabled", _parse_bool, _fmt_bool),
    "run.seed": _Key("seed", _parse_int, str),
    "io.rollouts": _Key("rollouts_path", str.strip, str),
    "io.out_dir": _Key("out_dir", str.strip, str),
    "service.tick_hz": _Key("tick_hz", _parse_float, _fmt_float),
    "service.hold_ticks": _Key("hold_ticks", _parse_int, str),
}


def config_keys() -> list[str]:
    return list(_KEYS)


def apply_overrides(config: ScenarioConfig, overrides: dict[str, str]) -> ScenarioConfig:
    updates = {}
    for key, raw in overrides.items():
        entry = _KEYS.get(key)
        if entry is None:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            updates[entry.attr] = entry.parse(str(raw))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
    return replace(config, **updates)


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse `key = value` lines; '#' starts a comment, blank lines are skipped."""
    overrides: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in overrides:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        overrides[key] = value.strip()
    try:
        return apply_overrides(base or ScenarioConfig(), overrides)
    except ConfigError:
        raise


def format_config(config: ScenarioConfig) -> str:
    """Canonical text form; parse(format(c)) == c."""
    lines = []
    for key, entry in _KEYS.items():
        lines.append(f"{key} = {entry.fmt(getattr(config, entry.attr))}")
    return "\n".join(lines) + "\n"


def config_dict(config: ScenarioConfig) -> dict[str, str]:
    """Flat dotted-key mapping of the canonical formatted values."""
    return {key: entry.fmt(getattr(config, entry.attr)) for key, entry in _KEYS.items()}


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base)
