"""Batch entry point: collect rollouts, run scenarios, aggregate seed sweeps, serve sessions."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import ScenarioConfig, apply_overrides, load_config
from .errors import CollectionError, ConfigError, IodaSimError, PipelineError, RolloutFormatError
from .policies import Policy
from .rollouts import collect, load, save
from .runner import (
    TrajectoryMeta,
    assemble_stack,
    run_scenario,
    write_calibration_summary,
    write_metrics,
    write_trajectory,
)

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4


def _resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    overrides: dict[str, str] = {}
    if getattr(args, "seed", None) is not None:
        overrides["run.seed"] = str(args.seed)
    if getattr(args, "ioda", None):
        overrides["run.ioda"] = args.ioda
    if getattr(args, "rollouts", None):
        overrides["io.rollouts"] = args.rollouts
    if getattr(args, "out", None):
        overrides["io.out_dir"] = args.out
    for item in getattr(args, "set", None) or []:
        key, _, value = item.partition("=")
        if not _ or not key:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    if overrides:
        config = apply_overrides(config, overrides)
    return config.validate()


def _out_dir(config: ScenarioConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_collect(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if config.n_rollouts < 1:
        raise ConfigError("rollouts.n must be >= 1 for collect")
    seed = args.seed if args.seed is not None else config.collect_seed
    env = config.build_env()
    policy = Policy(config.build_policy_spec(), env)
    rollout_set = collect(policy, config.n_rollouts, seed, config.min_separation)
    out = _out_dir(config)
    rollouts_path = Path(config.rollouts_path)
    rollouts_path.parent.mkdir(parents=True, exist_ok=True)
    save(rollout_set, rollouts_path)
    stack = assemble_stack(config, rollout_set)
    write_calibration_summary(out / "calibration.json", stack.detector)
    print(
        f"collected {config.n_rollouts} rollouts ({len(rollout_set)} records) -> {rollouts_path}; "
        f"epsilon={stack.detector.epsilon!r}"
    )
    return 0


def _rollouts_path(config: ScenarioConfig) -> Path:
    path = Path(config.rollouts_path)
    if not path.exists():
        raise RolloutFormatError(f"rollout file not found: {path}")
    return path


def cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    rollout_set = load(_rollouts_path(config), config.build_env())
    loop = run_scenario(config, rollout_set)
    out = _out_dir(config)
    mode = "ioda" if config.ioda_enabled else "baseline"
    meta = TrajectoryMeta(mode=mode, variant=config.variant.value, seed=config.seed)
    write_trajectory(out / "trajectory.jsonl", loop.decisions, meta)
    metrics = loop.metrics()
    write_metrics(out / "metrics.json", metrics)
    print(
        f"{mode} seed={config.seed}: subgoals {metrics.subgoals_reached}/{metrics.total_subgoals}, "
        f"primary={'yes' if metrics.primary_goal_reached else 'no'}, steps={metrics.steps}, "
        f"ood_steps={metrics.ood_step_count}, mean_gap={metrics.mean_gap:.6f}"
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    config = _resolve_config(args)
    rollout_set = load(_rollouts_path(config), config.build_env())
    stack = assemble_stack(config, rollout_set)
    rows = []
    for ioda_enabled in (True, False):
        condition = replace(config, ioda_enabled=ioda_enabled)
        runs = []
        for i in range(args.seeds):
            loop = run_scenario(condition, rollout_set, seed=config.seed + i, stack=stack)
            runs.append(loop.metrics())
        n = len(runs)
        rows.append(
            {
                "condition": "ioda" if ioda_enabled else "baseline",
                "variant": config.variant.value,
                "seeds": n,
                "success_rate": sum(1 for m in runs if m.success) / n,
                "mean_gap": sum(m.mean_gap for m in runs) / n,
                "mean_ood_steps": sum(m.ood_step_count for m in runs) / n,
                "mean_steps": sum(m.steps for m in runs) / n,
            }
        )
    out = _out_dir(config)
    (out / "table.json").write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    header = f"{'condition':<10} {'success':>8} {'mean_gap':>12} {'ood_steps':>10}"
    print(header)
    for row in rows:
        print(
            f"{row['condition']:<10} {row['success_rate']:>8.2f} "
            f"{row['mean_gap']:>12.6f} {row['mean_ood_steps']:>10.1f}"
        )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    scenarios = {}
    for path in args.config or []:
        scenarios[Path(path).stem] = load_config(path).validate()
    if not scenarios:
        scenarios["default"] = ScenarioConfig().validate()
    ui_dir = Path(args.ui) if args.ui else Path("frontend/dist")
    app = create_app(scenarios, ui_dir if ui_dir.is_dir() else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iodasim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="scenario config file (flat dotted keys)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--out", help="output directory override")
        p.add_argument("--ioda", choices=["on", "off"], help="projection on/off override")
        p.add_argument("--rollouts", help="rollout file override")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="set any config key")

    p_collect = sub.add_parser("collect", help="collect rollouts and calibrate the detector")
    common(p_collect)
    p_collect.set_defaults(func=cmd_collect)

    p_run = sub.add_parser("run", help="run one scripted scenario")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="aggregate scripted runs across seeds")
    common(p_eval)
    p_eval.add_argument("--seeds", type=int, default=50, help="number of seeds")
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="serve live teleoperation sessions")
    p_serve.add_argument("--config", action="append", help="scenario preset (repeatable)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ui", help="static UI bundle directory")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RolloutFormatError, CollectionError, PipelineError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IodaSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
