"""Real-time teleoperation session server: per-tick state streaming over a
WebSocket, live projection toggling, and full decision telemetry for the UI."""

from __future__ import annotations

import asyncio
import itertools
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .config import ScenarioConfig, apply_overrides, config_dict
from .control import StepDecision, UserCommand, zero_command
from .env import Vec2, clamp
from .errors import ConfigError, IodaSimError
from .rollouts import RolloutSet, load
from .runner import (
    ScenarioLoop,
    assemble_stack,
    build_reference_assets,
    check_rollouts_compatible,
)


@dataclass
class Session:
    """One live control loop; ticks are strictly serialized by its WebSocket task.

    A dropped socket only detaches the session (it pauses and can be resumed by
    reconnecting); an explicit close message removes it.
    """

    sid: str
    config: ScenarioConfig
    loop: ScenarioLoop
    held: Optional[dict[str, float]] = None
    hold_age: int = 0
    closed: bool = False
    done_sent: bool = False
    attached: bool = False

    @property
    def interval(self) -> float:
        return 1.0 / self.config.tick_hz

    @property
    def mode(self) -> str:
        return "ioda" if self.loop.ioda_enabled else "baseline"

    def apply_command(self, axes: dict) -> None:
        """Clamp and keep only user-owned axes; resets the hold timeout."""
        a_max = self.loop.stack.env.a_max
        user_axes = self.loop.partition.user_axes
        held = {}
        for axis in user_axes:
            v = axes.get(axis)
            held[axis] = clamp(float(v), -a_max, a_max) if v is not None else 0.0
        self.held = held
        self.hold_age = 0

    def tick_command(self) -> UserCommand:
        if self.held is None or self.hold_age >= self.config.hold_ticks:
            return zero_command(self.loop.partition)
        return UserCommand(self.held)

    def tick(self) -> StepDecision:
        u = self.tick_command()
        self.hold_age += 1
        return self.loop.tick(u)

    def reset(self) -> None:
        self.loop.reset()
        self.held = None
        self.hold_age = 0
        self.done_sent = False


def _initial_frame(session: Session) -> dict:
    # On a fresh session t is 0; on reattach it is the current tick, so the
    # client resumes cleanly from the next frame.
    state = session.loop.state
    return {
        "type": "frame",
        "t": session.loop.t,
        "agent": [state.agent.x, state.agent.y],
        "goal": [state.goal.x, state.goal.y],
        "ood": False,
        "imagined": None,
        "robot_action": [0.0, 0.0],
        "user_action": [0.0, 0.0],
        "composed": [0.0, 0.0],
        "reward": 0.0,
        "mode": session.mode,
        "subgoals_reached": min(session.loop.progress.next_index, session.loop.plan.total_subgoals),
    }


def _decision_frame(session: Session, dec: StepDecision) -> dict:
    return {
        "type": "frame",
        "t": dec.t + 1,
        "agent": [dec.next_state.agent.x, dec.next_state.agent.y],
        "goal": [dec.next_state.goal.x, dec.next_state.goal.y],
        "ood": dec.ood,
        "imagined": list(dec.imagined_state.as_tuple()) if dec.imagined_state is not None else None,
        "robot_action": [dec.robot_action.dx, dec.robot_action.dy],
        "user_action": [dec.user_command.value("x"), dec.user_command.value("y")],
        "composed": [dec.composed_action.dx, dec.composed_action.dy],
        "reward": dec.reward,
        "mode": session.mode,
        "subgoals_reached": min(session.loop.progress.next_index, session.loop.plan.total_subgoals),
    }


def _scenario_info(config: ScenarioConfig) -> dict:
    return {
        "workspace": list(config.workspace),
        "world": list(config.world),
        "subgoals": [list(p) for p in config.subgoals],
        "primary": list(config.primary_goal),
        "start": list(config.start),
        "a_max": config.a_max,
        "user_axes": list(config.user_axes),
        "mode": "ioda" if config.ioda_enabled else "baseline",
        "tick_hz": config.tick_hz,
        "hold_ticks": config.hold_ticks,
    }


class SessionRegistry:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._ids = itertools.count(1)

    def create(self, config: ScenarioConfig, loop: ScenarioLoop) -> Session:
        with self._lock:
            sid = f"s{next(self._ids)}"
            session = Session(sid=sid, config=config, loop=loop)
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.get(sid)

    def close(self, sid: str) -> None:
        with self._lock:
            session = self._sessions.pop(sid, None)
        if session is not None:
            session.closed = True


def create_app(scenarios: dict[str, ScenarioConfig], ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="iodasim teleoperation service")
    registry = SessionRegistry()
    # Heavy read-only assets (rollouts, index, detector) shared across sessions.
    set_cache: dict[str, RolloutSet] = {}
    asset_cache: dict[tuple, tuple] = {}

    def _load_set(config: ScenarioConfig) -> RolloutSet:
        key = str(Path(config.rollouts_path).resolve())
        cached = set_cache.get(key)
        if cached is None:
            path = Path(config.rollouts_path)
            if not path.exists():
                raise ConfigError(f"rollout file not found: {path}")
            cached = load(path, config.build_env())
            set_cache[key] = cached
        return cached

    def _load_assets(config: ScenarioConfig, rollout_set: RolloutSet) -> tuple:
        key = (
            str(Path(config.rollouts_path).resolve()),
            config.detector_metric.value,
            config.projection_weights,
            config.detector_quantile,
            config.detector_epsilon,
        )
        cached = asset_cache.get(key)
        if cached is None:
            cached = build_reference_assets(config, rollout_set)
            asset_cache[key] = cached
        return cached

    def _resolve_config(body: dict) -> ScenarioConfig:
        body = dict(body or {})
        name = body.pop("scenario", None)
        if name is not None:
            base = scenarios.get(str(name))
            if base is None:
                raise ConfigError(f"unknown scenario {name!r}")
        else:
            base = next(iter(scenarios.values())) if scenarios else ScenarioConfig()
        overrides = {str(k): str(v) for k, v in body.items()}
        return apply_overrides(base, overrides).validate()

    @app.get("/api/scenarios")
    def list_scenarios() -> list[dict]:
        return [{"name": name, "config": config_dict(cfg)} for name, cfg in scenarios.items()]

    @app.post("/api/sessions")
    def create_session(body: dict) -> dict:
        try:
            config = _resolve_config(body)
            rollout_set = _load_set(config)
            check_rollouts_compatible(config, rollout_set)
            assets = _load_assets(config, rollout_set)
            stack = assemble_stack(config, rollout_set, config.seed, assets=assets)
            loop = ScenarioLoop(
                stack,
                config.build_plan(),
                config.build_partition(),
                Vec2(*config.start),
                ioda_enabled=config.ioda_enabled,
                episode_cap=config.episode_cap,
            )
        except IodaSimError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        session = registry.create(config, loop)
        return {
            "session_id": session.sid,
            "scenario": _scenario_info(config),
            "config": config_dict(config),
        }

    async def _reader(ws: WebSocket, session: Session, detached: asyncio.Event) -> None:
        try:
            while True:
                msg = await ws.receive_json()
                mtype = msg.get("type")
                if mtype == "cmd":
                    session.apply_command(msg.get("axes") or {})
                elif mtype == "toggle_ioda":
                    session.loop.set_ioda(bool(msg.get("on")))
                elif mtype == "reset":
                    session.reset()
                elif mtype == "close":
                    session.closed = True
                    return
        except (WebSocketDisconnect, RuntimeError):
            detached.set()

    @app.websocket("/ws/{sid}")
    async def session_socket(ws: WebSocket, sid: str) -> None:
        session = registry.get(sid)
        if session is None:
            await ws.close(code=4404)
            return
        if session.attached:
            await ws.close(code=4409)
            return
        session.attached = True
        await ws.accept()
        detached = asyncio.Event()
        reader = asyncio.create_task(_reader(ws, session, detached))
        try:
            await ws.send_json(_initial_frame(session))
            if session.loop.done:
                await ws.send_json({"type": "done", "metrics": session.loop.metrics().to_dict()})
                session.done_sent = True
            while not session.closed and not detached.is_set():
                if not session.loop.done:
                    dec = session.tick()
                    await ws.send_json(_decision_frame(session, dec))
                    if session.loop.done and not session.done_sent:
                        session.done_sent = True
                        await ws.send_json({"type": "done", "metrics": session.loop.metrics().to_dict()})
                await asyncio.sleep(session.interval)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            reader.cancel()
            session.attached = False
            if session.closed:
                registry.close(sid)
            try:
                await ws.close()
            except RuntimeError:
                pass

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
