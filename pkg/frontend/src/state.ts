// View model and reducer. The client renders only server-provided values;
// there is no physics here, and the trajectory is append-only per session.

import type { Frame, RunMetrics, ServerMessage } from "./types.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface ViewModel {
  connection: ConnectionStatus;
  frame: Frame | null;
  trajectory: Array<[number, number]>;
  metrics: RunMetrics | null;
  error: string | null;
  mode: "ioda" | "baseline";
}

export function initialView(mode: "ioda" | "baseline" = "ioda"): ViewModel {
  return {
    connection: "connecting",
    frame: null,
    trajectory: [],
    metrics: null,
    error: null,
    mode,
  };
}

function isPair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 && v.every((x) => typeof x === "number" && isFinite(x));
}

function isQuad(v: unknown): v is [number, number, number, number] {
  return Array.isArray(v) && v.length === 4 && v.every((x) => typeof x === "number" && isFinite(x));
}

/** Validate a raw server payload; null means the message is malformed. */
export function parseServerMessage(raw: unknown): ServerMessage | null {
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  if (msg.type === "done") {
    const m = msg.metrics as Record<string, unknown> | undefined;
    if (!m || typeof m.steps !== "number") return null;
    return msg as unknown as ServerMessage;
  }
  if (msg.type !== "frame") return null;
  const ok =
    typeof msg.t === "number" &&
    isPair(msg.agent) &&
    isPair(msg.goal) &&
    typeof msg.ood === "boolean" &&
    (msg.imagined === null || isQuad(msg.imagined)) &&
    isPair(msg.robot_action) &&
    isPair(msg.user_action) &&
    isPair(msg.composed) &&
    typeof msg.reward === "number" &&
    (msg.mode === "ioda" || msg.mode === "baseline") &&
    typeof msg.subgoals_reached === "number";
  return ok ? (msg as unknown as ServerMessage) : null;
}

/**
 * Fold one raw server payload into the view. Malformed payloads raise the
 * error banner but never drop the session or the trajectory.
 */
export function applyServerMessage(view: ViewModel, raw: unknown): ViewModel {
  const msg = parseServerMessage(raw);
  if (msg === null) {
    return { ...view, error: "malformed frame received; session continues" };
  }
  if (msg.type === "done") {
    return { ...view, metrics: msg.metrics };
  }
  const trajectory = view.trajectory.concat([[msg.agent[0], msg.agent[1]]]);
  // a reset shows up as the tick counter restarting
  const restarted = view.frame !== null && msg.t <= view.frame.t && msg.t <= 1;
  return {
    ...view,
    frame: msg,
    trajectory: restarted ? [[msg.agent[0], msg.agent[1]]] : trajectory,
    metrics: restarted ? null : view.metrics,
    mode: msg.mode,
  };
}

export function setConnection(view: ViewModel, connection: ConnectionStatus): ViewModel {
  return { ...view, connection };
}
