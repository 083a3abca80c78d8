// Keyboard and slider state mapped to per-tick command messages.
// Keys are bang-bang at the action bound; the slider is proportional.

import type { ClientMessage } from "./types.js";

export interface InputState {
  left: boolean;
  right: boolean;
  up: boolean;
  down: boolean;
  slider: number; // [-1, 1], drives the first user-owned axis
}

export function emptyInput(): InputState {
  return { left: false, right: false, up: false, down: false, slider: 0 };
}

function keyValue(neg: boolean, pos: boolean, aMax: number): number {
  if (neg === pos) return 0;
  return pos ? aMax : -aMax;
}

/**
 * Build the command for one client tick, or null when there is no input
 * (the server's hold/zero policy then applies). Only user-owned axes are
 * ever populated.
 */
export function commandMessage(
  input: InputState,
  aMax: number,
  userAxes: string[],
): ClientMessage | null {
  const axes: Record<string, number> = {};
  let active = false;
  if (userAxes.includes("x")) {
    const keyed = keyValue(input.left, input.right, aMax);
    const v = keyed !== 0 ? keyed : userAxes[0] === "x" ? input.slider * aMax : 0;
    if (v !== 0) {
      axes.x = v;
      active = true;
    }
  }
  if (userAxes.includes("y")) {
    const keyed = keyValue(input.down, input.up, aMax);
    const v = keyed !== 0 ? keyed : userAxes[0] === "y" ? input.slider * aMax : 0;
    if (v !== 0) {
      axes.y = v;
      active = true;
    }
  }
  if (!active) return null;
  return { type: "cmd", axes };
}

export function applyKey(input: InputState, key: string, pressed: boolean): InputState {
  const next = { ...input };
  if (key === "ArrowLeft") next.left = pressed;
  else if (key === "ArrowRight") next.right = pressed;
  else if (key === "ArrowUp") next.up = pressed;
  else if (key === "ArrowDown") next.down = pressed;
  return next;
}
