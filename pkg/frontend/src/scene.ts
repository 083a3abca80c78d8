// Scene construction is pure (world coordinates in, drawing primitives out)
// so rendering decisions are directly testable; painting happens last.

import type { ScenarioInfo } from "./types.js";
import type { ViewModel } from "./state.js";

export type Primitive =
  | { kind: "workspace"; rect: [number, number, number, number] }
  | { kind: "trajectory"; points: Array<[number, number]> }
  | { kind: "subgoal"; at: [number, number]; reached: boolean }
  | { kind: "primary"; at: [number, number] }
  | { kind: "goal"; at: [number, number] }
  | { kind: "ghost"; at: [number, number]; link: [[number, number], [number, number]] }
  | { kind: "agent"; at: [number, number]; warning: boolean }
  | { kind: "banner"; text: string }
  | { kind: "metrics"; lines: string[] };

/** World point to canvas pixels; the scale is fixed to the world bounds. */
export function worldToPixel(
  p: [number, number],
  scenario: ScenarioInfo,
  size: number,
): [number, number] {
  const [wx0, wy0, wx1, wy1] = scenario.world;
  const sx = size / (wx1 - wx0);
  const sy = size / (wy1 - wy0);
  // y grows upward in world coordinates, downward on the canvas
  return [(p[0] - wx0) * sx, size - (p[1] - wy0) * sy];
}

export function buildScene(view: ViewModel, scenario: ScenarioInfo, size: number): Primitive[] {
  const prims: Primitive[] = [];
  const px = (p: [number, number]) => worldToPixel(p, scenario, size);

  const [ax0, ay0] = px([scenario.workspace[0], scenario.workspace[3]]);
  const [ax1, ay1] = px([scenario.workspace[2], scenario.workspace[1]]);
  prims.push({ kind: "workspace", rect: [ax0, ay0, ax1 - ax0, ay1 - ay0] });

  if (view.trajectory.length > 1) {
    prims.push({ kind: "trajectory", points: view.trajectory.map(px) });
  }

  const reached = view.frame ? view.frame.subgoals_reached : 0;
  scenario.subgoals.forEach((sg, i) => {
    prims.push({ kind: "subgoal", at: px(sg), reached: i < reached });
  });
  prims.push({ kind: "primary", at: px(scenario.primary) });

  if (view.frame) {
    const frame = view.frame;
    prims.push({ kind: "goal", at: px(frame.goal) });
    if (frame.ood && frame.imagined !== null) {
      const ghostAt = px([frame.imagined[0], frame.imagined[1]]);
      prims.push({ kind: "ghost", at: ghostAt, link: [px(frame.agent), ghostAt] });
    }
    prims.push({ kind: "agent", at: px(frame.agent), warning: frame.ood });
  }

  if (view.metrics) {
    const m = view.metrics;
    prims.push({
      kind: "metrics",
      lines: [
        `subgoals ${m.subgoals_reached}/${m.total_subgoals}`,
        `primary goal ${m.primary_goal_reached ? "reached" : "missed"}`,
        `steps ${m.steps}`,
        `mean gap ${m.mean_gap.toFixed(4)}`,
        `ood steps ${m.ood_step_count}`,
      ],
    });
  }

  if (view.error) {
    prims.push({ kind: "banner", text: view.error });
  }
  return prims;
}

const COLORS = {
  background: "#ffffff",
  workspace: "#d9d9d9",
  trajectory: "#4a78c4",
  subgoal: "#2a9d8f",
  subgoalReached: "#9ad5cc",
  primary: "#22762c",
  goal: "#8bc34a",
  agent: "#222222",
  warning: "#e76f51",
  ghost: "rgba(120, 120, 220, 0.55)",
  banner: "#b00020",
};

export function drawScene(ctx: CanvasRenderingContext2D, prims: Primitive[], size: number): void {
  ctx.clearRect(0, 0, size, size);
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, size, size);
  for (const prim of prims) {
    switch (prim.kind) {
      case "workspace": {
        ctx.fillStyle = COLORS.workspace;
        ctx.fillRect(...prim.rect);
        break;
      }
      case "trajectory": {
        ctx.strokeStyle = COLORS.trajectory;
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        prim.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.stroke();
        break;
      }
      case "subgoal": {
        ctx.fillStyle = prim.reached ? COLORS.subgoalReached : COLORS.subgoal;
        dot(ctx, prim.at, 7);
        break;
      }
      case "primary": {
        ctx.fillStyle = COLORS.primary;
        dot(ctx, prim.at, 8);
        break;
      }
      case "goal": {
        ctx.strokeStyle = COLORS.goal;
        ctx.lineWidth = 2;
        ring(ctx, prim.at, 11);
        break;
      }
      case "ghost": {
        ctx.strokeStyle = COLORS.ghost;
        ctx.setLineDash([4, 4]);
        ctx.beginPath();
        ctx.moveTo(...prim.link[0]);
        ctx.lineTo(...prim.link[1]);
        ctx.stroke();
        ctx.setLineDash([]);
        ctx.fillStyle = COLORS.ghost;
        dot(ctx, prim.at, 6);
        break;
      }
      case "agent": {
        ctx.fillStyle = COLORS.agent;
        dot(ctx, prim.at, 6);
        if (prim.warning) {
          ctx.strokeStyle = COLORS.warning;
          ctx.lineWidth = 3;
          ring(ctx, prim.at, 10);
        }
        break;
      }
      case "metrics": {
        ctx.fillStyle = "rgba(255,255,255,0.85)";
        ctx.fillRect(10, 10, 220, 20 + prim.lines.length * 18);
        ctx.fillStyle = "#111111";
        ctx.font = "14px sans-serif";
        prim.lines.forEach((line, i) => ctx.fillText(line, 20, 32 + i * 18));
        break;
      }
      case "banner": {
        ctx.fillStyle = COLORS.banner;
        ctx.fillRect(0, size - 28, size, 28);
        ctx.fillStyle = "#ffffff";
        ctx.font = "13px sans-serif";
        ctx.fillText(prim.text, 10, size - 9);
        break;
      }
    }
  }
}

function dot(ctx: CanvasRenderingContext2D, at: [number, number], r: number): void {
  ctx.beginPath();
  ctx.arc(at[0], at[1], r, 0, Math.PI * 2);
  ctx.fill();
}

function ring(ctx: CanvasRenderingContext2D, at: [number, number], r: number): void {
  ctx.beginPath();
  ctx.arc(at[0], at[1], r, 0, Math.PI * 2);
  ctx.stroke();
}
