// Wire types mirroring the session server's message schema verbatim.

export interface Frame {
  type: "frame";
  t: number;
  agent: [number, number];
  goal: [number, number];
  ood: boolean;
  imagined: [number, number, number, number] | null;
  robot_action: [number, number];
  user_action: [number, number];
  composed: [number, number];
  reward: number;
  mode: "ioda" | "baseline";
  subgoals_reached: number;
}

export interface RunMetrics {
  subgoals_reached: number;
  total_subgoals: number;
  primary_goal_reached: boolean;
  steps: number;
  mean_gap: number;
  max_gap: number;
  ood_step_count: number;
}

export interface DoneMessage {
  type: "done";
  metrics: RunMetrics;
}

export type ServerMessage = Frame | DoneMessage;

export type ClientMessage =
  | { type: "cmd"; axes: Record<string, number> }
  | { type: "toggle_ioda"; on: boolean }
  | { type: "reset" }
  | { type: "close" };

export interface ScenarioInfo {
  workspace: [number, number, number, number];
  world: [number, number, number, number];
  subgoals: Array<[number, number]>;
  primary: [number, number];
  start: [number, number];
  a_max: number;
  user_axes: string[];
  mode: "ioda" | "baseline";
  tick_hz: number;
  hold_ticks: number;
}

export interface SessionCreateResponse {
  session_id: string;
  scenario: ScenarioInfo;
  config: Record<string, string>;
}

export interface ScenarioListing {
  name: string;
  config: Record<string, string>;
}
