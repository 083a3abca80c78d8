import { applyKey, commandMessage, emptyInput } from "./input.js";
import { createSession, listScenarios, SessionClient } from "./net.js";
import { buildScene, drawScene } from "./scene.js";
import { applyServerMessage, initialView, setConnection, ViewModel } from "./state.js";
import type { ScenarioInfo } from "./types.js";

const CANVAS_SIZE = 640;
const CLIENT_TICK_MS = 50;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const scenarioSelect = document.getElementById("scenario") as HTMLSelectElement;
const startButton = document.getElementById("start") as HTMLButtonElement;
const reconnectButton = document.getElementById("reconnect") as HTMLButtonElement;
const toggleButton = document.getElementById("toggle") as HTMLButtonElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;
const slider = document.getElementById("slider") as HTMLInputElement;
const statusEl = document.getElementById("status") as HTMLSpanElement;

let view: ViewModel = initialView();
let scenario: ScenarioInfo | null = null;
let client: SessionClient | null = null;
let sessionId: string | null = null;
let input = emptyInput();

function render(): void {
  if (scenario) {
    drawScene(ctx, buildScene(view, scenario, CANVAS_SIZE), CANVAS_SIZE);
  }
  statusEl.textContent =
    view.connection === "open"
      ? `connected, mode: ${view.mode}`
      : view.connection === "connecting"
        ? "connecting..."
        : "disconnected; Reconnect resumes this session, Start begins a new one";
  toggleButton.textContent = view.mode === "ioda" ? "projection: on" : "projection: off";
  const disabled = view.connection !== "open";
  toggleButton.disabled = disabled;
  resetButton.disabled = disabled;
  slider.disabled = disabled;
  reconnectButton.disabled = view.connection !== "closed" || sessionId === null;
  requestAnimationFrame(render);
}

async function populateScenarios(): Promise<void> {
  const rows = await listScenarios();
  scenarioSelect.innerHTML = "";
  for (const row of rows) {
    const opt = document.createElement("option");
    opt.value = row.name;
    opt.textContent = row.name;
    scenarioSelect.appendChild(opt);
  }
}

function connect(): void {
  if (sessionId === null) return;
  client = new SessionClient(sessionId, {
    onMessage: (raw) => {
      view = applyServerMessage(view, raw);
    },
    onStatus: (status) => {
      view = setConnection(view, status);
    },
  });
}

async function start(): Promise<void> {
  if (client) {
    client.close();
    client = null;
  }
  const created = await createSession({ scenario: scenarioSelect.value });
  scenario = created.scenario;
  sessionId = created.session_id;
  view = initialView(scenario.mode);
  connect();
}

startButton.onclick = () => {
  void start();
};

reconnectButton.onclick = () => {
  // the server keeps detached sessions alive; rendering resumes from the next frame
  view = setConnection(view, "connecting");
  connect();
};

toggleButton.onclick = () => {
  client?.send({ type: "toggle_ioda", on: view.mode !== "ioda" });
};

resetButton.onclick = () => {
  client?.send({ type: "reset" });
};

window.addEventListener("keydown", (e) => {
  input = applyKey(input, e.key, true);
});
window.addEventListener("keyup", (e) => {
  input = applyKey(input, e.key, false);
});
slider.addEventListener("input", () => {
  input = { ...input, slider: Number(slider.value) };
});

setInterval(() => {
  if (!client || !client.open || !scenario) return;
  const msg = commandMessage(input, scenario.a_max, scenario.user_axes);
  if (msg) client.send(msg);
}, CLIENT_TICK_MS);

void populateScenarios();
requestAnimationFrame(render);
