// Thin session transport: one socket per session, messages forwarded to the
// reducer, latest-view rendering decoupled from arrival by the caller.

import type { ClientMessage, ScenarioListing, SessionCreateResponse } from "./types.js";

export async function listScenarios(base = ""): Promise<ScenarioListing[]> {
  const resp = await fetch(`${base}/api/scenarios`);
  if (!resp.ok) throw new Error(`scenario listing failed: ${resp.status}`);
  return (await resp.json()) as ScenarioListing[];
}

export async function createSession(
  body: Record<string, string>,
  base = "",
): Promise<SessionCreateResponse> {
  const resp = await fetch(`${base}/api/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!resp.ok) {
    const detail = await resp.text();
    throw new Error(`session create failed: ${resp.status} ${detail}`);
  }
  return (await resp.json()) as SessionCreateResponse;
}

export interface SessionHandlers {
  onMessage(raw: unknown): void;
  onStatus(status: "connecting" | "open" | "closed"): void;
}

export class SessionClient {
  private ws: WebSocket;

  constructor(sessionId: string, handlers: SessionHandlers, base = "") {
    const proto = location.protocol === "https:" ? "wss:" : "ws:";
    const host = base || `${proto}//${location.host}`;
    handlers.onStatus("connecting");
    this.ws = new WebSocket(`${host}/ws/${sessionId}`);
    this.ws.onopen = () => handlers.onStatus("open");
    this.ws.onclose = () => handlers.onStatus("closed");
    this.ws.onerror = () => handlers.onStatus("closed");
    this.ws.onmessage = (event: MessageEvent) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(event.data as string);
      } catch {
        parsed = undefined;
      }
      handlers.onMessage(parsed);
    };
  }

  get open(): boolean {
    return this.ws.readyState === WebSocket.OPEN;
  }

  send(message: ClientMessage): void {
    if (this.open) {
      this.ws.send(JSON.stringify(message));
    }
  }

  close(): void {
    this.send({ type: "close" });
    this.ws.close();
  }
}
