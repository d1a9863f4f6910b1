// Thin client for the agent service. The event stream prefers a WebSocket
// and falls back to polling GET /events?after=N; either way delivery is
// cursor-based on ticks, so reconnects resume without gaps or duplicates.

import type { AgentEvent, ConnectionStatus, SessionDescriptor, StateView } from "./types.js";

export interface StreamHandle {
  stop(): void;
}

export interface StreamCallbacks {
  onEvent(event: AgentEvent): void;
  onStatus?(status: ConnectionStatus): void;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson(response: Response): Promise<unknown> {
  if (!response.ok) {
    throw new ApiError(response.status, `${response.status} ${await response.text()}`);
  }
  return response.json();
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly pollIntervalMs: number = 150,
  ) {}

  async createSession(body: Record<string, unknown> = {}): Promise<SessionDescriptor> {
    const response = await fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await asJson(response)) as SessionDescriptor;
  }

  async postUtterance(sessionId: string, text: string): Promise<{ accepted: boolean; tick: number }> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/utterances`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return (await asJson(response)) as { accepted: boolean; tick: number };
  }

  async postStimulus(
    sessionId: string,
    content: string,
    responsible?: string,
  ): Promise<{ accepted: boolean; tick: number }> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/stimuli`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ content, responsible: responsible ?? null }),
    });
    return (await asJson(response)) as { accepted: boolean; tick: number };
  }

  async getState(sessionId: string): Promise<StateView> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/state`);
    return (await asJson(response)) as StateView;
  }

  async pollEvents(sessionId: string, after: number): Promise<AgentEvent[]> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/events?after=${after}`);
    const body = (await asJson(response)) as { events: AgentEvent[] };
    return body.events;
  }

  /** Subscribe from `after`; exactly one consumer per handle, events arrive
   * in tick order. */
  streamEvents(sessionId: string, after: number, callbacks: StreamCallbacks): StreamHandle {
    let cursor = after;
    let stopped = false;
    const status = (s: ConnectionStatus) => callbacks.onStatus?.(s);

    const deliver = (event: AgentEvent) => {
      if (event.tick > cursor) {
        cursor = event.tick;
        callbacks.onEvent(event);
      }
    };

    const startPolling = () => {
      status("connecting");
      const tickOnce = async () => {
        if (stopped) return;
        try {
          const events = await this.pollEvents(sessionId, cursor);
          status("connected");
          for (const event of events) deliver(event);
        } catch {
          status("disconnected");
        }
        if (!stopped) setTimeout(tickOnce, this.pollIntervalMs);
      };
      void tickOnce();
    };

    const WS = (globalThis as { WebSocket?: typeof WebSocket }).WebSocket;
    if (WS === undefined) {
      startPolling();
      return { stop: () => void (stopped = true) };
    }

    let socket: WebSocket | null = null;
    let retryMs = 500;
    const connect = () => {
      if (stopped) return;
      status("connecting");
      const scheme = this.base.startsWith("https") ? "wss" : "ws";
      const host = this.base.replace(/^https?:\/\//, "") || globalThis.location?.host || "";
      socket = new WS(`${scheme}://${host}/sessions/${sessionId}/events?after=${cursor}`);
      socket.onopen = () => {
        retryMs = 500;
        status("connected");
      };
      socket.onmessage = (message) => {
        deliver(JSON.parse(String(message.data)) as AgentEvent);
      };
      socket.onclose = () => {
        if (stopped) return;
        status("disconnected");
        setTimeout(connect, retryMs);
        retryMs = Math.min(retryMs * 2, 10_000);
      };
      socket.onerror = () => {
        socket?.close();
      };
    };
    connect();
    return {
      stop: () => {
        stopped = true;
        socket?.close();
      },
    };
  }
}
