// WebSocket gateway client with auto-reconnect and a plain callback API.

import type { Command } from "./messages.js";
import type { ServerFrame, WireEnvelope } from "./protocol.js";

export type MessageHandler = (env: WireEnvelope) => void;
export type StatusHandler = (connected: boolean) => void;
export type ErrorHandler = (error: string, detail: unknown) => void;

const RECONNECT_DELAY_MS = 1000;

export class GatewayClient {
  private ws: WebSocket | null = null;
  private topics: string[];
  private closed = false;
  onMessage: MessageHandler = () => {};
  onStatus: StatusHandler = () => {};
  onError: ErrorHandler = () => {};

  constructor(private url: string, topics: string[]) {
    this.topics = [...topics];
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      ws.send(JSON.stringify({ op: "subscribe", topics: this.topics }));
      this.onStatus(true);
    };
    ws.onmessage = (event: MessageEvent) => {
      let frame: ServerFrame;
      try {
        frame = JSON.parse(String(event.data));
      } catch {
        return;
      }
      if (frame.op === "message" && frame.message) {
        this.onMessage(frame.message);
      } else if (frame.op === "error") {
        this.onError(frame.error ?? "unknown", frame.detail);
      }
    };
    ws.onclose = () => {
      this.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), RECONNECT_DELAY_MS);
      }
    };
    ws.onerror = () => {
      ws.close();
    };
  }

  publish(command: Command): boolean {
    if (!this.ws || this.ws.readyState !== WebSocket.OPEN) {
      this.onError("not-connected", command.topic);
      return false;
    }
    this.ws.send(JSON.stringify({ op: "publish", ...command }));
    return true;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
