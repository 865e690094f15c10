/**
 * Session client: a WebSocket-ish transport plus the fixed-cadence input
 * loop. Widget changes coalesce client-side (last write wins); the loop
 * emits frames (including unchanged-angle heartbeats) at a steady rate
 * with strictly increasing sequence numbers, and emits nothing while
 * disconnected.
 */

import { PilotViewState, SeqCounter } from "./model.js";
import {
  encodeFrame,
  makeFrame,
  parseServerMessage,
  ServerMessage,
} from "./protocol.js";

/** Minimal socket surface so tests can inject a fake. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export interface ClientOptions {
  frameRateHz?: number;
  now?: () => number;
  setIntervalFn?: typeof setInterval;
  clearIntervalFn?: typeof clearInterval;
}

export class SessionClient {
  readonly view: PilotViewState;
  private readonly seq = new SeqCounter();
  private socket: SocketLike | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly frameRateHz: number;
  private readonly now: () => number;
  private readonly setIntervalFn: typeof setInterval;
  private readonly clearIntervalFn: typeof clearInterval;
  private t0 = 0;
  private modePending = true;

  constructor(view: PilotViewState, options: ClientOptions = {}) {
    this.view = view;
    this.frameRateHz = options.frameRateHz ?? 50;
    this.now = options.now ?? (() => Date.now());
    this.setIntervalFn = options.setIntervalFn ?? setInterval;
    this.clearIntervalFn = options.clearIntervalFn ?? clearInterval;
  }

  attach(socket: SocketLike): void {
    this.socket = socket;
    this.view.status = "connecting";
    this.seq.nextEpoch();
    this.modePending = true;
    socket.onopen = () => {
      this.view.status = "connected";
      this.t0 = this.now();
      this.startLoop();
    };
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onclose = () => {
      this.view.status = "disconnected";
      this.stopLoop();
    };
  }

  detach(): void {
    this.stopLoop();
    this.socket?.close();
    this.socket = null;
    this.view.status = "disconnected";
  }

  requestMode(): void {
    // next emitted frame carries the mode field
    this.modePending = true;
  }

  handleMessage(data: string): ServerMessage | null {
    const msg = parseServerMessage(data);
    if (!msg) {
      this.view.lastError = "malformed server message";
      return null;
    }
    if (msg.type === "config") this.view.applyConfig(msg);
    else if (msg.type === "state") this.view.applyState(msg);
    else this.view.lastError = `${msg.code}: ${msg.detail}`;
    return msg;
  }

  /** Emit one frame now (the input loop body). Returns it for tests. */
  emitFrame(): string | null {
    if (!this.socket || this.view.status !== "connected") return null;
    const w = this.view.widgets;
    const frame = makeFrame(
      this.seq.next(),
      this.now() - this.t0,
      w.yaw.map((y) => this.view.boundedYaw(y)),
      w.pitch,
      Math.min(Math.max(w.screw, -1), 1),
      this.modePending ? w.mode : undefined,
    );
    this.modePending = false;
    const text = encodeFrame(frame);
    this.socket.send(text);
    return text;
  }

  private startLoop(): void {
    this.stopLoop();
    this.timer = this.setIntervalFn(
      () => this.emitFrame(),
      1000 / this.frameRateHz,
    );
  }

  private stopLoop(): void {
    if (this.timer !== null) {
      this.clearIntervalFn(this.timer);
      this.timer = null;
    }
  }
}

/** Connect over a real browser WebSocket. */
export function connectWebSocket(
  client: SessionClient,
  url: string,
): SocketLike {
  const ws = new WebSocket(url) as unknown as SocketLike;
  client.attach(ws);
  return ws;
}
