/**
 * Pilot view state: everything the render loop reads and the network
 * callbacks mutate. Pure data + small mutators; no DOM access here.
 */

import { CorridorView } from "./geometry.js";
import { ConfigMessage, ControlMode, StateMessage } from "./protocol.js";

export const TRAIL_LIMIT = 10000;

/** Sequence numbers carry a session epoch in the high bits so they stay
 * strictly monotone across reconnects. */
export const EPOCH_STRIDE = 2 ** 20;

export interface WidgetState {
  /** Requested yaw deflection per joint (rad); bounded by device limit. */
  yaw: number[];
  pitch: number[];
  screw: number;
  mode: ControlMode;
}

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

export class SeqCounter {
  private epoch = 0;
  private counter = 0;

  nextEpoch(): void {
    this.epoch += 1;
    this.counter = 0;
  }

  next(): number {
    this.counter += 1;
    if (this.counter >= EPOCH_STRIDE) {
      // never reuse the epoch range; roll into a fresh one
      this.nextEpoch();
      this.counter = 1;
    }
    return this.epoch * EPOCH_STRIDE + this.counter;
  }
}

export class PilotViewState {
  status: ConnectionStatus = "disconnected";
  config: ConfigMessage | null = null;
  latest: StateMessage | null = null;
  lastError = "";
  trail: [number, number][] = [];
  widgets: WidgetState = { yaw: [], pitch: [], screw: 0, mode: "TELEOP" };
  /** Optional corridor overlay drawn behind the robot. */
  corridor: CorridorView | null = null;

  applyConfig(cfg: ConfigMessage): void {
    this.config = cfg;
    this.widgets.yaw = new Array(cfg.n_joints).fill(0);
    this.widgets.pitch = new Array(cfg.n_joints).fill(0);
  }

  applyState(msg: StateMessage): void {
    this.latest = msg;
    this.trail.push([msg.pose.x, msg.pose.y]);
    if (this.trail.length > TRAIL_LIMIT) {
      this.trail.splice(0, this.trail.length - TRAIL_LIMIT);
    }
  }

  /** Clamp a widget command into the device box; a conforming client never
   * triggers server clamp flags. */
  boundedYaw(value: number): number {
    const limit = this.config?.device_limit_rad ?? 0;
    return Math.min(Math.max(value, -limit), limit);
  }

  setYaw(index: number, value: number): void {
    this.widgets.yaw[index] = this.boundedYaw(value);
  }

  reset(): void {
    this.latest = null;
    this.trail = [];
    this.lastError = "";
  }
}
