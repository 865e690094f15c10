/**
 * Wire protocol shared with the teleop gateway. Field names must match the
 * server byte for byte; keep this file free of DOM or socket code so the
 * test suite can exercise it directly.
 */

export interface JointAngles {
  pitch_rad: number;
  yaw_rad: number;
}

export interface FrameMessage {
  type: "frame";
  seq: number;
  t_ms: number;
  joints: JointAngles[];
  screw: number;
  mode?: ControlMode;
}

export interface StateMessage {
  type: "state";
  t_ms: number;
  pose: { x: number; y: number; psi: number };
  joints: JointAngles[];
  clamped: boolean[];
  speeds: number[];
  misses: number;
}

export interface ConfigMessage {
  type: "config";
  device_limit_rad: number;
  joint_limit_rad: number;
  n_joints: number;
  n_segments: number;
  update_rate_hz: number;
  theta_m_rad: number;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  detail: string;
}

export type ServerMessage = StateMessage | ConfigMessage | ErrorMessage;
export type ControlMode = "TELEOP" | "TUNNELING" | "M_CONFIG";

export const CONTROL_MODES: ControlMode[] = ["TELEOP", "TUNNELING", "M_CONFIG"];

export function encodeFrame(msg: FrameMessage): string {
  return JSON.stringify(msg);
}

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function isJointAngles(x: unknown): x is JointAngles {
  const j = x as JointAngles;
  return (
    typeof x === "object" &&
    x !== null &&
    isFiniteNumber(j.pitch_rad) &&
    isFiniteNumber(j.yaw_rad)
  );
}

/** Parse and validate one server message; returns null on anything malformed. */
export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "state": {
      const pose = msg.pose as Record<string, unknown> | undefined;
      if (
        !pose ||
        !isFiniteNumber(pose.x) ||
        !isFiniteNumber(pose.y) ||
        !isFiniteNumber(pose.psi) ||
        !Array.isArray(msg.joints) ||
        !msg.joints.every(isJointAngles) ||
        !Array.isArray(msg.clamped) ||
        !Array.isArray(msg.speeds) ||
        !isFiniteNumber(msg.t_ms) ||
        !isFiniteNumber(msg.misses)
      ) {
        return null;
      }
      return msg as unknown as StateMessage;
    }
    case "config": {
      for (const key of [
        "device_limit_rad",
        "joint_limit_rad",
        "n_joints",
        "n_segments",
        "update_rate_hz",
      ]) {
        if (!isFiniteNumber(msg[key])) return null;
      }
      return msg as unknown as ConfigMessage;
    }
    case "error": {
      if (typeof msg.code !== "string") return null;
      return msg as unknown as ErrorMessage;
    }
    default:
      return null;
  }
}

export function makeFrame(
  seq: number,
  t_ms: number,
  yaws: number[],
  pitches: number[],
  screw: number,
  mode?: ControlMode,
): FrameMessage {
  const joints = yaws.map((yaw, i) => ({
    pitch_rad: pitches[i] ?? 0,
    yaw_rad: yaw,
  }));
  const msg: FrameMessage = { type: "frame", seq, t_ms, joints, screw };
  if (mode) msg.mode = mode;
  return msg;
}
