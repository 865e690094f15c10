import { describe, expect, it } from "vitest";

import {
  encodeFrame,
  makeFrame,
  parseServerMessage,
} from "../src/protocol.js";

describe("frame encoding", () => {
  it("uses the exact wire field names", () => {
    const text = encodeFrame(
      makeFrame(7, 123.5, [0.1, -0.2, 0.0], [0.0, 0.0, 0.0], 0.5, "TELEOP"),
    );
    const parsed = JSON.parse(text);
    expect(Object.keys(parsed).sort()).toEqual(
      ["joints", "mode", "screw", "seq", "t_ms", "type"],
    );
    expect(parsed.type).toBe("frame");
    expect(parsed.joints[0]).toEqual({ pitch_rad: 0, yaw_rad: 0.1 });
    expect(parsed.seq).toBe(7);
  });

  it("omits mode when not requested", () => {
    const parsed = JSON.parse(
      encodeFrame(makeFrame(1, 0, [0, 0, 0], [0, 0, 0], 0)),
    );
    expect("mode" in parsed).toBe(false);
  });
});

describe("server message parsing", () => {
  const state = {
    type: "state",
    t_ms: 26.7,
    pose: { x: 0.1, y: -0.2, psi: 0.05 },
    joints: [
      { pitch_rad: 0, yaw_rad: 0.1 },
      { pitch_rad: 0, yaw_rad: -0.1 },
      { pitch_rad: 0, yaw_rad: 0 },
    ],
    clamped: [false, false, false],
    speeds: [0.1, 0.1, 0.1, 0.1],
    misses: 0,
  };

  it("accepts a valid state update", () => {
    const msg = parseServerMessage(JSON.stringify(state));
    expect(msg?.type).toBe("state");
    if (msg?.type === "state") {
      expect(msg.pose.psi).toBeCloseTo(0.05);
      expect(msg.joints).toHaveLength(3);
    }
  });

  it("accepts config and error messages", () => {
    const config = parseServerMessage(
      JSON.stringify({
        type: "config",
        device_limit_rad: 1.396,
        joint_limit_rad: 1.5708,
        n_joints: 3,
        n_segments: 4,
        update_rate_hz: 37.5,
        theta_m_rad: 2.443,
      }),
    );
    expect(config?.type).toBe("config");
    const err = parseServerMessage(
      JSON.stringify({ type: "error", code: "occupied", detail: "busy" }),
    );
    expect(err?.type).toBe("error");
  });

  it.each([
    ["not json", "plain text"],
    ["wrong type", JSON.stringify({ type: "telemetry" })],
    ["missing pose", JSON.stringify({ ...state, pose: undefined })],
    [
      "non-finite angle",
      JSON.stringify(state).replace("0.1", "null"),
    ],
  ])("rejects malformed input (%s)", (_name, text) => {
    expect(parseServerMessage(text)).toBeNull();
  });
});
