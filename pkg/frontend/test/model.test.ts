import { describe, expect, it } from "vitest";

import {
  EPOCH_STRIDE,
  PilotViewState,
  SeqCounter,
  TRAIL_LIMIT,
} from "../src/model.js";
import { ConfigMessage, StateMessage } from "../src/protocol.js";

const CONFIG: ConfigMessage = {
  type: "config",
  device_limit_rad: 1.3962634,
  joint_limit_rad: 1.5707963,
  n_joints: 3,
  n_segments: 4,
  update_rate_hz: 37.5,
  theta_m_rad: 2.4434609,
};

function stateAt(x: number, y: number): StateMessage {
  return {
    type: "state",
    t_ms: 0,
    pose: { x, y, psi: 0 },
    joints: [
      { pitch_rad: 0, yaw_rad: 0 },
      { pitch_rad: 0, yaw_rad: 0 },
      { pitch_rad: 0, yaw_rad: 0 },
    ],
    clamped: [false, false, false],
    speeds: [0, 0, 0, 0],
    misses: 0,
  };
}

describe("SeqCounter", () => {
  it("is strictly increasing within an epoch", () => {
    const seq = new SeqCounter();
    let prev = -1;
    for (let i = 0; i < 1000; i++) {
      const s = seq.next();
      expect(s).toBeGreaterThan(prev);
      prev = s;
    }
  });

  it("stays monotone across reconnect epochs", () => {
    const seq = new SeqCounter();
    const before = seq.next();
    seq.nextEpoch(); // reconnect
    const after = seq.next();
    expect(after).toBeGreaterThan(before);
    expect(Math.floor(after / EPOCH_STRIDE)).toBeGreaterThan(
      Math.floor(before / EPOCH_STRIDE),
    );
  });
});

describe("PilotViewState", () => {
  it("bounds the trail buffer", () => {
    const view = new PilotViewState();
    view.applyConfig(CONFIG);
    for (let i = 0; i < TRAIL_LIMIT + 500; i++) {
      view.applyState(stateAt(i * 1e-3, 0));
    }
    expect(view.trail.length).toBe(TRAIL_LIMIT);
    // oldest points were evicted
    expect(view.trail[0][0]).toBeCloseTo(500e-3, 9);
  });

  it("never stores widget values outside the device limits", () => {
    const view = new PilotViewState();
    view.applyConfig(CONFIG);
    view.setYaw(0, 10.0);
    view.setYaw(1, -4.0);
    view.setYaw(2, 0.3);
    expect(view.widgets.yaw[0]).toBeCloseTo(CONFIG.device_limit_rad, 12);
    expect(view.widgets.yaw[1]).toBeCloseTo(-CONFIG.device_limit_rad, 12);
    expect(view.widgets.yaw[2]).toBeCloseTo(0.3, 12);
  });

  it("sizes widgets from the session config", () => {
    const view = new PilotViewState();
    view.applyConfig(CONFIG);
    expect(view.widgets.yaw).toHaveLength(3);
    expect(view.widgets.pitch).toHaveLength(3);
  });
});
