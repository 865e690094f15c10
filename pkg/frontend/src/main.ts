/**
 * Console wiring: widgets, connection management, render loop.
 * Single-threaded event loop: network callbacks mutate the view state,
 * the animation-frame loop reads it.
 */

import { connectWebSocket, SessionClient } from "./client.js";
import { PilotViewState } from "./model.js";
import { drawScene } from "./render.js";
import { ControlMode, CONTROL_MODES } from "./protocol.js";

const view = new PilotViewState();
const client = new SessionClient(view);

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const missesEl = document.getElementById("misses")!;
const errorEl = document.getElementById("error")!;
const jointsBox = document.getElementById("joints")!;
const throttle = document.getElementById("throttle") as HTMLInputElement;
const throttleLabel = document.getElementById("throttle-label")!;
const modeSelect = document.getElementById("mode") as HTMLSelectElement;
const addressInput = document.getElementById("address") as HTMLInputElement;
const connectBtn = document.getElementById("connect") as HTMLButtonElement;

CONTROL_MODES.forEach((m) => {
  const opt = document.createElement("option");
  opt.value = m;
  opt.textContent = m;
  modeSelect.appendChild(opt);
});

function buildJointSliders(): void {
  jointsBox.innerHTML = "";
  const cfg = view.config;
  if (!cfg) return;
  const limitDeg = (cfg.device_limit_rad * 180) / Math.PI;
  for (let k = 0; k < cfg.n_joints; k++) {
    const row = document.createElement("div");
    row.className = "joint-row";
    const label = document.createElement("span");
    label.textContent = `joint ${k + 1}`;
    const slider = document.createElement("input");
    slider.type = "range";
    // range-bounded widget: dragging past the device limit is impossible
    slider.min = String(-limitDeg);
    slider.max = String(limitDeg);
    slider.step = "0.5";
    slider.value = "0";
    const value = document.createElement("span");
    value.textContent = "0.0°";
    slider.addEventListener("input", () => {
      const deg = parseFloat(slider.value);
      view.setYaw(k, (deg * Math.PI) / 180);
      value.textContent = `${deg.toFixed(1)}°`;
    });
    row.append(label, slider, value);
    jointsBox.appendChild(row);
  }
}

throttle.addEventListener("input", () => {
  view.widgets.screw = parseFloat(throttle.value);
  throttleLabel.textContent = `${Math.round(view.widgets.screw * 100)}%`;
});

modeSelect.addEventListener("change", () => {
  view.widgets.mode = modeSelect.value as ControlMode;
  client.requestMode();
});

connectBtn.addEventListener("click", () => {
  client.detach();
  view.reset();
  connectWebSocket(client, addressInput.value);
});

const corridorToggle = document.getElementById("corridor") as HTMLInputElement;
corridorToggle.addEventListener("change", () => {
  view.corridor = corridorToggle.checked
    ? {
        // small zigzag overlay matching the conforming test course
        centerline: [
          [0.5, 0],
          [-0.7, 0],
          [-1.0, 0.18],
          [-1.3, 0],
          [-1.6, 0.18],
          [-2.4, 0.18],
        ],
        width: 0.22,
      }
    : null;
});

let hadConfig = false;
function frame(): void {
  if (view.config && !hadConfig) {
    hadConfig = true;
    buildJointSliders();
  }
  statusEl.textContent = view.status;
  statusEl.className = `pill ${view.status}`;
  missesEl.textContent = `deadline misses: ${view.latest?.misses ?? 0}`;
  errorEl.textContent = view.lastError;
  const cam = {
    scale: 250,
    cx: view.latest?.pose.x ?? 0,
    cy: view.latest?.pose.y ?? 0,
  };
  drawScene(ctx, view, cam, canvas.width, canvas.height);
  if (view.status !== "connected") {
    ctx.fillStyle = "rgba(20, 16, 16, 0.55)";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#ddd";
    ctx.font = "16px sans-serif";
    ctx.fillText("disconnected: use Connect", 24, 36);
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
