/**
 * Top-down 2D canvas rendering: oriented capsules for the screw segments,
 * hinge dots for the U-joints, the trajectory trail, corridor walls when
 * configured, and clamp/deadline indicators.
 */

import {
  BODY_DIAMETER_M,
  chainShape,
  ChainShape,
  corridorWalls,
} from "./geometry.js";
import { PilotViewState } from "./model.js";

export interface Camera {
  scale: number; // pixels per meter
  cx: number; // world point at canvas center
  cy: number;
}

export function worldToCanvas(
  cam: Camera,
  width: number,
  height: number,
  x: number,
  y: number,
): [number, number] {
  return [
    width / 2 + (x - cam.cx) * cam.scale,
    height / 2 - (y - cam.cy) * cam.scale,
  ];
}

function capsule(
  ctx: CanvasRenderingContext2D,
  cam: Camera,
  w: number,
  h: number,
  x: number,
  y: number,
  axis: number,
  length: number,
  diameter: number,
  fill: string,
) {
  const [px, py] = worldToCanvas(cam, w, h, x, y);
  ctx.save();
  ctx.translate(px, py);
  ctx.rotate(-axis);
  const L = length * cam.scale;
  const R = (diameter / 2) * cam.scale;
  ctx.beginPath();
  ctx.moveTo(-L / 2, -R);
  ctx.lineTo(L / 2, -R);
  ctx.arc(L / 2, 0, R, -Math.PI / 2, Math.PI / 2);
  ctx.lineTo(-L / 2, R);
  ctx.arc(-L / 2, 0, R, Math.PI / 2, (3 * Math.PI) / 2);
  ctx.closePath();
  ctx.fillStyle = fill;
  ctx.fill();
  ctx.strokeStyle = "#2a2a2a";
  ctx.stroke();
  ctx.restore();
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  view: PilotViewState,
  cam: Camera,
  width: number,
  height: number,
): ChainShape | null {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = view.status === "connected" ? "#10131a" : "#1a1016";
  ctx.fillRect(0, 0, width, height);
  drawGrid(ctx, cam, width, height);

  if (view.corridor) {
    const walls = corridorWalls(view.corridor);
    for (const wall of [walls.left, walls.right]) {
      ctx.beginPath();
      wall.forEach(([x, y], i) => {
        const [px, py] = worldToCanvas(cam, width, height, x, y);
        if (i === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      });
      ctx.strokeStyle = "#6e5a3a";
      ctx.lineWidth = 2.5;
      ctx.stroke();
    }
  }

  if (view.trail.length > 1) {
    ctx.beginPath();
    view.trail.forEach(([x, y], i) => {
      const [px, py] = worldToCanvas(cam, width, height, x, y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.strokeStyle = "#3f7fbf";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }

  const state = view.latest;
  if (!state) return null;
  const deflections = state.joints.map((j) => j.yaw_rad);
  const shape = chainShape(state.pose, deflections);
  shape.centers.forEach(([x, y], i) => {
    const clamped = i > 0 && state.clamped[i - 1];
    capsule(
      ctx, cam, width, height, x, y, shape.axes[i],
      0.196, BODY_DIAMETER_M,
      clamped ? "#8a4430" : i === 0 ? "#4f7f4f" : "#55606e",
    );
  });
  shape.joints.forEach(([x, y]) => {
    const [px, py] = worldToCanvas(cam, width, height, x, y);
    ctx.beginPath();
    ctx.arc(px, py, 4, 0, 2 * Math.PI);
    ctx.fillStyle = "#d8d8d8";
    ctx.fill();
  });
  return shape;
}

function drawGrid(
  ctx: CanvasRenderingContext2D,
  cam: Camera,
  width: number,
  height: number,
) {
  const step = 0.5; // meters
  const span = Math.max(width, height) / cam.scale;
  const x0 = Math.floor((cam.cx - span) / step) * step;
  const y0 = Math.floor((cam.cy - span) / step) * step;
  ctx.strokeStyle = "#222833";
  ctx.lineWidth = 1;
  for (let x = x0; x < cam.cx + span; x += step) {
    const [px] = worldToCanvas(cam, width, height, x, 0);
    ctx.beginPath();
    ctx.moveTo(px, 0);
    ctx.lineTo(px, height);
    ctx.stroke();
  }
  for (let y = y0; y < cam.cy + span; y += step) {
    const [, py] = worldToCanvas(cam, width, height, 0, y);
    ctx.beginPath();
    ctx.moveTo(0, py);
    ctx.lineTo(width, py);
    ctx.stroke();
  }
}
