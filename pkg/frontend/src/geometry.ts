/**
 * Planar chain geometry for rendering: reconstructs segment capsules from
 * the streamed head pose and joint deflections. The construction mirrors
 * the simulator: segment centers and U-joints alternate at half-link
 * spacing l, each joint bends the axis by its deflection (positive toward
 * the body's +y side).
 */

export const HALF_LINK_M = 0.182;
export const BODY_DIAMETER_M = 0.15;

export interface Pose {
  x: number;
  y: number;
  psi: number;
}

export interface ChainShape {
  /** Segment centers, head first: (nJoints + 1) entries. */
  centers: [number, number][];
  /** U-joint positions between consecutive segments. */
  joints: [number, number][];
  /** World heading of each segment's forward axis. */
  axes: number[];
}

/**
 * Build the chain shape from the head pose and joint yaw deflections.
 * The head segment's center sits at the pose; each following segment
 * hangs one joint behind, its axis rotated by the accumulated deflection.
 */
export function chainShape(
  pose: Pose,
  deflections: number[],
  halfLink: number = HALF_LINK_M,
): ChainShape {
  const centers: [number, number][] = [[pose.x, pose.y]];
  const joints: [number, number][] = [];
  const axes: number[] = [pose.psi];
  let cx = pose.x;
  let cy = pose.y;
  let axis = pose.psi;
  for (const d of deflections) {
    const jx = cx - halfLink * Math.cos(axis);
    const jy = cy - halfLink * Math.sin(axis);
    joints.push([jx, jy]);
    axis -= d;
    cx = jx - halfLink * Math.cos(axis);
    cy = jy - halfLink * Math.sin(axis);
    centers.push([cx, cy]);
    axes.push(axis);
  }
  return { centers, joints, axes };
}

/** Consecutive segment-center spacings (m). */
export function centerGaps(shape: ChainShape): number[] {
  const gaps: number[] = [];
  for (let i = 0; i + 1 < shape.centers.length; i++) {
    const [ax, ay] = shape.centers[i];
    const [bx, by] = shape.centers[i + 1];
    gaps.push(Math.hypot(bx - ax, by - ay));
  }
  return gaps;
}

/**
 * Max distance of any interior center from the line through the first and
 * last centers; ~0 for straight and M-configuration poses, whose centers
 * are collinear by construction.
 */
export function collinearityError(shape: ChainShape): number {
  const first = shape.centers[0];
  const last = shape.centers[shape.centers.length - 1];
  const vx = last[0] - first[0];
  const vy = last[1] - first[1];
  const norm = Math.hypot(vx, vy);
  if (norm === 0) return 0;
  let worst = 0;
  for (const [px, py] of shape.centers.slice(1, -1)) {
    const cross = Math.abs(
      (vx * (py - first[1]) - vy * (px - first[0])) / norm,
    );
    worst = Math.max(worst, cross);
  }
  return worst;
}

/** Segment tilt angles relative to the head-to-tail center line. */
export function tiltsAboutCenterLine(shape: ChainShape): number[] {
  const first = shape.centers[0];
  const last = shape.centers[shape.centers.length - 1];
  const lineAngle = Math.atan2(last[1] - first[1], last[0] - first[0]);
  return shape.axes.map((a) => wrapAngle(a - lineAngle));
}

export function wrapAngle(a: number): number {
  let w = a % (2 * Math.PI);
  if (w <= -Math.PI) w += 2 * Math.PI;
  if (w > Math.PI) w -= 2 * Math.PI;
  return w;
}

/** Alternating joint deflections forming the M pose at a given body angle. */
export function mConfigDeflections(thetaM: number, nJoints: number): number[] {
  const d = Math.PI - thetaM;
  return Array.from({ length: nJoints }, (_, k) => (k % 2 === 0 ? d : -d));
}

export interface CorridorView {
  centerline: [number, number][];
  width: number;
}

/**
 * Wall polylines of a corridor: the centerline offset by half the width to
 * each side, with mitered (clamped) corners.
 */
export function corridorWalls(corridor: CorridorView): {
  left: [number, number][];
  right: [number, number][];
} {
  const pts = corridor.centerline;
  const half = corridor.width / 2;
  const normals: [number, number][] = [];
  for (let i = 0; i < pts.length; i++) {
    const prev = pts[Math.max(i - 1, 0)];
    const next = pts[Math.min(i + 1, pts.length - 1)];
    const dx = next[0] - prev[0];
    const dy = next[1] - prev[1];
    const len = Math.hypot(dx, dy) || 1;
    normals.push([-dy / len, dx / len]);
  }
  const offset = (sign: number): [number, number][] =>
    pts.map((p, i) => [
      p[0] + sign * half * normals[i][0],
      p[1] + sign * half * normals[i][1],
    ]);
  return { left: offset(1), right: offset(-1) };
}
