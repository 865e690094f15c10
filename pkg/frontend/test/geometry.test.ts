import { describe, expect, it } from "vitest";

import {
  centerGaps,
  chainShape,
  collinearityError,
  corridorWalls,
  HALF_LINK_M,
  mConfigDeflections,
  tiltsAboutCenterLine,
} from "../src/geometry.js";

const ORIGIN = { x: 0, y: 0, psi: 0 };

describe("chainShape", () => {
  it("renders a straight pose as collinear capsules", () => {
    const shape = chainShape(ORIGIN, [0, 0, 0]);
    expect(shape.centers).toHaveLength(4);
    for (const [i, [x, y]] of shape.centers.entries()) {
      expect(x).toBeCloseTo(-2 * HALF_LINK_M * i, 12);
      expect(y).toBeCloseTo(0, 12);
    }
    expect(collinearityError(shape)).toBeLessThan(1e-12);
  });

  it("matches the reference construction for a single right-angle bend", () => {
    const shape = chainShape(ORIGIN, [Math.PI / 2, 0, 0]);
    // second segment center from the head-frame construction
    expect(shape.centers[1][0]).toBeCloseTo(-0.182, 12);
    expect(shape.centers[1][1]).toBeCloseTo(0.182, 12);
  });

  it("keeps half-link spacing between joints and centers", () => {
    const shape = chainShape(ORIGIN, [0.4, -0.7, 0.2]);
    for (let k = 0; k < shape.joints.length; k++) {
      const [jx, jy] = shape.joints[k];
      const [ax, ay] = shape.centers[k];
      const [bx, by] = shape.centers[k + 1];
      expect(Math.hypot(jx - ax, jy - ay)).toBeCloseTo(HALF_LINK_M, 12);
      expect(Math.hypot(jx - bx, jy - by)).toBeCloseTo(HALF_LINK_M, 12);
    }
  });

  it("transforms with the head pose", () => {
    const shape = chainShape({ x: 1.0, y: -2.0, psi: Math.PI / 2 }, [0, 0, 0]);
    // chain extends backward along -psi: straight down from the head
    expect(shape.centers[3][0]).toBeCloseTo(1.0, 12);
    expect(shape.centers[3][1]).toBeCloseTo(-2.0 - 6 * HALF_LINK_M, 12);
  });
});

describe("M-configuration pose (140 deg)", () => {
  const defl = mConfigDeflections((140 * Math.PI) / 180, 3);
  const shape = chainShape(ORIGIN, defl);

  it("alternates joint deflections", () => {
    expect(defl[0]).toBeCloseTo(0.6981317008, 9);
    expect(defl[1]).toBeCloseTo(-0.6981317008, 9);
    expect(defl[2]).toBeCloseTo(0.6981317008, 9);
  });

  it("places segment centers per the reference values", () => {
    const expected = [
      [0.0, 0.0],
      [-0.3214200886, 0.116987345],
      [-0.6428401773, 0.2339746899],
      [-0.9642602659, 0.3509620349],
    ];
    for (const [i, [x, y]] of expected.entries()) {
      expect(shape.centers[i][0]).toBeCloseTo(x, 9);
      expect(shape.centers[i][1]).toBeCloseTo(y, 9);
    }
  });

  it("keeps centers collinear with uniform body-angle gaps", () => {
    expect(collinearityError(shape)).toBeLessThan(1e-12);
    for (const gap of centerGaps(shape)) {
      expect(gap).toBeCloseTo(0.342048114, 9);
    }
  });

  it("tilts segments alternately about the center line by half the body angle", () => {
    const tilts = tiltsAboutCenterLine(shape);
    const half = 0.6981317008 / 2;
    // the center line runs tail-ward; segment axes alternate +/- d/2 around it
    const magnitudes = tilts.map(Math.abs);
    for (const m of magnitudes) expect(m).toBeCloseTo(Math.PI - half, 9);
    expect(Math.sign(tilts[0])).not.toBe(Math.sign(tilts[1]));
    expect(Math.sign(tilts[1])).not.toBe(Math.sign(tilts[2]));
  });
});

describe("corridorWalls", () => {
  it("offsets a straight corridor by half the width each side", () => {
    const walls = corridorWalls({
      centerline: [
        [0, 0],
        [2, 0],
      ],
      width: 0.22,
    });
    expect(walls.left[0][1]).toBeCloseTo(0.11, 12);
    expect(walls.left[1][1]).toBeCloseTo(0.11, 12);
    expect(walls.right[0][1]).toBeCloseTo(-0.11, 12);
    expect(walls.right[1][0]).toBeCloseTo(2, 12);
  });

  it("miters a corner along the averaged normal", () => {
    const walls = corridorWalls({
      centerline: [
        [0, 0],
        [1, 0],
        [1, 1],
      ],
      width: 0.2,
    });
    // corner normal bisects the right-angle turn
    const [cx, cy] = walls.left[1];
    expect(cx).toBeCloseTo(1 - 0.1 / Math.SQRT2, 12);
    expect(cy).toBeCloseTo(0.1 / Math.SQRT2, 12);
  });
});
