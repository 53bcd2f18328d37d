import { describe, expect, it } from "vitest";
import type { BoundsDesc, Point } from "../src/protocol.js";
import {
  fitViewport,
  screenDeltaToWorld,
  screenToWorld,
  worldToScreen,
} from "../src/transform.js";

const bounds: BoundsDesc = { xmin: 0, ymin: 0, xmax: 12, ymax: 10 };

describe("viewport transforms", () => {
  it("fits the bounds inside the canvas with the margin", () => {
    const vp = fitViewport(bounds, 900, 640, 20);
    const corners: Point[] = [
      [bounds.xmin, bounds.ymin],
      [bounds.xmax, bounds.ymax],
    ];
    for (const c of corners) {
      const [sx, sy] = worldToScreen(vp, bounds, c);
      expect(sx).toBeGreaterThanOrEqual(20 - 1e-9);
      expect(sx).toBeLessThanOrEqual(880 + 1e-9);
      expect(sy).toBeGreaterThanOrEqual(20 - 1e-9);
      expect(sy).toBeLessThanOrEqual(620 + 1e-9);
    }
  });

  it("preserves aspect ratio", () => {
    const vp = fitViewport(bounds, 900, 640);
    const [ax] = worldToScreen(vp, bounds, [1, 0]);
    const [bx] = worldToScreen(vp, bounds, [2, 0]);
    const [, ay] = worldToScreen(vp, bounds, [0, 1]);
    const [, by] = worldToScreen(vp, bounds, [0, 2]);
    expect(Math.abs(bx - ax)).toBeCloseTo(Math.abs(by - ay), 10);
  });

  it("flips the y axis", () => {
    const vp = fitViewport(bounds, 900, 640);
    const [, lowY] = worldToScreen(vp, bounds, [5, 1]);
    const [, highY] = worldToScreen(vp, bounds, [5, 9]);
    expect(highY).toBeLessThan(lowY);
  });

  it("round-trips world -> screen -> world", () => {
    const vp = fitViewport(bounds, 900, 640);
    const pts: Point[] = [
      [0, 0],
      [12, 10],
      [3.25, 7.5],
      [11.9, 0.1],
    ];
    for (const p of pts) {
      const back = screenToWorld(vp, bounds, worldToScreen(vp, bounds, p));
      expect(back[0]).toBeCloseTo(p[0], 10);
      expect(back[1]).toBeCloseTo(p[1], 10);
    }
  });

  it("converts screen displacements with a y flip and no offset", () => {
    const vp = fitViewport(bounds, 900, 640);
    const [dx, dy] = screenDeltaToWorld(vp, vp.scale, -2 * vp.scale);
    expect(dx).toBeCloseTo(1, 10);
    expect(dy).toBeCloseTo(2, 10);
  });
});
