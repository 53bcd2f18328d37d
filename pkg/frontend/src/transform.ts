// World <-> screen mapping. World y points up, screen y points down.

import type { BoundsDesc, Point } from "./protocol.js";

export interface Viewport {
  scale: number; // pixels per world unit
  offsetX: number; // screen x of world xmin
  offsetY: number; // screen y of world ymax
}

/** Fit the world bounds into a canvas, preserving aspect ratio. */
export function fitViewport(
  bounds: BoundsDesc,
  width: number,
  height: number,
  margin = 20,
): Viewport {
  const ww = bounds.xmax - bounds.xmin;
  const wh = bounds.ymax - bounds.ymin;
  const scale = Math.min((width - 2 * margin) / ww, (height - 2 * margin) / wh);
  const offsetX = (width - ww * scale) / 2;
  const offsetY = (height - wh * scale) / 2;
  return { scale, offsetX, offsetY };
}

export function worldToScreen(vp: Viewport, bounds: BoundsDesc, p: Point): Point {
  return [
    vp.offsetX + (p[0] - bounds.xmin) * vp.scale,
    vp.offsetY + (bounds.ymax - p[1]) * vp.scale,
  ];
}

export function screenToWorld(vp: Viewport, bounds: BoundsDesc, p: Point): Point {
  return [
    bounds.xmin + (p[0] - vp.offsetX) / vp.scale,
    bounds.ymax - (p[1] - vp.offsetY) / vp.scale,
  ];
}

/** Convert a screen-space displacement to a world-space vector (y flipped). */
export function screenDeltaToWorld(vp: Viewport, dx: number, dy: number): Point {
  return [dx / vp.scale, -dy / vp.scale];
}
