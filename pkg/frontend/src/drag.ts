// Drag gesture -> operator pull vector. The drag happens in screen space;
// the resulting vector is expressed in world units and capped in length so
// a wild mouse swipe cannot request an enormous pull.

import type { InjectPullCmd, Point } from "./protocol.js";
import { screenDeltaToWorld, type Viewport } from "./transform.js";

export interface DragGesture {
  frame: string;
  startX: number;
  startY: number;
  currentX: number;
  currentY: number;
}

export function startDrag(frame: string, x: number, y: number): DragGesture {
  return { frame, startX: x, startY: y, currentX: x, currentY: y };
}

export function moveDrag(g: DragGesture, x: number, y: number): DragGesture {
  return { ...g, currentX: x, currentY: y };
}

/** World-space pull vector for the gesture, clipped to maxNorm. */
export function dragVector(g: DragGesture, vp: Viewport, maxNorm: number): Point {
  const [wx, wy] = screenDeltaToWorld(vp, g.currentX - g.startX, g.currentY - g.startY);
  const norm = Math.hypot(wx, wy);
  if (norm <= maxNorm || norm === 0) {
    return [wx, wy];
  }
  const s = maxNorm / norm;
  return [wx * s, wy * s];
}

/**
 * Finish the gesture: returns the inject_pull command body (without seq),
 * or null if the drag was too small to mean anything.
 */
export function endDrag(
  g: DragGesture,
  vp: Viewport,
  maxNorm: number,
  minNorm = 1e-3,
): Omit<InjectPullCmd, "seq"> | null {
  const vector = dragVector(g, vp, maxNorm);
  if (Math.hypot(vector[0], vector[1]) < minNorm) {
    return null;
  }
  return { type: "inject_pull", frame: g.frame, vector };
}
