// Pure render state: a fold over the snapshot stream.
//
// applySnapshot is a pure function of (state, snapshot); replaying the same
// stream always produces the same state, and serializeRenderState emits a
// canonical string (sorted keys, fixed float precision) so equality can be
// checked byte for byte.

import type { AgentDesc, Point, SceneDesc, Shape, SnapshotMsg } from "./protocol.js";

export const TRAIL_LIMIT = 5000;

export interface RenderState {
  seq: number; // last applied snapshot seq
  tick: number;
  status: string;
  q: number[];
  shapes: Shape[];
  frames: Record<string, Point>;
  scene: SceneDesc | null;
  goalDistance: number | null;
  minClearance: number | null;
  stalled: boolean;
  agents: AgentDesc[];
  trail: Point[]; // goal-frame positions, oldest first
}

export function initialRenderState(): RenderState {
  return {
    seq: -1,
    tick: -1,
    status: "Disconnected",
    q: [],
    shapes: [],
    frames: {},
    scene: null,
    goalDistance: null,
    minClearance: null,
    stalled: false,
    agents: [],
    trail: [],
  };
}

/**
 * Fold one snapshot into the state. Stale or duplicate frames (seq not
 * greater than the last applied) are ignored. A snapshot with a smaller
 * tick than the trail's last entry means the engine was reset, so the
 * trail restarts.
 */
export function applySnapshot(state: RenderState, snap: SnapshotMsg): RenderState {
  if (snap.seq <= state.seq) {
    return state;
  }
  const goalFrame = snap.scene.goal.frame;
  const marker = snap.frames[goalFrame];
  let trail = state.trail;
  if (snap.tick < state.tick) {
    trail = [];
  }
  if (marker !== undefined) {
    trail = [...trail, [marker[0], marker[1]]];
    if (trail.length > TRAIL_LIMIT) {
      trail = trail.slice(trail.length - TRAIL_LIMIT);
    }
  }
  return {
    seq: snap.seq,
    tick: snap.tick,
    status: snap.status,
    q: [...snap.q],
    shapes: snap.shapes,
    frames: snap.frames,
    scene: snap.scene,
    goalDistance: snap.goal_distance,
    minClearance: snap.min_clearance,
    stalled: snap.stalled,
    agents: snap.agents,
    trail,
  };
}

function canonical(value: unknown): string {
  if (value === null || value === undefined) {
    return "null";
  }
  if (typeof value === "number") {
    if (!Number.isFinite(value)) {
      return JSON.stringify(String(value));
    }
    // fixed precision keeps the serialization stable across float noise
    return Number.isInteger(value) ? String(value) : value.toFixed(9);
  }
  if (typeof value === "string" || typeof value === "boolean") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonical).join(",")}]`;
  }
  const obj = value as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  const body = keys.map((k) => `${JSON.stringify(k)}:${canonical(obj[k])}`);
  return `{${body.join(",")}}`;
}

/** Canonical byte-stable serialization of the full render state. */
export function serializeRenderState(state: RenderState): string {
  return canonical(state);
}
