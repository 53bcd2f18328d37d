import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import type { SnapshotMsg } from "../src/protocol.js";
import {
  applySnapshot,
  initialRenderState,
  serializeRenderState,
  TRAIL_LIMIT,
} from "../src/renderState.js";

const stream: SnapshotMsg[] = JSON.parse(
  readFileSync(new URL("./fixtures/snapshot_stream.json", import.meta.url), "utf-8"),
);

function replay(snaps: SnapshotMsg[]) {
  let state = initialRenderState();
  for (const snap of snaps) {
    state = applySnapshot(state, snap);
  }
  return state;
}

describe("render state replay", () => {
  it("fixture stream is a full recorded session", () => {
    expect(stream.length).toBeGreaterThan(100);
    expect(stream[0]!.type).toBe("snapshot");
  });

  it("replaying the recorded stream twice gives identical serializations", () => {
    const a = serializeRenderState(replay(stream));
    const b = serializeRenderState(replay(stream));
    expect(a).toBe(b);
  });

  it("final state reflects the last snapshot", () => {
    const state = replay(stream);
    const last = stream[stream.length - 1]!;
    expect(state.tick).toBe(last.tick);
    expect(state.status).toBe("Succeeded");
    expect(state.seq).toBe(last.seq);
    expect(state.trail.length).toBe(stream.length);
  });

  it("serialization is canonical regardless of object key order", () => {
    const state = replay(stream.slice(0, 3));
    const shuffled = JSON.parse(JSON.stringify(state));
    // rebuild with reversed key insertion order
    const reversed: Record<string, unknown> = {};
    for (const k of Object.keys(shuffled).reverse()) {
      reversed[k] = shuffled[k];
    }
    expect(serializeRenderState(reversed as never)).toBe(serializeRenderState(state));
  });

  it("ignores stale and duplicate seq numbers", () => {
    let state = initialRenderState();
    state = applySnapshot(state, stream[0]!);
    state = applySnapshot(state, stream[1]!);
    const after = applySnapshot(state, stream[0]!);
    expect(after).toBe(state);
    expect(serializeRenderState(after)).toBe(serializeRenderState(state));
  });

  it("out-of-order delivery converges to the in-order result", () => {
    const inOrder = replay(stream);
    const withDuplicates = [...stream.slice(0, 50), ...stream.slice(20, 40), ...stream.slice(50)];
    expect(serializeRenderState(replay(withDuplicates))).toBe(serializeRenderState(inOrder));
  });

  it("trail restarts when the tick rewinds (reset)", () => {
    let state = replay(stream.slice(0, 10));
    const resetSnap: SnapshotMsg = { ...stream[0]!, seq: state.seq + 1, tick: 0 };
    state = applySnapshot(state, resetSnap);
    expect(state.trail.length).toBe(1);
    expect(state.tick).toBe(0);
  });

  it("trail is capped", () => {
    let state = initialRenderState();
    for (let i = 0; i < TRAIL_LIMIT + 50; i++) {
      state = applySnapshot(state, { ...stream[0]!, seq: i + 1, tick: i });
    }
    expect(state.trail.length).toBe(TRAIL_LIMIT);
  });

  it("initial state serializes deterministically", () => {
    expect(serializeRenderState(initialRenderState())).toBe(
      serializeRenderState(initialRenderState()),
    );
  });
});
