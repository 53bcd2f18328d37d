// Browser entry point: canvas rendering and DOM wiring. Deliberately thin;
// all testable behavior lives in the pure modules it composes.

import { AgentPanel } from "./agentPanel.js";
import { connect, type SessionSocket } from "./client.js";
import { dragVector, endDrag, moveDrag, startDrag, type DragGesture } from "./drag.js";
import { isAck, isErr, isHello, isSnapshot, type Shape } from "./protocol.js";
import { applySnapshot, initialRenderState, type RenderState } from "./renderState.js";
import { SessionView } from "./sessionView.js";
import { fitViewport, worldToScreen, type Viewport } from "./transform.js";

const PULL_MAX_NORM = 3.0;

function drawShape(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  state: RenderState,
  shape: Shape,
): void {
  const bounds = state.scene!.bounds;
  ctx.beginPath();
  if (shape.type === "circle") {
    const [cx, cy] = worldToScreen(vp, bounds, shape.center);
    ctx.arc(cx, cy, Math.max(shape.radius * vp.scale, 2), 0, 2 * Math.PI);
  } else if (shape.type === "capsule") {
    const [ax, ay] = worldToScreen(vp, bounds, shape.a);
    const [bx, by] = worldToScreen(vp, bounds, shape.b);
    ctx.lineWidth = Math.max(2 * shape.radius * vp.scale, 3);
    ctx.lineCap = "round";
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
    return;
  } else {
    const pts = shape.vertices.map((v) => worldToScreen(vp, bounds, v));
    const first = pts[0];
    if (!first) return;
    ctx.moveTo(first[0], first[1]);
    for (const p of pts.slice(1)) ctx.lineTo(p[0], p[1]);
    ctx.closePath();
  }
  ctx.fill();
}

function render(
  canvas: HTMLCanvasElement,
  state: RenderState,
  drag: DragGesture | null,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || !state.scene) return;
  const vp = fitViewport(state.scene.bounds, canvas.width, canvas.height);
  const bounds = state.scene.bounds;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  ctx.fillStyle = "#555";
  for (const obs of state.scene.obstacles) drawShape(ctx, vp, state, obs);

  ctx.strokeStyle = "#8cf";
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (let i = 0; i < state.trail.length; i++) {
    const [x, y] = worldToScreen(vp, bounds, state.trail[i]!);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  }
  ctx.stroke();

  ctx.fillStyle = "#2a7";
  ctx.strokeStyle = "#2a7";
  for (const body of state.shapes) drawShape(ctx, vp, state, body);

  const goal = state.scene.goal;
  const [gx, gy] = worldToScreen(vp, bounds, goal.point);
  ctx.strokeStyle = "#d33";
  ctx.beginPath();
  ctx.arc(gx, gy, Math.max(goal.epsilon * vp.scale, 4), 0, 2 * Math.PI);
  ctx.stroke();

  if (drag) {
    const marker = state.frames[drag.frame];
    if (marker) {
      const [mx, my] = worldToScreen(vp, bounds, marker);
      const [vx, vy] = dragVector(drag, vp, PULL_MAX_NORM);
      ctx.strokeStyle = "#fa0";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(mx, my);
      ctx.lineTo(mx + vx * vp.scale, my - vy * vp.scale);
      ctx.stroke();
    }
  }
}

export function mount(root: HTMLElement, url: string): void {
  const canvas = document.createElement("canvas");
  canvas.width = 900;
  canvas.height = 640;
  const hud = document.createElement("pre");
  root.append(canvas, hud);

  let state = initialRenderState();
  let drag: DragGesture | null = null;
  const session = new SessionView();
  const panel = new AgentPanel();
  let sock: SessionSocket;

  const redraw = () => {
    render(canvas, state, drag);
    const role = session.role ?? "connecting";
    hud.textContent =
      `tick ${state.tick}  status ${state.status}  role ${role}\n` +
      `goal ${state.goalDistance?.toFixed(3) ?? "-"}  ` +
      `clearance ${state.minClearance?.toFixed(3) ?? "-"}  ` +
      `stalled ${state.stalled}\n` +
      (session.lastError ? `last error: ${session.lastError}\n` : "") +
      panel
        .list()
        .map((a) => `${a.id} [${a.kind}] period=${a.period} bound=${a.step_bound}`)
        .join("\n");
  };

  sock = connect(url, {
    onMessage: (msg) => {
      if (isHello(msg)) {
        session.role = msg.role;
      } else if (isSnapshot(msg)) {
        state = applySnapshot(state, msg);
        panel.syncFromSnapshot(msg.agents);
      } else if (isAck(msg)) {
        session.handleAck(msg);
      } else if (isErr(msg)) {
        session.handleErr(msg);
      }
      redraw();
    },
    onClose: () => {
      state = { ...state, status: "Disconnected" };
      redraw();
    },
  });

  const goalFrame = () => state.scene?.goal.frame ?? "ee";
  canvas.addEventListener("pointerdown", (ev) => {
    drag = startDrag(goalFrame(), ev.offsetX, ev.offsetY);
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (drag) {
      drag = moveDrag(drag, ev.offsetX, ev.offsetY);
      redraw();
    }
  });
  canvas.addEventListener("pointerup", () => {
    if (!drag || !state.scene) {
      drag = null;
      return;
    }
    const vp = fitViewport(state.scene.bounds, canvas.width, canvas.height);
    const body = endDrag(drag, vp, PULL_MAX_NORM);
    drag = null;
    if (body) sock.send(session.issue(body));
    redraw();
  });

  const bar = document.createElement("div");
  for (const [label, type] of [
    ["resume", "resume"],
    ["pause", "pause"],
    ["reset", "reset"],
  ] as const) {
    const btn = document.createElement("button");
    btn.textContent = label;
    btn.onclick = () => sock.send(session.issue({ type }));
    bar.append(btn);
  }
  const stepBtn = document.createElement("button");
  stepBtn.textContent = "step";
  stepBtn.onclick = () => sock.send(session.issue({ type: "step", n: 1 }));
  bar.append(stepBtn);
  root.append(bar);

  redraw();
}
