// Wire types for the live session WebSocket protocol (docs/protocol.md).
// Field names here must match the server exactly.

export type Point = [number, number];

export interface CircleShape {
  type: "circle";
  center: Point;
  radius: number;
}

export interface CapsuleShape {
  type: "capsule";
  a: Point;
  b: Point;
  radius: number;
}

export interface PolygonShape {
  type: "polygon";
  vertices: Point[];
}

export type Shape = CircleShape | CapsuleShape | PolygonShape;

export interface BoundsDesc {
  xmin: number;
  ymin: number;
  xmax: number;
  ymax: number;
}

export interface GoalDesc {
  frame: string;
  point: Point;
  epsilon: number;
}

export interface SceneDesc {
  bounds: BoundsDesc;
  obstacles: Shape[];
  goal: GoalDesc;
}

export interface AgentDesc {
  id: string;
  kind: string;
  period: number;
  step_bound: number;
  enabled: boolean;
  last_active_tick: number | null;
}

export interface MetricsDesc {
  success: boolean;
  ticks_used: number;
  workspace_path_length: number;
  config_path_length: number;
  min_clearance: number | null;
  blocked_ticks: number;
  line_of_sight_fraction: number;
  comfort: number;
}

export interface SnapshotMsg {
  type: "snapshot";
  seq: number;
  tick: number;
  status: string;
  q: number[];
  shapes: Shape[];
  frames: Record<string, Point>;
  scene: SceneDesc;
  goal_distance: number;
  min_clearance: number | null;
  stalled: boolean;
  agents: AgentDesc[];
  metrics: MetricsDesc | null;
}

export interface HelloMsg {
  type: "hello";
  role: "controller" | "observer";
}

export interface AckMsg {
  type: "ack";
  seq: number;
  tick?: number;
}

export interface ErrMsg {
  type: "err";
  seq: number | null;
  error: string;
}

export type ServerMsg = SnapshotMsg | HelloMsg | AckMsg | ErrMsg;

export interface InjectPullCmd {
  type: "inject_pull";
  seq: number;
  frame: string;
  vector: Point;
}

export interface SetAgentCmd {
  type: "set_agent";
  seq: number;
  id: string;
  period?: number;
  step_bound?: number;
  enabled?: boolean;
}

export interface SimpleCmd {
  type: "pause" | "resume" | "reset" | "get_log" | "get_trace";
  seq: number;
}

export interface StepCmd {
  type: "step";
  seq: number;
  n: number;
}

export type ClientCmd = InjectPullCmd | SetAgentCmd | SimpleCmd | StepCmd;

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null;
}

export function isSnapshot(msg: unknown): msg is SnapshotMsg {
  return (
    isRecord(msg) &&
    msg.type === "snapshot" &&
    typeof msg.seq === "number" &&
    typeof msg.tick === "number" &&
    Array.isArray(msg.q) &&
    Array.isArray(msg.shapes) &&
    isRecord(msg.scene)
  );
}

export function isHello(msg: unknown): msg is HelloMsg {
  return isRecord(msg) && msg.type === "hello" && typeof msg.role === "string";
}

export function isAck(msg: unknown): msg is AckMsg {
  return isRecord(msg) && msg.type === "ack" && typeof msg.seq === "number";
}

export function isErr(msg: unknown): msg is ErrMsg {
  return isRecord(msg) && msg.type === "err" && typeof msg.error === "string";
}

export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (isSnapshot(data) || isHello(data) || isAck(data) || isErr(data)) {
    return data;
  }
  return null;
}
