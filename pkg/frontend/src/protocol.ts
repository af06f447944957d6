/** Wire types for the gateway's topic-bus websocket protocol. */

export const SERVER_TOPICS = [
  "humans", "walls", "objects", "interactions", "goal", "robot", "episode",
] as const;
export const CLIENT_TOPICS = ["joystick", "control"] as const;

export type Topic = (typeof SERVER_TOPICS)[number]
  | (typeof CLIENT_TOPICS)[number];

export interface Envelope {
  topic: string;
  seq: number;
  stamp: number;
  payload: unknown;
}

export interface RobotPayload { x: number; y: number; angle: number; }
export interface GoalPayload { identifier: number; x: number; y: number; }
export interface HumanRecord {
  id: number; x: number; y: number; angle: number;
  ix: number; iy: number; iangle: number;
  mobility: string; group_id: number | null;
}
export interface ObjectRecord {
  id: number; x: number; y: number; angle: number;
  sideX: number; sideY: number; kind: string;
}
export interface WallRecord {
  wall_id: number; x1: number; y1: number; x2: number; y2: number;
}
export interface InteractionRecord {
  entity1_id: number; entity2_id: number; interaction_type: string;
}
export interface EpisodePayload {
  state: "running" | "reached" | "saved" | "discarded" | "error";
  frame_id: number;
  detail?: string;
}
export interface JoystickPayload { axis_id: number; value: number; }
export interface ControlPayload {
  action: "regenerate" | "save" | "discard";
  seed?: number;
  user_id?: string;
}

/** Key order on the wire is fixed: topic, seq, stamp, payload. Object
 * literal insertion order gives exactly that. */
export function encodeEnvelope(env: Envelope): string {
  return JSON.stringify({
    topic: env.topic, seq: env.seq, stamp: env.stamp, payload: env.payload,
  });
}

export function decodeEnvelope(data: string): Envelope {
  let doc: unknown;
  try {
    doc = JSON.parse(data);
  } catch {
    throw new Error("envelope is not valid JSON");
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new Error("envelope must be an object");
  }
  const rec = doc as Record<string, unknown>;
  const { topic, seq, stamp } = rec;
  if (typeof topic !== "string") throw new Error("missing topic");
  if (typeof seq !== "number" || !Number.isInteger(seq) || seq < 0) {
    throw new Error("bad seq");
  }
  if (typeof stamp !== "number") throw new Error("bad stamp");
  if (!("payload" in rec)) throw new Error("missing payload");
  return { topic, seq, stamp, payload: rec.payload };
}

/** stamp = frame_id * dt, so the frame counter is visible on every topic. */
export function frameIdFromStamp(stamp: number, dt: number): number {
  return Math.round(stamp / dt);
}
