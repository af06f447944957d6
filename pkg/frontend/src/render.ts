/** Scene to drawing primitives. Pure data in, pure data out; the canvas
 * painter in app.ts just walks the list, which keeps geometry testable. */

import type {
  GoalPayload, HumanRecord, InteractionRecord, ObjectRecord, RobotPayload,
  WallRecord,
} from "./protocol.js";
import { TopicCache } from "./cache.js";

export interface Segment { x1: number; y1: number; x2: number; y2: number; }
export interface Wedge { x: number; y: number; angle: number; walker: boolean; }
export interface Rect {
  x: number; y: number; angle: number; sideX: number; sideY: number;
  kind: string;
}
export interface Marker { x: number; y: number; }

export interface ScenePrimitives {
  walls: Segment[];
  humans: Wedge[];
  objects: Rect[];
  goal: Marker | null;
  robot: Wedge | null;
  interactionLines: Segment[];
  /** World-frame direction from robot to goal; drawn as a HUD arrow pinned
   * to the robot so an off-screen goal stays pointed at. */
  hudArrowAngle: number | null;
  banner: boolean;
}

function entityPosition(id: number, humans: HumanRecord[],
                        objects: ObjectRecord[]): Marker | null {
  for (const h of humans) if (h.id === id) return { x: h.x, y: h.y };
  for (const o of objects) if (o.id === id) return { x: o.x, y: o.y };
  return null;
}

export function scenePrimitives(cache: TopicCache,
                                nowMs: number): ScenePrimitives {
  const humans = cache.payload<HumanRecord[]>("humans") ?? [];
  const objects = cache.payload<ObjectRecord[]>("objects") ?? [];
  const walls = cache.payload<WallRecord[]>("walls") ?? [];
  const interactions =
    cache.payload<InteractionRecord[]>("interactions") ?? [];
  const robot = cache.payload<RobotPayload>("robot") ?? null;
  const goal = cache.payload<GoalPayload>("goal") ?? null;

  const lines: Segment[] = [];
  for (const it of interactions) {
    const a = entityPosition(it.entity1_id, humans, objects);
    const b = entityPosition(it.entity2_id, humans, objects);
    if (a && b) lines.push({ x1: a.x, y1: a.y, x2: b.x, y2: b.y });
  }

  let hud: number | null = null;
  if (robot && goal) {
    hud = Math.atan2(goal.y - robot.y, goal.x - robot.x);
  }

  return {
    walls: walls.map((w) => ({ x1: w.x1, y1: w.y1, x2: w.x2, y2: w.y2 })),
    humans: humans.map((h) => ({
      x: h.x, y: h.y, angle: h.angle, walker: h.mobility === "walker",
    })),
    objects: objects.map((o) => ({
      x: o.x, y: o.y, angle: o.angle, sideX: o.sideX, sideY: o.sideY,
      kind: o.kind,
    })),
    goal: goal ? { x: goal.x, y: goal.y } : null,
    robot: robot
      ? { x: robot.x, y: robot.y, angle: robot.angle, walker: false }
      : null,
    interactionLines: lines,
    hudArrowAngle: hud,
    banner: cache.stale(nowMs),
  };
}

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
}

/** Fit the wall bounding box into a width x height canvas, y up. */
export function fitViewport(walls: Segment[], width: number,
                            height: number, marginPx = 20): Viewport {
  if (walls.length === 0) return { scale: 40, offsetX: width / 2, offsetY: height / 2 };
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const w of walls) {
    minX = Math.min(minX, w.x1, w.x2);
    maxX = Math.max(maxX, w.x1, w.x2);
    minY = Math.min(minY, w.y1, w.y2);
    maxY = Math.max(maxY, w.y1, w.y2);
  }
  const spanX = Math.max(maxX - minX, 0.1);
  const spanY = Math.max(maxY - minY, 0.1);
  const scale = Math.min((width - 2 * marginPx) / spanX,
                         (height - 2 * marginPx) / spanY);
  return {
    scale,
    offsetX: width / 2 - scale * (minX + maxX) / 2,
    offsetY: height / 2 + scale * (minY + maxY) / 2,
  };
}

export function worldToScreen(v: Viewport, x: number,
                              y: number): [number, number] {
  return [v.offsetX + v.scale * x, v.offsetY - v.scale * y];
}
