import { describe, expect, it } from "vitest";
import { TopicCache } from "../src/cache.js";
import { fitViewport, scenePrimitives, worldToScreen } from "../src/render.js";

function seeded(): TopicCache {
  const cache = new TopicCache();
  const put = (topic: string, payload: unknown) =>
    cache.put({ topic, seq: 0, stamp: 0, payload }, 1000);
  put("walls", [
    { wall_id: 0, x1: -5, y1: -3, x2: 5, y2: -3 },
    { wall_id: 1, x1: 5, y1: -3, x2: 5, y2: 3 },
    { wall_id: 2, x1: 5, y1: 3, x2: -5, y2: 3 },
    { wall_id: 3, x1: -5, y1: 3, x2: -5, y2: -3 },
  ]);
  put("humans", [
    { id: 1, x: 1, y: 1, angle: 0, ix: 0, iy: 0, iangle: 0,
      mobility: "static", group_id: null },
    { id: 2, x: -1, y: 1, angle: 3, ix: 0.1, iy: 0, iangle: 0,
      mobility: "walker", group_id: null },
  ]);
  put("objects", [
    { id: 3, x: 2, y: -2, angle: 0.5, sideX: 0.8, sideY: 0.6,
      kind: "table" },
  ]);
  put("interactions", [
    { entity1_id: 1, entity2_id: 3, interaction_type: "human_laptop_interaction" },
  ]);
  put("robot", { x: 0, y: 0, angle: 0 });
  put("goal", { identifier: 0, x: 100, y: 100 });
  return cache;
}

describe("scene primitives", () => {
  it("draws a line between interacting entities", () => {
    const prims = scenePrimitives(seeded(), 1000);
    expect(prims.interactionLines).toEqual([
      { x1: 1, y1: 1, x2: 2, y2: -2 },
    ]);
  });

  it("skips interactions naming unknown entities", () => {
    const cache = seeded();
    cache.put({ topic: "interactions", seq: 1, stamp: 0, payload: [
      { entity1_id: 1, entity2_id: 999, interaction_type: "x" },
    ] }, 1000);
    expect(scenePrimitives(cache, 1000).interactionLines).toEqual([]);
  });

  it("HUD arrow points at the goal even far off screen", () => {
    const prims = scenePrimitives(seeded(), 1000);
    expect(prims.hudArrowAngle).toBeCloseTo(Math.atan2(100, 100), 12);
  });

  it("marks walkers and keeps object extents", () => {
    const prims = scenePrimitives(seeded(), 1000);
    expect(prims.humans.map((h) => h.walker)).toEqual([false, true]);
    expect(prims.objects[0]).toMatchObject({ sideX: 0.8, sideY: 0.6 });
  });

  it("shows the banner once data is stale for over a second", () => {
    const cache = seeded(); // last message at t = 1000 ms
    expect(scenePrimitives(cache, 1900).banner).toBe(false);
    expect(scenePrimitives(cache, 2001).banner).toBe(true);
  });

  it("banner shows before any data arrives", () => {
    expect(scenePrimitives(new TopicCache(), 0).banner).toBe(true);
  });
});

describe("viewport", () => {
  it("fits the room and flips y", () => {
    const prims = scenePrimitives(seeded(), 1000);
    const view = fitViewport(prims.walls, 900, 640);
    const [cx, cy] = worldToScreen(view, 0, 0);
    expect(cx).toBeCloseTo(450, 6);
    expect(cy).toBeCloseTo(320, 6);
    const [, top] = worldToScreen(view, 0, 3);
    const [, bottom] = worldToScreen(view, 0, -3);
    expect(top).toBeLessThan(bottom);
    const [left] = worldToScreen(view, -5, 0);
    const [right] = worldToScreen(view, 5, 0);
    expect(left).toBeGreaterThanOrEqual(0);
    expect(right).toBeLessThanOrEqual(900);
  });
});
