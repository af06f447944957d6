import { describe, expect, it } from "vitest";
import {
  AxisSampler, KeyTracker, applyDeadZone, sampleKeyScript,
} from "../src/input.js";

describe("key mapping", () => {
  it("maps W/S, A/D, Q/E to the three axes", () => {
    const k = new KeyTracker();
    k.down("KeyW");
    expect(k.axes()).toEqual([1, 0, 0]);
    k.up("KeyW");
    k.down("KeyS");
    expect(k.axes()).toEqual([-1, 0, 0]);
    k.clear();
    k.down("KeyA");
    expect(k.axes()).toEqual([0, 1, 0]);
    k.clear();
    k.down("KeyD");
    expect(k.axes()).toEqual([0, -1, 0]);
    k.clear();
    k.down("KeyQ");
    expect(k.axes()).toEqual([0, 0, 1]);
    k.clear();
    k.down("KeyE");
    expect(k.axes()).toEqual([0, 0, -1]);
  });

  it("opposing keys cancel", () => {
    const k = new KeyTracker();
    k.down("KeyW");
    k.down("KeyS");
    expect(k.axes()).toEqual([0, 0, 0]);
  });

  it("ignores unmapped keys", () => {
    const k = new KeyTracker();
    k.down("KeyZ");
    k.down("Space");
    expect(k.axes()).toEqual([0, 0, 0]);
  });
});

describe("dead zone", () => {
  it("zeroes below 0.05 and passes through above", () => {
    expect(applyDeadZone(0.04)).toBe(0);
    expect(applyDeadZone(-0.049)).toBe(0);
    expect(applyDeadZone(0.05)).toBe(0.05);
    expect(applyDeadZone(0.5)).toBe(0.5);
    expect(applyDeadZone(-0.5)).toBe(-0.5);
  });

  it("clamps to [-1, 1]", () => {
    expect(applyDeadZone(1.7)).toBe(1);
    expect(applyDeadZone(-2)).toBe(-1);
    expect(applyDeadZone(Number.NaN)).toBe(0);
  });
});

describe("axis sampler", () => {
  it("streams a held axis every sample", () => {
    const s = new AxisSampler();
    const a = s.sample([1, 0, 0], 0.0);
    const b = s.sample([1, 0, 0], 0.05);
    expect(a).toEqual([{ stamp: 0.0, axis: 0, value: 1 }]);
    expect(b).toEqual([{ stamp: 0.05, axis: 0, value: 1 }]);
  });

  it("emits one final zero per touched axis", () => {
    const s = new AxisSampler();
    s.sample([1, 0, -1], 0.0);
    const zeroing = s.sample([0, 0, 0], 0.05);
    expect(zeroing).toEqual([
      { stamp: 0.05, axis: 0, value: 0 },
      { stamp: 0.05, axis: 2, value: 0 },
    ]);
    expect(s.sample([0, 0, 0], 0.1)).toEqual([]);
  });
});

describe("scripted key trace", () => {
  it("hold W yields a stream of (0, 1.0)", () => {
    const events = sampleKeyScript(
      [{ t: 0, type: "down", code: "KeyW" }], 0.2);
    expect(events).toEqual([
      { stamp: 0.0, axis: 0, value: 1 },
      { stamp: 0.05, axis: 0, value: 1 },
      { stamp: 0.1, axis: 0, value: 1 },
      { stamp: 0.15, axis: 0, value: 1 },
      { stamp: 0.2, axis: 0, value: 1 },
    ]);
  });

  it("release ends with a single zero", () => {
    const events = sampleKeyScript(
      [{ t: 0, type: "down", code: "KeyW" },
       { t: 0.1, type: "up", code: "KeyW" }], 0.3);
    expect(events).toEqual([
      { stamp: 0.0, axis: 0, value: 1 },
      { stamp: 0.05, axis: 0, value: 1 },
      { stamp: 0.1, axis: 0, value: 0 },
    ]);
  });

  it("is deterministic for the same grid", () => {
    const script = [
      { t: 0, type: "down" as const, code: "KeyE" },
      { t: 0.3, type: "up" as const, code: "KeyE" },
      { t: 0.3, type: "down" as const, code: "KeyW" },
      { t: 1.0, type: "up" as const, code: "KeyW" },
    ];
    expect(sampleKeyScript(script, 1.5))
      .toEqual(sampleKeyScript([...script].reverse(), 1.5));
  });

  it("stamps stay on clean grid values", () => {
    const events = sampleKeyScript(
      [{ t: 0, type: "down", code: "KeyW" }], 0.35);
    for (const ev of events) {
      expect(Math.round(ev.stamp / 0.05) * 0.05).toBeCloseTo(ev.stamp, 12);
      expect(String(ev.stamp).length).toBeLessThan(5);
    }
  });
});
