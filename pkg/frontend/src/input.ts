/** Keyboard and gamepad state to joystick events, sampled at 20 Hz.
 *
 * Axis mapping: W/S drive axis 0 (advance) to +1/-1, A/D drive axis 1
 * (lateral) to +1/-1, Q/E drive axis 2 (rotation) to +1/-1. While an axis
 * is nonzero every sample emits it; on return to zero one final (axis, 0)
 * is emitted so the robot does not coast on a stale latch.
 */

export const SAMPLE_HZ = 20;
export const SAMPLE_DT = 1 / SAMPLE_HZ;
export const DEAD_ZONE = 0.05;

export interface JoyEvent { stamp: number; axis: number; value: number; }

const KEY_AXIS: Record<string, [0 | 1 | 2, 1 | -1]> = {
  KeyW: [0, 1], KeyS: [0, -1],
  KeyA: [1, 1], KeyD: [1, -1],
  KeyQ: [2, 1], KeyE: [2, -1],
};

export function applyDeadZone(v: number): number {
  if (!Number.isFinite(v)) return 0;
  const c = Math.max(-1, Math.min(1, v));
  return Math.abs(c) < DEAD_ZONE ? 0 : c;
}

export class KeyTracker {
  private held = new Set<string>();

  down(code: string): void {
    if (code in KEY_AXIS) this.held.add(code);
  }

  up(code: string): void {
    this.held.delete(code);
  }

  clear(): void {
    this.held.clear();
  }

  /** Opposing keys cancel out. */
  axes(): [number, number, number] {
    const out: [number, number, number] = [0, 0, 0];
    for (const code of this.held) {
      const [axis, sign] = KEY_AXIS[code]!;
      out[axis] += sign;
    }
    return out.map((v) => Math.max(-1, Math.min(1, v))) as
      [number, number, number];
  }
}

/** Emits per-sample events for the current axis values, with the zeroing
 * contract. Stamps are supplied by the caller (simulation time). */
export class AxisSampler {
  private last: [number, number, number] = [0, 0, 0];

  sample(axes: [number, number, number], stamp: number): JoyEvent[] {
    const events: JoyEvent[] = [];
    for (let axis = 0; axis < 3; axis++) {
      const value = axes[axis]!;
      if (value !== 0 || this.last[axis] !== 0) {
        events.push({ stamp, axis, value });
      }
    }
    this.last = [...axes] as [number, number, number];
    return events;
  }
}

export interface KeyScriptEntry { t: number; type: "down" | "up"; code: string; }

/** Replay a timed key script on the 20 Hz grid. Events at time t apply to
 * every sample with stamp >= t. Pure: same script, same stream. */
export function sampleKeyScript(script: KeyScriptEntry[],
                                duration: number): JoyEvent[] {
  const sorted = [...script].sort((a, b) => a.t - b.t);
  const tracker = new KeyTracker();
  const sampler = new AxisSampler();
  const out: JoyEvent[] = [];
  let next = 0;
  const samples = Math.round(duration / SAMPLE_DT);
  for (let k = 0; k <= samples; k++) {
    const stamp = roundStamp(k * SAMPLE_DT);
    while (next < sorted.length && sorted[next]!.t <= stamp + 1e-9) {
      const entry = sorted[next]!;
      if (entry.type === "down") tracker.down(entry.code);
      else tracker.up(entry.code);
      next++;
    }
    out.push(...sampler.sample(tracker.axes(), stamp));
  }
  return out;
}

/** Keep stamps exact on the grid (0.05 steps come out as clean decimals). */
export function roundStamp(t: number): number {
  return Math.round(t * 1e6) / 1e6;
}
