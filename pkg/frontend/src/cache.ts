/** Latest-value cache per topic; render reads this, never the socket. */

import type { Envelope } from "./protocol.js";

export const STALE_MS = 1000;

export class TopicCache {
  private latest = new Map<string, Envelope>();
  private lastSeen = 0;

  put(env: Envelope, nowMs: number): void {
    this.latest.set(env.topic, env);
    this.lastSeen = nowMs;
  }

  get(topic: string): Envelope | undefined {
    return this.latest.get(topic);
  }

  payload<T>(topic: string): T | undefined {
    return this.latest.get(topic)?.payload as T | undefined;
  }

  /** No traffic for over a second means the view is not live. */
  stale(nowMs: number): boolean {
    return this.lastSeen === 0 || nowMs - this.lastSeen > STALE_MS;
  }

  clear(): void {
    this.latest.clear();
    this.lastSeen = 0;
  }
}
