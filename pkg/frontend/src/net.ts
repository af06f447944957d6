/** Gateway connection: decodes envelopes into the cache, stamps and
 * sequences outgoing frames. Takes the WebSocket constructor as a
 * parameter so tests can inject the node implementation. */

import { TopicCache } from "./cache.js";
import { decodeEnvelope, encodeEnvelope } from "./protocol.js";
import type { Envelope } from "./protocol.js";

interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, cb: (ev: any) => void): void;
}

type SocketCtor = new (url: string) => SocketLike;

export class GatewayClient {
  readonly cache = new TopicCache();
  private ws: SocketLike | null = null;
  private seq: Record<string, number> = {};
  private listeners: ((env: Envelope) => void)[] = [];
  private openListeners: (() => void)[] = [];
  /** Simulation time from the freshest envelope; outgoing joystick events
   * are stamped with it so the tick loop folds them in order. */
  simTime = 0;

  constructor(private now: () => number = () => Date.now()) {}

  connect(url: string, ctor: SocketCtor): void {
    const ws = new ctor(url);
    ws.addEventListener("open", () => {
      for (const cb of this.openListeners) cb();
    });
    ws.addEventListener("message", (ev: { data: unknown }) => {
      let env: Envelope;
      try {
        env = decodeEnvelope(String(ev.data));
      } catch {
        return; // not an envelope; ignore rather than tear down the view
      }
      this.cache.put(env, this.now());
      if (env.topic === "robot") this.simTime = env.stamp;
      for (const cb of this.listeners) cb(env);
    });
    this.ws = ws;
  }

  onOpen(cb: () => void): void {
    this.openListeners.push(cb);
  }

  onEnvelope(cb: (env: Envelope) => void): void {
    this.listeners.push(cb);
  }

  send(topic: string, payload: unknown, stamp: number): void {
    if (!this.ws) throw new Error("not connected");
    const seq = this.seq[topic] ?? 0;
    this.seq[topic] = seq + 1;
    this.ws.send(encodeEnvelope({ topic, seq, stamp, payload }));
  }

  close(): void {
    this.ws?.close();
    this.ws = null;
  }
}
