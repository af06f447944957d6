/** Episode lifecycle gating driven by the episode topic. */

import type { ControlPayload, EpisodePayload } from "./protocol.js";

export class Lifecycle {
  state: EpisodePayload["state"] = "running";
  frameId = 0;
  detail = "";

  observe(payload: EpisodePayload): void {
    if (payload.state === "error") {
      this.detail = payload.detail ?? "error";
      return; // errors do not change the phase
    }
    this.state = payload.state;
    this.frameId = payload.frame_id;
    this.detail = payload.detail ?? "";
  }

  get canSave(): boolean {
    return this.state === "reached";
  }

  get canDiscard(): boolean {
    return this.state === "reached";
  }

  regenerate(seed?: number): ControlPayload {
    return seed === undefined
      ? { action: "regenerate" }
      : { action: "regenerate", seed };
  }

  /** Null while gated; a disabled button sends nothing. */
  save(userId?: string): ControlPayload | null {
    if (!this.canSave) return null;
    return userId === undefined
      ? { action: "save" }
      : { action: "save", user_id: userId };
  }

  discard(): ControlPayload | null {
    return this.canDiscard ? { action: "discard" } : null;
  }
}
