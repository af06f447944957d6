/** Browser wiring: socket, keyboard, buttons, canvas paint loop. */

import { GatewayClient } from "./net.js";
import { AxisSampler, KeyTracker, SAMPLE_DT, applyDeadZone,
         roundStamp } from "./input.js";
import { Lifecycle } from "./lifecycle.js";
import { fitViewport, scenePrimitives, worldToScreen } from "./render.js";
import type { ScenePrimitives, Viewport } from "./render.js";
import { frameIdFromStamp } from "./protocol.js";
import type { EpisodePayload } from "./protocol.js";

const DT = 0.1;

function required<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

export function start(url: string): void {
  const canvas = required<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d")!;
  const status = required<HTMLElement>("status");
  const btnRegen = required<HTMLButtonElement>("regenerate");
  const btnSave = required<HTMLButtonElement>("save");
  const btnDiscard = required<HTMLButtonElement>("discard");

  const client = new GatewayClient();
  const lifecycle = new Lifecycle();
  const keys = new KeyTracker();
  const sampler = new AxisSampler();

  client.onEnvelope((env) => {
    if (env.topic === "episode") {
      lifecycle.observe(env.payload as EpisodePayload);
    }
  });
  client.connect(url, WebSocket as any);

  window.addEventListener("keydown", (e) => {
    if (!e.repeat) keys.down(e.code);
  });
  window.addEventListener("keyup", (e) => keys.up(e.code));
  window.addEventListener("blur", () => keys.clear());

  btnRegen.addEventListener("click", () => {
    keys.clear();
    client.send("control", lifecycle.regenerate(), client.simTime);
  });
  btnSave.addEventListener("click", () => {
    const payload = lifecycle.save();
    if (payload) client.send("control", payload, client.simTime);
  });
  btnDiscard.addEventListener("click", () => {
    const payload = lifecycle.discard();
    if (payload) client.send("control", payload, client.simTime);
  });

  // sticks map proportionally; pushing up or left is positive world-wise
  function gamepadAxes(): [number, number, number] {
    const pad = (navigator.getGamepads?.() ?? [])
      .find((p) => p && p.connected);
    if (!pad) return [0, 0, 0];
    return [applyDeadZone(-(pad.axes[1] ?? 0)),
            applyDeadZone(-(pad.axes[0] ?? 0)),
            applyDeadZone(-(pad.axes[2] ?? 0))];
  }

  // joystick sampling on the 20 Hz grid, stamped with simulation time
  setInterval(() => {
    const stamp = roundStamp(client.simTime);
    const kb = keys.axes();
    const gp = gamepadAxes();
    const axes = kb.map((v, i) => (v !== 0 ? v : gp[i]!)) as
      [number, number, number];
    for (const ev of sampler.sample(axes, stamp)) {
      client.send("joystick", { axis_id: ev.axis, value: ev.value }, ev.stamp);
    }
  }, SAMPLE_DT * 1000);

  function paint(): void {
    const prims = scenePrimitives(client.cache, Date.now());
    const view = fitViewport(prims.walls, canvas.width, canvas.height);
    draw(ctx, canvas, prims, view);
    btnSave.disabled = !lifecycle.canSave;
    btnDiscard.disabled = !lifecycle.canDiscard;
    const robotStamp = client.cache.get("robot")?.stamp ?? 0;
    status.textContent =
      `${lifecycle.state}  frame ${frameIdFromStamp(robotStamp, DT)}` +
      (lifecycle.detail ? `  (${lifecycle.detail})` : "");
    requestAnimationFrame(paint);
  }
  requestAnimationFrame(paint);
}

function wedge(ctx: CanvasRenderingContext2D, view: Viewport, x: number,
               y: number, angle: number, radiusM: number, fill: string): void {
  const [sx, sy] = worldToScreen(view, x, y);
  const r = radiusM * view.scale;
  ctx.beginPath();
  ctx.arc(sx, sy, r, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  // screen y grows downward, world angles are counterclockwise
  ctx.lineTo(sx + 1.6 * r * Math.cos(angle), sy - 1.6 * r * Math.sin(angle));
  ctx.strokeStyle = "#222";
  ctx.lineWidth = 2;
  ctx.stroke();
}

function draw(ctx: CanvasRenderingContext2D, canvas: HTMLCanvasElement,
              prims: ScenePrimitives, view: Viewport): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  ctx.strokeStyle = "#333";
  ctx.lineWidth = 3;
  for (const w of prims.walls) {
    const [x1, y1] = worldToScreen(view, w.x1, w.y1);
    const [x2, y2] = worldToScreen(view, w.x2, w.y2);
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }

  ctx.save();
  ctx.setLineDash([6, 4]);
  ctx.strokeStyle = "#b5651d";
  ctx.lineWidth = 1.5;
  for (const line of prims.interactionLines) {
    const [x1, y1] = worldToScreen(view, line.x1, line.y1);
    const [x2, y2] = worldToScreen(view, line.x2, line.y2);
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }
  ctx.restore();

  for (const o of prims.objects) {
    const [sx, sy] = worldToScreen(view, o.x, o.y);
    ctx.save();
    ctx.translate(sx, sy);
    ctx.rotate(-o.angle);
    ctx.fillStyle = o.kind === "plant" ? "#6a9955"
      : o.kind === "laptop" ? "#6080b0" : "#a0845c";
    ctx.fillRect(-o.sideX / 2 * view.scale, -o.sideY / 2 * view.scale,
                 o.sideX * view.scale, o.sideY * view.scale);
    ctx.restore();
  }

  for (const h of prims.humans) {
    wedge(ctx, view, h.x, h.y, h.angle, 0.25,
          h.walker ? "#d9832b" : "#c9a227");
  }

  if (prims.goal) {
    const [gx, gy] = worldToScreen(view, prims.goal.x, prims.goal.y);
    ctx.strokeStyle = "#2a7a2a";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(gx, gy, 0.5 * view.scale, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(gx - 6, gy);
    ctx.lineTo(gx + 6, gy);
    ctx.moveTo(gx, gy - 6);
    ctx.lineTo(gx, gy + 6);
    ctx.stroke();
  }

  if (prims.robot) {
    wedge(ctx, view, prims.robot.x, prims.robot.y, prims.robot.angle,
          0.25, "#3a6ea5");
    if (prims.hudArrowAngle !== null) {
      const [rx, ry] = worldToScreen(view, prims.robot.x, prims.robot.y);
      const a = prims.hudArrowAngle;
      const r0 = 0.35 * view.scale;
      const r1 = 0.8 * view.scale;
      ctx.strokeStyle = "#2a7a2a";
      ctx.lineWidth = 2.5;
      ctx.beginPath();
      ctx.moveTo(rx + r0 * Math.cos(a), ry - r0 * Math.sin(a));
      ctx.lineTo(rx + r1 * Math.cos(a), ry - r1 * Math.sin(a));
      ctx.stroke();
      for (const side of [-1, 1]) {
        ctx.beginPath();
        ctx.moveTo(rx + r1 * Math.cos(a), ry - r1 * Math.sin(a));
        ctx.lineTo(rx + (r1 - 6) * Math.cos(a + side * 0.4),
                   ry - (r1 - 6) * Math.sin(a + side * 0.4));
        ctx.stroke();
      }
    }
  }

  if (prims.banner) {
    ctx.fillStyle = "rgba(160, 30, 30, 0.85)";
    ctx.fillRect(0, 0, canvas.width, 34);
    ctx.fillStyle = "#fff";
    ctx.font = "16px sans-serif";
    ctx.fillText("disconnected: no data for over a second", 12, 23);
  }
}
