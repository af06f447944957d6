"""Episode lifecycle: regenerate -> run ticks -> reached -> save/discard.

The controller owns the simulation clock. Inputs arrive as joystick envelopes
on the bus; at the start of each tick every envelope stamped at or before the
current sim time is folded into the normalized command vector (per-axis, last
writer wins in seq order), later-stamped envelopes wait for their tick. This
makes live teleoperation, scripted traces published upfront and file replays
all hit the exact same code path.

Normalized values are clamped to [-1, 1] and canonically quantized when
applied, physical command = normalized * cap. The recorded label of a step is
the normalized vector that drove it, so labels reconstruct the commands
bit-exactly.

frame_id 0 is the freshly generated scene (published, not recorded); ticks
record frames 1..N. sim_time is frame_id * dt, multiplied out every tick.
"""

from __future__ import annotations

import os
import time
from typing import Any

from . import config
from .bus import Envelope, TopicBus
from .canon import q
from .recorder import Episode, EpisodeStep, write_episode
from .rng import SplitMix64
from .scenegen import GenerationRanges, Scene, generate_scene
from .behavior import step_humans
from .world import Command, WorldSnapshot, goal_reached, step_robot

AXES = {0: "advance", 1: "lateral", 2: "rotation"}
_CAPS = (config.ADV_MAX, config.LAT_MAX, config.ROT_MAX)


class ControllerError(RuntimeError):
    pass


class EpisodeController:
    def __init__(self, bus: TopicBus | None = None,
                 ranges: GenerationRanges | None = None,
                 dt: float = config.DT,
                 data_dir: str | None = None,
                 default_user: str = "anon",
                 session_seed: int | None = None,
                 clock=time.time):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.bus = bus if bus is not None else TopicBus()
        self.ranges = ranges if ranges is not None else GenerationRanges()
        self.dt = dt
        self.data_dir = data_dir
        self.default_user = default_user
        self.clock = clock
        if session_seed is None:
            session_seed = int.from_bytes(os.urandom(8), "little")
        self._session_rng = SplitMix64(session_seed)

        self.phase = "idle"  # idle | running | reached | saved | discarded
        self.scene: Scene | None = None
        self.frame_id = 0
        self.warnings = 0          # unknown-axis inputs, counted and ignored
        self._normalized = [0.0, 0.0, 0.0]
        self._steps: list[EpisodeStep] = []
        self._pending: list[Envelope] = []
        self._joy_cursor = 0
        self._static_payloads: dict[str, Any] = {}
        self._human_entry_cache: dict[int, tuple] = {}

    # -- time ---------------------------------------------------------------

    @property
    def sim_time(self) -> float:
        return self.frame_id * self.dt

    @property
    def snapshot(self) -> WorldSnapshot | None:
        if self._steps:
            return self._steps[-1].snapshot
        return self.scene.snapshot if self.scene else None

    @property
    def steps(self) -> list[EpisodeStep]:
        return self._steps

    # -- lifecycle ------------------------------------------------------------

    def regenerate(self, seed: int | None = None,
                   ranges: GenerationRanges | dict | None = None) -> WorldSnapshot:
        """Build a fresh scene and enter running. Allowed in any phase."""
        if ranges is not None:
            if isinstance(ranges, dict):
                ranges = GenerationRanges.from_dict(ranges)
            self.ranges = ranges
        if seed is None:
            seed = self._session_rng.next_u64()
        scene = generate_scene(self.ranges, seed)  # may raise, phase kept
        self.scene = scene
        self.frame_id = 0
        self._normalized = [0.0, 0.0, 0.0]
        self._steps = []
        self._pending = []
        self.phase = "running"
        self.bus.reset_stamps()
        # inputs stamped for the previous episode must not leak into this one
        self._joy_cursor = self.bus.length("joystick")
        self._publish_scene(scene.snapshot)
        self._publish_episode("running")
        return scene.snapshot

    def tick(self) -> WorldSnapshot:
        """Advance one step: fold inputs, move robot, move humans, publish,
        record. Flips to reached when the robot gets within R_GOAL."""
        if self.phase != "running":
            raise ControllerError(f"tick in phase {self.phase!r}")
        scene = self.scene
        self._fold_inputs()
        n = self._normalized
        cmd = Command(n[0] * _CAPS[0], n[1] * _CAPS[1], n[2] * _CAPS[2])
        prev = self.snapshot
        robot = step_robot(prev.robot, cmd, self.dt, scene.snapshot.room)
        humans = step_humans(prev.humans, scene.snapshot.room, robot,
                             scene.behavior, self.dt, scene.rng)
        self.frame_id += 1
        snap = WorldSnapshot(self.frame_id, self.frame_id * self.dt, robot,
                             scene.snapshot.room, humans, scene.snapshot.objects,
                             scene.snapshot.walls, scene.snapshot.goal,
                             scene.snapshot.interactions)
        self._publish_dynamic(snap)
        self._steps.append(EpisodeStep(snap, (n[0], n[1], n[2])))
        if goal_reached(robot, snap.goal):
            self.phase = "reached"
            self._publish_episode("reached")
        return snap

    def finish(self, action: str, user_id: str | None = None):
        """save -> episode file path; discard -> None. Only legal once reached."""
        if action not in ("save", "discard"):
            raise ControllerError(f"unknown finish action {action!r}")
        if self.phase != "reached":
            raise ControllerError(f"{action} in phase {self.phase!r} "
                                  "(episode must have reached the goal)")
        if action == "discard":
            self.phase = "discarded"
            self._publish_episode("discarded")
            return None
        ep = self.episode(user_id)
        path = write_episode(ep, self.data_dir, self.clock)
        self.phase = "saved"
        self._publish_episode("saved")
        return path

    def episode(self, user_id: str | None = None) -> Episode:
        """The current step buffer as an Episode (not yet validated/saved)."""
        scene = self.scene
        return Episode(
            user_id=user_id or self.default_user,
            created_at=int(self.clock()),
            seed=scene.seed,
            ranges=scene.ranges.to_dict(),
            dt=self.dt,
            caps={"advance": _CAPS[0], "lateral": _CAPS[1], "rotation": _CAPS[2]},
            mirrored=False,
            steps=list(self._steps))

    def handle_control(self, payload: dict) -> None:
        """Dispatch a control envelope; failures become error events on the
        episode topic instead of tearing the session down."""
        action = payload.get("action", "?")
        try:
            if action == "regenerate":
                self.regenerate(payload.get("seed"), payload.get("ranges"))
            else:
                self.finish(action, payload.get("user_id"))
        except Exception as e:  # noqa: BLE001 - reported to clients
            self._publish_episode("error", detail=f"{action}: {e}")

    # -- inputs ---------------------------------------------------------------

    def apply_input(self, axis_id: int, value: float) -> None:
        """Clamp, quantize and latch one axis. Unknown axes count a warning."""
        if axis_id not in AXES:
            self.warnings += 1
            return
        v = float(value)
        if v > 1.0:
            v = 1.0
        elif v < -1.0:
            v = -1.0
        self._normalized[axis_id] = q(v)

    def _fold_inputs(self) -> None:
        now = self.sim_time + 1e-9  # folding tolerance: stamps are quantized
        fresh = self.bus.poll("joystick", self._joy_cursor)
        if fresh:
            self._joy_cursor += len(fresh)
            self._pending.extend(fresh)
        if not self._pending:
            return
        keep = []
        for env in self._pending:
            if env.stamp <= now:
                self.apply_input(env.payload["axis_id"], env.payload["value"])
            else:
                keep.append(env)
        self._pending = keep

    # -- publishing -----------------------------------------------------------

    def _publish_episode(self, state: str, detail: str | None = None) -> None:
        payload = {"state": state, "frame_id": self.frame_id}
        if detail is not None:
            payload["detail"] = detail
        self.bus.publish("episode", payload, q(self.sim_time), trusted=True)

    def _publish_scene(self, snap: WorldSnapshot) -> None:
        stamp = q(snap.sim_time)
        self._human_entry_cache = {}
        self._static_payloads = {
            "walls": [{"wall_id": w.wall_id, "x1": q(w.x1), "y1": q(w.y1),
                       "x2": q(w.x2), "y2": q(w.y2)} for w in snap.walls],
            "objects": [{"id": o.id, "x": q(o.pose.x), "y": q(o.pose.y),
                         "angle": q(o.pose.theta), "sideX": q(o.side_x),
                         "sideY": q(o.side_y)} for o in snap.objects],
            "goal": {"identifier": snap.goal.identifier, "x": q(snap.goal.x),
                     "y": q(snap.goal.y)},
            "interactions": [{"entity1_id": i.entity1_id,
                              "entity2_id": i.entity2_id,
                              "interaction_type": i.interaction_type}
                             for i in snap.interactions],
        }
        for topic, payload in self._static_payloads.items():
            self.bus.publish(topic, payload, stamp, trusted=True)
        self._publish_dynamic(snap)

    def _publish_dynamic(self, snap: WorldSnapshot) -> None:
        stamp = q(snap.sim_time)
        entries = []
        cache = self._human_entry_cache
        for h in snap.humans:
            hit = cache.get(h.id)
            if hit is not None and hit[0] is h:
                entries.append(hit[1])  # statics keep their instance, skip requantizing
                continue
            entry = {"id": h.id, "x": q(h.pose.x), "y": q(h.pose.y),
                     "angle": q(h.pose.theta),
                     "ix": q(h.velocity.vx * self.dt),
                     "iy": q(h.velocity.vy * self.dt),
                     "iangle": q(h.velocity.vtheta * self.dt)}
            cache[h.id] = (h, entry)
            entries.append(entry)
        self.bus.publish("humans", entries, stamp, trusted=True)
        self.bus.publish("robot", {"x": q(snap.robot.x), "y": q(snap.robot.y),
                                   "angle": q(snap.robot.theta)},
                         stamp, trusted=True)
