"""Headless episode recording from scripted traces.

A trace is a list of (stamp, axis_id, value) joystick events. drive() feeds a
trace through the same bus/fold path live teleoperation uses (all events
published upfront; the stamp decides the tick each one lands in), so a trace
plus a seed fully determines an episode.

plan_goal_trace() synthesizes a goal-reaching trace: breadth-first search over
the same robot-valid grid the generator's reachability check uses yields
axis-aligned waypoints, then a controller is driven closed-loop toward them,
emitting a joystick event whenever the command changes. The emitted trace
replayed from scratch reproduces the planning run exactly (same seed, same
fold rule), which is what makes the synthetic corpus honest: episodes are
recorded via the ordinary pipeline, never constructed by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import config
from .behavior import step_humans
from .bus import TopicBus
from .canon import dump_bytes, q
from .controller import EpisodeController
from .recorder import Episode, EpisodeStep, mirror_episode, snapshot_to_doc
from .scenegen import GenerationRanges, generate_scene
from .world import Command, Room, WorldSnapshot, center_valid, step_robot

MAX_TICKS = 20000


class DriveError(RuntimeError):
    pass


@dataclass(slots=True)
class JoyEvent:
    stamp: float
    axis_id: int
    value: float


def trace_to_lists(trace: list[JoyEvent]) -> list[list]:
    return [[q(e.stamp), e.axis_id, q(float(e.value))] for e in trace]


def trace_from_lists(rows: list) -> list[JoyEvent]:
    out = []
    for r in rows:
        if not isinstance(r, (list, tuple)) or len(r) != 3:
            raise DriveError(f"trace row must be [stamp, axis_id, value]: {r!r}")
        out.append(JoyEvent(float(r[0]), int(r[1]), float(r[2])))
    return out


def publish_trace(bus: TopicBus, trace: list[JoyEvent]) -> None:
    last = -1.0
    for e in sorted(trace, key=lambda e: e.stamp):
        if e.stamp < last:
            raise DriveError("trace stamps must be non-decreasing")
        last = e.stamp
        bus.publish("joystick", {"axis_id": e.axis_id, "value": e.value}, e.stamp)


def drive(ranges: GenerationRanges, seed: int, trace: list[JoyEvent],
          dt: float = config.DT, user_id: str = "anon",
          data_dir: str | None = None, save: bool = True,
          max_ticks: int = MAX_TICKS):
    """Run a scripted episode to the goal. Returns (controller, path or None)."""
    ctl = EpisodeController(TopicBus(), ranges, dt=dt, data_dir=data_dir,
                            default_user=user_id)
    ctl.regenerate(seed)
    publish_trace(ctl.bus, trace)
    for _ in range(max_ticks):
        ctl.tick()
        if ctl.phase == "reached":
            break
    else:
        raise DriveError(f"goal not reached within {max_ticks} ticks")
    path = ctl.finish("save", user_id) if save else None
    return ctl, path


# ---------------------------------------------------------------------------
# replay

def resimulate(ep: Episode) -> Episode:
    """Re-run an episode from its metadata: regenerate the scene from the seed
    and step the recorded labels through the simulator. The result must match
    the file byte-for-byte in canonical form (mirrored episodes are compared
    against the mirror of the re-simulation)."""
    ranges = GenerationRanges.from_dict(ep.ranges)
    scene = generate_scene(ranges, ep.seed)
    caps = (float(ep.caps["advance"]), float(ep.caps["lateral"]),
            float(ep.caps["rotation"]))
    labels = [st.label for st in ep.steps]
    if ep.mirrored:
        labels = [(a, -l, -r) for a, l, r in labels]
    snap = scene.snapshot
    steps: list[EpisodeStep] = []
    for k, label in enumerate(labels):
        cmd = Command(label[0] * caps[0], label[1] * caps[1], label[2] * caps[2])
        robot = step_robot(snap.robot, cmd, ep.dt, scene.snapshot.room)
        humans = step_humans(snap.humans, scene.snapshot.room, robot,
                             scene.behavior, ep.dt, scene.rng)
        snap = WorldSnapshot(snap.frame_id + 1, (snap.frame_id + 1) * ep.dt,
                             robot, scene.snapshot.room, humans,
                             scene.snapshot.objects, scene.snapshot.walls,
                             scene.snapshot.goal, scene.snapshot.interactions)
        steps.append(EpisodeStep(snap, label))
    sim = Episode(user_id=ep.user_id, created_at=ep.created_at, seed=ep.seed,
                  ranges=ep.ranges, dt=ep.dt, caps=ep.caps, mirrored=False,
                  steps=steps, toolkit_version=ep.toolkit_version)
    return mirror_episode(sim) if ep.mirrored else sim


def replay_report(ep: Episode) -> dict:
    """Byte-compare an episode against its re-simulation."""
    sim = resimulate(ep)
    first = None
    for k, (a, b) in enumerate(zip(ep.steps, sim.steps)):
        da = dump_bytes({"snapshot": snapshot_to_doc(a.snapshot, ep.dt),
                         "label": [q(v) for v in a.label]})
        db = dump_bytes({"snapshot": snapshot_to_doc(b.snapshot, ep.dt),
                         "label": [q(v) for v in b.label]})
        if da != db:
            first = a.snapshot.frame_id
            break
    match = first is None and len(ep.steps) == len(sim.steps)
    return {"match": match, "steps": len(ep.steps),
            "first_divergence_frame": first}


# ---------------------------------------------------------------------------
# planning

def _grid_path(room: Room, start: tuple[float, float],
               goal: tuple[float, float]) -> list[tuple[float, float]]:
    """4-connected BFS over robot-valid cell centers; returns turning-point
    waypoints (axis-aligned legs), ending exactly on the goal."""
    res = config.REACH_GRID
    minx, miny, maxx, maxy = room.bbox()
    nx = max(1, int(math.ceil((maxx - minx) / res)))
    ny = max(1, int(math.ceil((maxy - miny) / res)))

    def center(c):
        return minx + (c[0] + 0.5) * res, miny + (c[1] + 0.5) * res

    valid = {}

    def ok(c):
        v = valid.get(c)
        if v is None:
            cx, cy = center(c)
            v = center_valid(room, cx, cy, config.ROBOT_RADIUS)
            valid[c] = v
        return v

    def attach(p):
        ci = int((p[0] - minx) / res)
        cj = int((p[1] - miny) / res)
        cands = []
        for i in range(max(0, ci - 2), min(nx, ci + 3)):
            for j in range(max(0, cj - 2), min(ny, cj + 3)):
                cx, cy = center((i, j))
                d = math.hypot(cx - p[0], cy - p[1])
                if d <= 1.5 * res and ok((i, j)):
                    cands.append((d, (i, j)))
        cands.sort()
        return [c for _, c in cands]

    starts = attach(start)
    goals = attach(goal)
    if not starts or not goals:
        raise DriveError("no valid grid cells near start/goal")
    goalset = set(goals)
    prev: dict = {c: None for c in starts}
    frontier = list(starts)
    hit = None
    if goalset & set(starts):
        hit = next(c for c in starts if c in goalset)
    while hit is None and frontier:
        nxt = []
        for c in frontier:
            for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                n = (c[0] + d[0], c[1] + d[1])
                if n in prev or not (0 <= n[0] < nx and 0 <= n[1] < ny) or not ok(n):
                    continue
                prev[n] = c
                if n in goalset:
                    hit = n
                    break
                nxt.append(n)
            if hit:
                break
        frontier = nxt
    if hit is None:
        raise DriveError("no grid path from robot to goal")
    cells = []
    c = hit
    while c is not None:
        cells.append(c)
        c = prev[c]
    cells.reverse()
    # keep turning points only
    pts = [center(c) for c in cells]
    way = []
    for i, p in enumerate(pts):
        if 0 < i < len(pts) - 1:
            a, b = pts[i - 1], pts[i + 1]
            if (abs(a[0] - b[0]) < 1e-12) or (abs(a[1] - b[1]) < 1e-12):
                continue  # collinear (axis-aligned runs)
        way.append(p)
    way.append(goal)
    return way


def plan_goal_trace(ranges: GenerationRanges, seed: int, dt: float = config.DT,
                    max_ticks: int = MAX_TICKS) -> list[JoyEvent]:
    """Drive a throwaway controller closed-loop to the goal, recording the
    joystick events it took. Replaying them via drive() reproduces the run."""
    ctl = EpisodeController(TopicBus(), ranges, dt=dt)
    snap = ctl.regenerate(seed)
    room = snap.room
    goal = (snap.goal.x, snap.goal.y)
    waypoints = _grid_path(room, (snap.robot.x, snap.robot.y), goal)

    trace: list[JoyEvent] = []
    last = [0.0, 0.0]

    def command(snapshot: WorldSnapshot) -> tuple[float, float]:
        rx, ry, th = snapshot.robot.x, snapshot.robot.y, snapshot.robot.theta
        while waypoints:
            dx, dy = waypoints[0][0] - rx, waypoints[0][1] - ry
            if len(waypoints) > 1 and math.hypot(dx, dy) < 0.12:
                waypoints.pop(0)
                continue
            break
        dx, dy = waypoints[0][0] - rx, waypoints[0][1] - ry
        dist = math.hypot(dx, dy)
        if dist < 1e-9:
            return 0.0, 0.0
        scale = min(1.0, dist / dt) / dist  # slow down on the last approach
        wx, wy = dx * scale, dy * scale
        c, s = math.cos(th), math.sin(th)
        return c * wx + s * wy, -s * wx + c * wy  # world -> robot frame

    for _ in range(max_ticks):
        adv, lat = command(ctl.snapshot)
        now = q(ctl.sim_time)
        for axis, v in ((0, adv), (1, lat)):
            nv = q(max(-1.0, min(1.0, v)))
            if nv != last[axis]:
                ctl.bus.publish("joystick", {"axis_id": axis, "value": nv}, now)
                trace.append(JoyEvent(now, axis, nv))
                last[axis] = nv
        ctl.tick()
        if ctl.phase == "reached":
            return trace
    raise DriveError(f"planner failed to reach the goal within {max_ticks} ticks "
                     f"(seed {seed})")
