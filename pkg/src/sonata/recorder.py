"""Episode persistence, mirroring and compliance metrics.

An episode file is one canonical-JSON document:

    {"metadata": {"user_id", "created_at", "seed", "ranges", "dt", "caps",
                  "toolkit_version", "mirrored"},
     "steps": [{"snapshot": {...}, "label": [advance, lateral, rotation]}, ...]}

Labels are the normalized commands in [-1, 1] that were active during the
step; label * caps reproduces the exact physical command, which is what makes
byte-exact replay possible. Snapshots carry the full world: robot, room
polygon, humans (with per-tick increments ix/iy/iangle = velocity * dt),
objects, walls, goal, interactions.

Files are named <user_id>_<unix_seconds>.json, with a _<n> suffix on
collision, written to a temp file in the target directory and renamed into
place so a crash never leaves a half-written episode behind.

Mirroring reflects the world across the robot-frame x axis (y -> -y) and is an
involution down to the serialized bytes.
"""

from __future__ import annotations

import math
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import config
from .canon import dump_bytes, loads, q
from .world import (Goal, Human, Interaction, Pose2D, Room, SceneObject,
                    Velocity2D, Wall, WorldSnapshot, angle_wrap,
                    point_segment_distance)

FILENAME_RE = re.compile(r"^[A-Za-z0-9]+_[0-9]+(_[0-9]+)?\.json$")
USER_ID_RE = re.compile(r"^[A-Za-z0-9]+$")

TOOLKIT_VERSION = "0.1.0"


class EpisodeError(ValueError):
    """Invalid episode content (refused writes, failed validations)."""


class EpisodeParseError(EpisodeError):
    """File is not valid JSON; message carries file and position."""


@dataclass(slots=True)
class EpisodeStep:
    snapshot: WorldSnapshot
    label: tuple[float, float, float]  # normalized (advance, lateral, rotation)


@dataclass(slots=True)
class Episode:
    user_id: str
    created_at: int          # unix seconds
    seed: int
    ranges: dict             # entity -> [min, max]
    dt: float
    caps: dict               # {"advance": .., "lateral": .., "rotation": ..}
    mirrored: bool
    steps: list[EpisodeStep] = field(default_factory=list)
    toolkit_version: str = TOOLKIT_VERSION


def data_dir(override: str | None = None) -> Path:
    """Episode directory: explicit argument, else $SONATA_DATA_DIR, else ./data."""
    if override:
        return Path(override)
    env = os.environ.get("SONATA_DATA_DIR")
    return Path(env) if env else Path("data")


# ---------------------------------------------------------------------------
# serialization (builders emit keys in schema order; values quantized here)

def snapshot_to_doc(s: WorldSnapshot, dt: float = config.DT) -> dict:
    return {
        "frame_id": s.frame_id,
        "sim_time": q(s.sim_time),
        "robot": {"x": q(s.robot.x), "y": q(s.robot.y), "angle": q(s.robot.theta)},
        "room": {"shape": s.room.shape,
                 "polygon": [[q(x), q(y)] for x, y in s.room.polygon]},
        "humans": [
            {"id": h.id, "x": q(h.pose.x), "y": q(h.pose.y),
             "angle": q(h.pose.theta),
             "ix": q(h.velocity.vx * dt), "iy": q(h.velocity.vy * dt),
             "iangle": q(h.velocity.vtheta * dt),
             "mobility": h.mobility, "group_id": h.group_id}
            for h in s.humans],
        "objects": [
            {"id": o.id, "x": q(o.pose.x), "y": q(o.pose.y),
             "angle": q(o.pose.theta), "sideX": q(o.side_x), "sideY": q(o.side_y),
             "kind": o.kind}
            for o in s.objects],
        "walls": [
            {"wall_id": w.wall_id, "x1": q(w.x1), "y1": q(w.y1),
             "x2": q(w.x2), "y2": q(w.y2)}
            for w in s.walls],
        "goal": {"identifier": s.goal.identifier, "x": q(s.goal.x), "y": q(s.goal.y)},
        "interactions": [
            {"entity1_id": i.entity1_id, "entity2_id": i.entity2_id,
             "interaction_type": i.interaction_type}
            for i in s.interactions],
    }


def episode_to_doc(ep: Episode) -> dict:
    return {
        "metadata": {
            "user_id": ep.user_id,
            "created_at": ep.created_at,
            "seed": ep.seed,
            "ranges": {k: [int(v[0]), int(v[1])] for k, v in ep.ranges.items()},
            "dt": q(ep.dt),
            "caps": {k: q(float(v)) for k, v in ep.caps.items()},
            "toolkit_version": ep.toolkit_version,
            "mirrored": ep.mirrored,
        },
        "steps": [{"snapshot": snapshot_to_doc(st.snapshot, ep.dt),
                   "label": [q(st.label[0]), q(st.label[1]), q(st.label[2])]}
                  for st in ep.steps],
    }


def _num(doc, key, where, kinds=(int, float)):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, kinds):
        raise EpisodeError(f"{where}.{key}: expected number, got {v!r}")
    return v


def doc_to_snapshot(doc: dict, dt: float, where: str) -> WorldSnapshot:
    try:
        robot = Pose2D(float(doc["robot"]["x"]), float(doc["robot"]["y"]),
                       float(doc["robot"]["angle"]))
        room = Room(doc["room"]["shape"],
                    [(float(x), float(y)) for x, y in doc["room"]["polygon"]])
        humans = [Human(h["id"],
                        Pose2D(float(h["x"]), float(h["y"]), float(h["angle"])),
                        Velocity2D(float(h["ix"]) / dt, float(h["iy"]) / dt,
                                   float(h["iangle"]) / dt),
                        h["mobility"], h["group_id"])
                  for h in doc["humans"]]
        objects = [SceneObject(o["id"],
                               o["kind"],
                               Pose2D(float(o["x"]), float(o["y"]), float(o["angle"])),
                               float(o["sideX"]), float(o["sideY"]))
                   for o in doc["objects"]]
        walls = [Wall(w["wall_id"], float(w["x1"]), float(w["y1"]),
                      float(w["x2"]), float(w["y2"]))
                 for w in doc["walls"]]
        goal = Goal(doc["goal"]["identifier"], float(doc["goal"]["x"]),
                    float(doc["goal"]["y"]))
        inter = [Interaction(i["entity1_id"], i["entity2_id"], i["interaction_type"])
                 for i in doc["interactions"]]
        return WorldSnapshot(doc["frame_id"], float(doc["sim_time"]), robot, room,
                             humans, objects, walls, goal, inter)
    except (KeyError, TypeError, ValueError) as e:
        raise EpisodeError(f"{where}: malformed snapshot ({e!r})") from None


def doc_to_episode(doc: dict, where: str = "episode") -> Episode:
    if not isinstance(doc, dict) or "metadata" not in doc or "steps" not in doc:
        raise EpisodeError(f"{where}: missing metadata/steps")
    md = doc["metadata"]
    try:
        ep = Episode(
            user_id=md["user_id"], created_at=md["created_at"], seed=md["seed"],
            ranges=md["ranges"], dt=float(md["dt"]), caps=md["caps"],
            mirrored=md["mirrored"], toolkit_version=md["toolkit_version"])
    except (KeyError, TypeError) as e:
        raise EpisodeError(f"{where}: malformed metadata ({e!r})") from None
    if not isinstance(ep.dt, float) or not ep.dt > 0.0:
        raise EpisodeError(f"{where}: dt must be a positive number")
    steps = doc["steps"]
    if not isinstance(steps, list):
        raise EpisodeError(f"{where}: steps must be a list")
    for i, st in enumerate(steps):
        swhere = f"{where}.steps[{i}]"
        if not isinstance(st, dict) or "snapshot" not in st or "label" not in st:
            raise EpisodeError(f"{swhere}: missing snapshot/label")
        label = st["label"]
        if (not isinstance(label, list) or len(label) != 3
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       for v in label)):
            raise EpisodeError(f"{swhere}: label must be three numbers")
        snap = doc_to_snapshot(st["snapshot"], ep.dt, swhere)
        ep.steps.append(EpisodeStep(snap, (float(label[0]), float(label[1]),
                                           float(label[2]))))
    return ep


# ---------------------------------------------------------------------------
# validation

def _canon_segments(walls) -> set:
    segs = set()
    for w in walls:
        a = (q(w.x1), q(w.y1))
        b = (q(w.x2), q(w.y2))
        segs.add((a, b) if a <= b else (b, a))
    return segs


def validate_episode(ep: Episode) -> None:
    """Raise EpisodeError on any structural violation."""
    if not USER_ID_RE.match(ep.user_id or ""):
        raise EpisodeError(f"invalid user_id {ep.user_id!r} (alphanumeric only)")
    if not isinstance(ep.created_at, int) or ep.created_at < 0:
        raise EpisodeError("created_at must be a non-negative integer")
    if not isinstance(ep.seed, int):
        raise EpisodeError("seed must be an integer")
    if not ep.dt > 0.0:
        raise EpisodeError("dt must be positive")
    for k in ("advance", "lateral", "rotation"):
        if k not in ep.caps or not float(ep.caps[k]) > 0.0:
            raise EpisodeError(f"caps.{k} missing or not positive")
    if not ep.steps:
        raise EpisodeError("episode has no steps")

    first = ep.steps[0].snapshot.frame_id
    for i, st in enumerate(ep.steps):
        s = st.snapshot
        where = f"steps[{i}]"
        if s.frame_id != first + i:
            raise EpisodeError(f"{where}: frame_id {s.frame_id} breaks contiguity "
                               f"(expected {first + i})")
        if q(s.sim_time) != q(s.frame_id * ep.dt):
            raise EpisodeError(f"{where}: sim_time {s.sim_time} != frame_id*dt")
        for a, l, r in (st.label,):
            for name, v in (("advance", a), ("lateral", l), ("rotation", r)):
                if not math.isfinite(v) or abs(v) > 1.0 + 1e-9:
                    raise EpisodeError(f"{where}: label {name}={v} outside [-1, 1]")
        if not (-math.pi - 1e-9 < s.robot.theta <= math.pi + 1e-9):
            raise EpisodeError(f"{where}: robot angle {s.robot.theta} not wrapped")
        room = s.room
        if room.shape not in ("rectangle", "l_shape"):
            raise EpisodeError(f"{where}: unknown room shape {room.shape!r}")
        if len(room.polygon) != (4 if room.shape == "rectangle" else 6):
            raise EpisodeError(f"{where}: {room.shape} polygon has "
                               f"{len(room.polygon)} vertices")
        if room.area() <= 0.0:
            raise EpisodeError(f"{where}: room polygon is not counterclockwise")
        if _canon_segments(s.walls) != _canon_segments(room.walls()):
            raise EpisodeError(f"{where}: walls do not match the room polygon")
        ids = [h.id for h in s.humans] + [o.id for o in s.objects]
        if len(ids) != len(set(ids)):
            raise EpisodeError(f"{where}: duplicate entity ids")
        known = set(ids)
        for it in s.interactions:
            if it.entity1_id not in known or it.entity2_id not in known:
                raise EpisodeError(f"{where}: interaction references unknown entity")
            if it.interaction_type not in ("human_human_talking",
                                           "human_laptop_interaction",
                                           "human_human_walking"):
                raise EpisodeError(f"{where}: bad interaction_type "
                                   f"{it.interaction_type!r}")

    last = ep.steps[-1].snapshot
    d = math.hypot(last.robot.x - last.goal.x, last.robot.y - last.goal.y)
    # 1e-6 slack: stored coordinates are 9-significant-digit quantized while the
    # live goal check ran at full precision
    if d >= config.R_GOAL + 1e-6:
        raise EpisodeError(f"last step is {d:.3f} m from the goal "
                           f"(needs < {config.R_GOAL})")


# ---------------------------------------------------------------------------
# file io

def episode_path(dir_: Path, user_id: str, created_at: int) -> Path:
    """First free name for this user/timestamp."""
    base = dir_ / f"{user_id}_{created_at}.json"
    if not base.exists():
        return base
    n = 1
    while True:
        p = dir_ / f"{user_id}_{created_at}_{n}.json"
        if not p.exists():
            return p
        n += 1


def write_episode(ep: Episode, directory: str | Path | None = None,
                  clock=time.time) -> Path:
    validate_episode(ep)
    dir_ = data_dir(str(directory) if directory is not None else None)
    dir_.mkdir(parents=True, exist_ok=True)
    if ep.created_at == 0:
        ep.created_at = int(clock())
    path = episode_path(dir_, ep.user_id, ep.created_at)
    blob = dump_bytes(episode_to_doc(ep))
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(blob)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)
    return path


def load_episode(path: str | Path) -> Episode:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise EpisodeError(f"{path}: cannot read ({e})") from None
    try:
        doc = loads(text)
    except ValueError as e:
        lineno = getattr(e, "lineno", "?")
        colno = getattr(e, "colno", "?")
        raise EpisodeParseError(
            f"{path}: invalid JSON at line {lineno}, column {colno}") from None
    ep = doc_to_episode(doc, where=str(path))
    validate_episode(ep)
    return ep


# ---------------------------------------------------------------------------
# mirroring

def _mirror_snapshot(s: WorldSnapshot) -> WorldSnapshot:
    def flip(theta: float) -> float:
        return angle_wrap(-theta)

    room = Room(s.room.shape,
                list(reversed([(x, -y) for x, y in s.room.polygon])))
    return WorldSnapshot(
        frame_id=s.frame_id,
        sim_time=s.sim_time,
        robot=Pose2D(s.robot.x, -s.robot.y, flip(s.robot.theta)),
        room=room,
        humans=[Human(h.id, Pose2D(h.pose.x, -h.pose.y, flip(h.pose.theta)),
                      Velocity2D(h.velocity.vx, -h.velocity.vy, -h.velocity.vtheta),
                      h.mobility, h.group_id)
                for h in s.humans],
        objects=[SceneObject(o.id, o.kind,
                             Pose2D(o.pose.x, -o.pose.y, flip(o.pose.theta)),
                             o.side_x, o.side_y)
                 for o in s.objects],
        walls=[Wall(w.wall_id, w.x1, -w.y1, w.x2, -w.y2) for w in s.walls],
        goal=Goal(s.goal.identifier, s.goal.x, -s.goal.y),
        interactions=list(s.interactions),
    )


def mirror_episode(ep: Episode) -> Episode:
    """Reflect across y -> -y. Applying it twice returns the original episode,
    byte-for-byte in canonical form (negation and angle flip are exact)."""
    return Episode(
        user_id=ep.user_id, created_at=ep.created_at, seed=ep.seed,
        ranges=ep.ranges, dt=ep.dt, caps=ep.caps,
        mirrored=not ep.mirrored, toolkit_version=ep.toolkit_version,
        steps=[EpisodeStep(_mirror_snapshot(st.snapshot),
                           (st.label[0], -st.label[1], -st.label[2]))
               for st in ep.steps])


# ---------------------------------------------------------------------------
# compliance

def compliance_report(ep: Episode) -> dict:
    """Count socially non-compliant steps. Distances are center-to-center;
    robot speed is the commanded one (|label * caps| of the linear axes),
    which equals actual speed everywhere except mid-wall-slide."""
    personal = 0
    crossing = 0
    speeding = 0
    min_dist = math.inf
    adv_cap = float(ep.caps["advance"])
    lat_cap = float(ep.caps["lateral"])
    for st in ep.steps:
        s = st.snapshot
        rx, ry = s.robot.x, s.robot.y
        pos = {h.id: (h.pose.x, h.pose.y) for h in s.humans}
        for o in s.objects:
            pos[o.id] = (o.pose.x, o.pose.y)
        dists = [math.hypot(rx - h.pose.x, ry - h.pose.y) for h in s.humans]
        nearest = min(dists, default=math.inf)
        min_dist = min(min_dist, nearest)
        if nearest < config.PERSONAL_SPACE:
            personal += 1
        crossed = False
        for it in s.interactions:
            p1 = pos.get(it.entity1_id)
            p2 = pos.get(it.entity2_id)
            if p1 is None or p2 is None:
                continue
            if point_segment_distance(rx, ry, p1[0], p1[1], p2[0], p2[1]) \
                    < config.INTERACTION_SPACE:
                crossed = True
                break
        if crossed:
            crossing += 1
        speed = math.hypot(st.label[0] * adv_cap, st.label[1] * lat_cap)
        if speed > config.SPEED_LIMIT and nearest < config.SPEED_NEAR:
            speeding += 1
    return {
        "steps": len(ep.steps),
        "personal_space_violation_steps": personal,
        "interaction_crossing_steps": crossing,
        "speeding_near_human_steps": speeding,
        "min_human_distance": None if math.isinf(min_dist) else q(min_dist),
    }
