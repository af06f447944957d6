"""Randomized social scene generation.

Everything is drawn from one SplitMix64 stream in a fixed order (room, entity
counts, then placements), so a seed plus a GenerationRanges fully determines
the scene and the behavior stream that follows it.

Rooms are rectangles or L-shapes (a corner rectangle removed from the
top-right), axis aligned, centered on the origin, walls = polygon edges.

Placement is rejection sampling over the room's bounding box with a 0.3 m
surface gap between footprints and walls. Interacting entities are placed as a
unit; their sampled interaction distance wins over the generic gap (a laptop
user may sit closer to the laptop than 0.3 m of clearance). Footprints are
discs: humans/robot at their radius, rectangles at the circumscribed radius.

The goal is placed at least 2 m from the robot and must be reachable: a
flood fill over a 0.25 m grid of robot-valid cells has to connect the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from . import config
from .behavior import BehaviorState, GroupState, WalkerState, pick_waypoint
from .rng import SplitMix64
from .world import (Goal, Human, Interaction, Pose2D, Room, SceneObject,
                    Velocity2D, WorldSnapshot, angle_wrap, center_valid,
                    point_in_room, wall_clearance)

ENTITY_KEYS = ("humans_static", "humans_walking", "tables", "laptops", "plants",
               "human_human_talking", "human_laptop_interaction", "walking_groups")


class RangesError(ValueError):
    pass


class SceneGenerationError(RuntimeError):
    def __init__(self, entity: str, message: str):
        super().__init__(message)
        self.entity = entity


@dataclass(slots=True)
class GenerationRanges:
    """Inclusive [min, max] count ranges per entity kind."""

    humans_static: tuple[int, int] = (0, 3)
    humans_walking: tuple[int, int] = (1, 3)
    tables: tuple[int, int] = (0, 2)
    laptops: tuple[int, int] = (0, 2)
    plants: tuple[int, int] = (0, 2)
    human_human_talking: tuple[int, int] = (0, 1)
    human_laptop_interaction: tuple[int, int] = (0, 1)
    walking_groups: tuple[int, int] = (0, 1)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for f in fields(self):
            pair = getattr(self, f.name)
            if (not isinstance(pair, tuple) or len(pair) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)):
                raise RangesError(f"{f.name}: expected an integer [min, max] pair, got {pair!r}")
            lo, hi = pair
            if lo < 0 or hi < lo:
                raise RangesError(f"{f.name}: invalid range [{lo}, {hi}]")
        # cross-entity satisfiability: every draw order below must stay feasible
        if self.human_laptop_interaction[0] > self.laptops[1]:
            raise RangesError("human_laptop_interaction min exceeds laptops max")
        if 2 * self.human_human_talking[0] + self.human_laptop_interaction[0] > self.humans_static[1]:
            raise RangesError("interaction minima exceed humans_static max")
        if 2 * self.walking_groups[0] > self.humans_walking[1]:
            raise RangesError("walking_groups min exceeds humans_walking max")

    def to_dict(self) -> dict:
        return {f.name: [getattr(self, f.name)[0], getattr(self, f.name)[1]]
                for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationRanges":
        if not isinstance(d, dict):
            raise RangesError(f"ranges must be an object, got {type(d).__name__}")
        unknown = set(d) - set(ENTITY_KEYS)
        if unknown:
            raise RangesError(f"unknown ranges keys: {sorted(unknown)}")
        kw = {}
        for k, v in d.items():
            if not isinstance(v, (list, tuple)) or len(v) != 2:
                raise RangesError(f"{k}: expected [min, max], got {v!r}")
            kw[k] = (v[0], v[1])
        return cls(**kw)


@dataclass(slots=True)
class Scene:
    """A generated scene plus everything needed to advance it."""

    snapshot: WorldSnapshot     # frame 0
    behavior: BehaviorState
    rng: SplitMix64             # mid-stream generator; stepping continues it
    seed: int
    ranges: GenerationRanges


# ---------------------------------------------------------------------------
# room

def generate_room(rng: SplitMix64, shape: str = "random") -> Room:
    if shape == "random":
        shape = "rectangle" if rng.randint(0, 1) == 0 else "l_shape"
    if shape not in ("rectangle", "l_shape"):
        raise ValueError(f"unknown room shape: {shape!r}")
    w = rng.uniform(config.ROOM_SIDE_MIN, config.ROOM_SIDE_MAX)
    h = rng.uniform(config.ROOM_SIDE_MIN, config.ROOM_SIDE_MAX)
    hw, hh = w / 2.0, h / 2.0
    if shape == "rectangle":
        poly = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
    else:
        cw = w * rng.uniform(config.L_CUT_MIN, config.L_CUT_MAX)
        ch = h * rng.uniform(config.L_CUT_MIN, config.L_CUT_MAX)
        poly = [(-hw, -hh), (hw, -hh), (hw, hh - ch),
                (hw - cw, hh - ch), (hw - cw, hh), (-hw, hh)]
    return Room(shape, poly)


# ---------------------------------------------------------------------------
# placement

@dataclass(slots=True)
class _Spot:
    x: float
    y: float
    r: float


def sample_free_pose(room: Room, occupied: list, radius: float,
                     rng: SplitMix64, entity: str,
                     clearance: float = config.CLEARANCE) -> tuple[float, float]:
    """Rejection-sample a center with `clearance` of surface gap to walls and
    every occupied footprint. Two uniform draws per attempt."""
    minx, miny, maxx, maxy = room.bbox()
    for _ in range(config.PLACEMENT_ATTEMPTS):
        x = rng.uniform(minx, maxx)
        y = rng.uniform(miny, maxy)
        if not center_valid(room, x, y, radius + clearance):
            continue
        ok = True
        for s in occupied:
            if math.hypot(x - s.x, y - s.y) - s.r - radius < clearance:
                ok = False
                break
        if ok:
            return x, y
    raise SceneGenerationError(
        entity, f"could not place {entity} after {config.PLACEMENT_ATTEMPTS} attempts")


# ---------------------------------------------------------------------------
# reachability

def _grid_valid(room: Room, x: float, y: float) -> bool:
    return center_valid(room, x, y, config.ROBOT_RADIUS)

def reachable(room: Room, from_xy: tuple[float, float], to_xy: tuple[float, float],
              res: float = config.REACH_GRID) -> bool:
    """Flood fill over robot-valid grid cells; endpoints attach to any valid
    cell center within 1.5 cells."""
    minx, miny, maxx, maxy = room.bbox()
    nx = max(1, int(math.ceil((maxx - minx) / res)))
    ny = max(1, int(math.ceil((maxy - miny) / res)))

    def center(i: int, j: int) -> tuple[float, float]:
        return minx + (i + 0.5) * res, miny + (j + 0.5) * res

    def near_cells(p) -> set:
        px, py = p
        ci = int((px - minx) / res)
        cj = int((py - miny) / res)
        out = set()
        for i in range(max(0, ci - 2), min(nx, ci + 3)):
            for j in range(max(0, cj - 2), min(ny, cj + 3)):
                cx, cy = center(i, j)
                if math.hypot(cx - px, cy - py) <= 1.5 * res and _grid_valid(room, cx, cy):
                    out.add((i, j))
        return out

    starts = near_cells(from_xy)
    targets = near_cells(to_xy)
    if not starts or not targets:
        return False
    if starts & targets:
        return True
    seen = set(starts)
    frontier = list(starts)
    while frontier:
        i, j = frontier.pop()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, j + dj
            if not (0 <= ii < nx and 0 <= jj < ny) or (ii, jj) in seen:
                continue
            cx, cy = center(ii, jj)
            if not _grid_valid(room, cx, cy):
                continue
            if (ii, jj) in targets:
                return True
            seen.add((ii, jj))
            frontier.append((ii, jj))
    return False


# ---------------------------------------------------------------------------
# scene

def _draw_counts(r: GenerationRanges, rng: SplitMix64) -> dict:
    """Counts in a fixed order; dependent bounds keep every range non-empty
    (guaranteed by GenerationRanges.validate)."""
    n = {}
    n["tables"] = rng.randint(*r.tables)
    n["laptops"] = rng.randint(max(r.laptops[0], r.human_laptop_interaction[0]), r.laptops[1])
    n["plants"] = rng.randint(*r.plants)
    talk_hi = min(r.human_human_talking[1],
                  (r.humans_static[1] - r.human_laptop_interaction[0]) // 2)
    n["human_human_talking"] = rng.randint(r.human_human_talking[0], talk_hi)
    lap_hi = min(r.human_laptop_interaction[1], n["laptops"],
                 r.humans_static[1] - 2 * n["human_human_talking"])
    n["human_laptop_interaction"] = rng.randint(r.human_laptop_interaction[0], lap_hi)
    n["walking_groups"] = rng.randint(r.walking_groups[0],
                                      min(r.walking_groups[1], r.humans_walking[1] // 2))
    n["humans_static"] = rng.randint(
        max(r.humans_static[0],
            2 * n["human_human_talking"] + n["human_laptop_interaction"]),
        r.humans_static[1])
    n["humans_walking"] = rng.randint(max(r.humans_walking[0], 2 * n["walking_groups"]),
                                      r.humans_walking[1])
    return n


def generate_scene(ranges: GenerationRanges, seed: int,
                   shape: str = "random") -> Scene:
    ranges.validate()
    rng = SplitMix64(seed)
    room = generate_room(rng, shape)
    walls = room.walls()
    counts = _draw_counts(ranges, rng)

    occupied: list[_Spot] = []
    objects: list[SceneObject] = []
    humans: list[Human] = []
    interactions: list[Interaction] = []
    walkers: dict[int, WalkerState] = {}
    groups: dict[int, GroupState] = {}
    next_id = 1

    def place_object(kind: str, sx: float, sy: float) -> SceneObject:
        nonlocal next_id
        theta = angle_wrap(rng.uniform(-math.pi, math.pi))
        r = 0.5 * math.hypot(sx, sy)
        x, y = sample_free_pose(room, occupied, r, rng, kind + "s")
        obj = SceneObject(next_id, kind, Pose2D(x, y, theta), sx, sy)
        next_id += 1
        occupied.append(_Spot(x, y, r))
        objects.append(obj)
        return obj

    def add_human(x: float, y: float, theta: float, mobility: str,
                  group_id: int | None = None) -> Human:
        nonlocal next_id
        h = Human(next_id, Pose2D(x, y, theta), Velocity2D(), mobility, group_id)
        next_id += 1
        occupied.append(_Spot(x, y, config.HUMAN_RADIUS))
        humans.append(h)
        return h

    for _ in range(counts["tables"]):
        sx = rng.uniform(config.TABLE_SIDE_MIN, config.TABLE_SIDE_MAX)
        sy = rng.uniform(config.TABLE_SIDE_MIN, config.TABLE_SIDE_MAX)
        place_object("table", sx, sy)
    laptops = [place_object("laptop", config.LAPTOP_SIDE_X, config.LAPTOP_SIDE_Y)
               for _ in range(counts["laptops"])]
    for _ in range(counts["plants"]):
        side = rng.uniform(config.PLANT_SIDE_MIN, config.PLANT_SIDE_MAX)
        place_object("plant", side, side)

    # talking pairs: partner placed on a sampled ring around the first human
    for _ in range(counts["human_human_talking"]):
        placed = False
        for _ in range(config.PLACEMENT_ATTEMPTS):
            ax, ay = sample_free_pose(room, occupied, config.HUMAN_RADIUS, rng,
                                      "human_human_talking")
            d = rng.uniform(config.TALK_DIST_MIN, config.TALK_DIST_MAX)
            phi = rng.uniform(-math.pi, math.pi)
            bx, by = ax + d * math.cos(phi), ay + d * math.sin(phi)
            if not center_valid(room, bx, by,
                                config.HUMAN_RADIUS + config.CLEARANCE):
                continue
            if any(math.hypot(bx - s.x, by - s.y) - s.r - config.HUMAN_RADIUS
                   < config.CLEARANCE for s in occupied):
                continue
            a = add_human(ax, ay, math.atan2(by - ay, bx - ax), "static")
            b = add_human(bx, by, math.atan2(ay - by, ax - bx), "static")
            interactions.append(Interaction(a.id, b.id, "human_human_talking"))
            placed = True
            break
        if not placed:
            raise SceneGenerationError(
                "human_human_talking",
                f"could not place human_human_talking pair after "
                f"{config.PLACEMENT_ATTEMPTS} attempts")

    # laptop users: one per laptop, in a distance band, facing the screen
    for k in range(counts["human_laptop_interaction"]):
        lap = laptops[k]
        spot = occupied[[o.id for o in objects].index(lap.id)]
        placed = False
        for _ in range(config.PLACEMENT_ATTEMPTS):
            d = rng.uniform(config.LAPTOP_DIST_MIN, config.LAPTOP_DIST_MAX)
            phi = rng.uniform(-math.pi, math.pi)
            hx = lap.pose.x + d * math.cos(phi)
            hy = lap.pose.y + d * math.sin(phi)
            if not center_valid(room, hx, hy,
                                config.HUMAN_RADIUS + config.CLEARANCE):
                continue
            if any(s is not spot and
                   math.hypot(hx - s.x, hy - s.y) - s.r - config.HUMAN_RADIUS
                   < config.CLEARANCE for s in occupied):
                continue
            h = add_human(hx, hy,
                          math.atan2(lap.pose.y - hy, lap.pose.x - hx), "static")
            interactions.append(Interaction(h.id, lap.id, "human_laptop_interaction"))
            placed = True
            break
        if not placed:
            raise SceneGenerationError(
                "human_laptop_interaction",
                f"could not place human_laptop_interaction after "
                f"{config.PLACEMENT_ATTEMPTS} attempts")

    # walking groups: side-by-side pairs, shared heading/speed/waypoint
    for g in range(1, counts["walking_groups"] + 1):
        placed = False
        for _ in range(config.PLACEMENT_ATTEMPTS):
            lx, ly = sample_free_pose(room, occupied, config.HUMAN_RADIUS, rng,
                                      "walking_groups")
            heading = angle_wrap(rng.uniform(-math.pi, math.pi))
            ox = config.GROUP_OFFSET * math.cos(heading + math.pi / 2.0)
            oy = config.GROUP_OFFSET * math.sin(heading + math.pi / 2.0)
            mx, my = lx + ox, ly + oy
            if not center_valid(room, mx, my,
                                config.HUMAN_RADIUS + config.CLEARANCE):
                continue
            if any(math.hypot(mx - s.x, my - s.y) - s.r - config.HUMAN_RADIUS
                   < config.CLEARANCE for s in occupied):
                continue
            speed = rng.uniform(config.WALK_SPEED_MIN, config.WALK_SPEED_MAX)
            wp = pick_waypoint(room, rng, ((0.0, 0.0), (ox, oy)))
            lead = add_human(lx, ly, heading, "walker", g)
            mem = add_human(mx, my, heading, "walker", g)
            walkers[lead.id] = WalkerState(wp[0], wp[1], speed)
            walkers[mem.id] = WalkerState(wp[0] + ox, wp[1] + oy, speed)
            groups[g] = GroupState(lead.id, [mem.id], {mem.id: (ox, oy)})
            interactions.append(Interaction(lead.id, mem.id, "human_human_walking"))
            placed = True
            break
        if not placed:
            raise SceneGenerationError(
                "walking_groups",
                f"could not place walking_groups pair after "
                f"{config.PLACEMENT_ATTEMPTS} attempts")

    for _ in range(counts["humans_walking"] - 2 * counts["walking_groups"]):
        x, y = sample_free_pose(room, occupied, config.HUMAN_RADIUS, rng,
                                "humans_walking")
        theta = angle_wrap(rng.uniform(-math.pi, math.pi))
        h = add_human(x, y, theta, "walker")
        speed = rng.uniform(config.WALK_SPEED_MIN, config.WALK_SPEED_MAX)
        wp = pick_waypoint(room, rng)
        walkers[h.id] = WalkerState(wp[0], wp[1], speed)

    already_static = 2 * counts["human_human_talking"] + counts["human_laptop_interaction"]
    for _ in range(counts["humans_static"] - already_static):
        x, y = sample_free_pose(room, occupied, config.HUMAN_RADIUS, rng,
                                "humans_static")
        theta = angle_wrap(rng.uniform(-math.pi, math.pi))
        add_human(x, y, theta, "static")

    rx, ry = sample_free_pose(room, occupied, config.ROBOT_RADIUS, rng, "robot")
    rtheta = angle_wrap(rng.uniform(-math.pi, math.pi))
    robot = Pose2D(rx, ry, rtheta)
    occupied.append(_Spot(rx, ry, config.ROBOT_RADIUS))

    goal = None
    for _ in range(config.PLACEMENT_ATTEMPTS):
        gx, gy = sample_free_pose(room, occupied, 0.0, rng, "goal")
        if math.hypot(gx - rx, gy - ry) < config.ROBOT_GOAL_MIN:
            continue
        if not reachable(room, (rx, ry), (gx, gy)):
            continue
        goal = Goal(0, gx, gy)
        break
    if goal is None:
        raise SceneGenerationError(
            "goal", f"could not place a reachable goal after "
                    f"{config.PLACEMENT_ATTEMPTS} attempts")

    humans.sort(key=lambda h: h.id)  # already ascending; keep the contract explicit
    snapshot = WorldSnapshot(0, 0.0, robot, room, humans, objects, walls, goal,
                             interactions)
    return Scene(snapshot, BehaviorState(walkers, groups), rng, seed, ranges)
