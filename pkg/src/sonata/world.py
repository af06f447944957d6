"""World state types and the kinematic core.

The robot is a holonomic disc driven by (advance, lateral, rotation) velocity
commands in its own frame. Integration is semi-implicit Euler at a fixed step:
positions advance along the heading held at the start of the step, then the
heading integrates. Walls are the room polygon's edges; collision response is
axis rejection (try x, then y independently), which produces sliding along
walls instead of sticking.

Angles are always wrapped to (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import config


def angle_wrap(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"non-finite angle: {theta!r}")
    r = math.remainder(theta, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


@dataclass(slots=True)
class Pose2D:
    x: float
    y: float
    theta: float  # rad, (-pi, pi]


@dataclass(slots=True)
class Velocity2D:
    vx: float = 0.0
    vy: float = 0.0
    vtheta: float = 0.0


@dataclass(slots=True)
class Command:
    """Physical robot command, robot frame. Caps enforced at construction."""

    advance: float = 0.0   # m/s, +forward
    lateral: float = 0.0   # m/s, +left
    rotation: float = 0.0  # rad/s, +ccw

    def __post_init__(self):
        if abs(self.advance) > config.ADV_MAX + 1e-12:
            raise ValueError(f"advance exceeds cap: {self.advance}")
        if abs(self.lateral) > config.LAT_MAX + 1e-12:
            raise ValueError(f"lateral exceeds cap: {self.lateral}")
        if abs(self.rotation) > config.ROT_MAX + 1e-12:
            raise ValueError(f"rotation exceeds cap: {self.rotation}")


@dataclass(slots=True)
class Wall:
    wall_id: int
    x1: float
    y1: float
    x2: float
    y2: float


@dataclass(slots=True)
class Room:
    shape: str                         # "rectangle" | "l_shape"
    polygon: list[tuple[float, float]] # CCW, no repeated last vertex

    def walls(self) -> list[Wall]:
        n = len(self.polygon)
        out = []
        for i in range(n):
            x1, y1 = self.polygon[i]
            x2, y2 = self.polygon[(i + 1) % n]
            out.append(Wall(i, x1, y1, x2, y2))
        return out

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.polygon]
        ys = [p[1] for p in self.polygon]
        return min(xs), min(ys), max(xs), max(ys)

    def area(self) -> float:
        s = 0.0
        n = len(self.polygon)
        for i in range(n):
            x1, y1 = self.polygon[i]
            x2, y2 = self.polygon[(i + 1) % n]
            s += x1 * y2 - x2 * y1
        return 0.5 * s  # positive for CCW


@dataclass(slots=True)
class Human:
    id: int
    pose: Pose2D
    velocity: Velocity2D
    mobility: str        # "static" | "walker"
    group_id: int | None = None


@dataclass(slots=True)
class SceneObject:
    id: int
    kind: str            # "table" | "laptop" | "plant"
    pose: Pose2D
    side_x: float
    side_y: float

    def footprint_radius(self) -> float:
        return 0.5 * math.hypot(self.side_x, self.side_y)


@dataclass(slots=True)
class Goal:
    identifier: int
    x: float
    y: float


@dataclass(slots=True)
class Interaction:
    entity1_id: int
    entity2_id: int
    interaction_type: str  # human_human_talking | human_laptop_interaction | human_human_walking


@dataclass(slots=True)
class WorldSnapshot:
    frame_id: int
    sim_time: float
    robot: Pose2D
    room: Room
    humans: list[Human]
    objects: list[SceneObject]
    walls: list[Wall]
    goal: Goal
    interactions: list[Interaction]


# ---------------------------------------------------------------------------
# geometry

def point_segment_distance(px: float, py: float,
                           x1: float, y1: float, x2: float, y2: float) -> float:
    dx, dy = x2 - x1, y2 - y1
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - x1, py - y1)
    t = ((px - x1) * dx + (py - y1) * dy) / L2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def point_in_room(room: Room, x: float, y: float) -> bool:
    """Even-odd test, boundary-inclusive."""
    poly = room.polygon
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if point_segment_distance(x, y, x1, y1, x2, y2) <= 1e-9:
            return True
    inside = False
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1)
            if x < xc:
                inside = not inside
    return inside


def wall_clearance(room: Room, x: float, y: float) -> float:
    """Distance from a point to the nearest wall."""
    return min(point_segment_distance(x, y, w.x1, w.y1, w.x2, w.y2)
               for w in room.walls())


def center_valid(room: Room, x: float, y: float, radius: float) -> bool:
    """Disc of this radius fits: center inside, every wall at least radius away.

    Equivalent to point_in_room(room, x, y) and wall_clearance >= radius, in
    one pass over the edges; this sits on the per-tick hot path (robot slide
    plus every walker), so the edge loop is inlined.
    """
    poly = room.polygon
    mind = math.inf
    x1, y1 = poly[-1]
    for x2, y2 in poly:
        dx, dy = x2 - x1, y2 - y1
        L2 = dx * dx + dy * dy
        if L2 == 0.0:
            d = math.hypot(x - x1, y - y1)
        else:
            t = ((x - x1) * dx + (y - y1) * dy) / L2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            d = math.hypot(x - (x1 + t * dx), y - (y1 + t * dy))
        if d < mind:
            mind = d
        x1, y1 = x2, y2
    if mind < radius:
        return False
    if mind <= 1e-9:
        return True  # on the boundary, counts as inside
    inside = False
    x1, y1 = poly[-1]
    for x2, y2 in poly:
        if (y1 > y) != (y2 > y) and x < x1 + (y - y1) / (y2 - y1) * (x2 - x1):
            inside = not inside
        x1, y1 = x2, y2
    return inside


def world_to_robot(robot: Pose2D, x: float, y: float) -> tuple[float, float]:
    dx, dy = x - robot.x, y - robot.y
    c, s = math.cos(robot.theta), math.sin(robot.theta)
    return c * dx + s * dy, -s * dx + c * dy


def robot_to_world(robot: Pose2D, x: float, y: float) -> tuple[float, float]:
    c, s = math.cos(robot.theta), math.sin(robot.theta)
    return robot.x + c * x - s * y, robot.y + s * x + c * y


# ---------------------------------------------------------------------------
# kinematics

def integrate(pose: Pose2D, cmd: Command, dt: float) -> Pose2D:
    """One Euler step, no collision handling."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return Pose2D(
        pose.x + dt * (cmd.advance * c - cmd.lateral * s),
        pose.y + dt * (cmd.advance * s + cmd.lateral * c),
        angle_wrap(pose.theta + dt * cmd.rotation),
    )


def slide(room: Room, x0: float, y0: float, x1: float, y1: float,
          radius: float) -> tuple[float, float]:
    """Axis rejection: accept the x and y displacements independently.

    Assumes (x0, y0) is valid; result is valid whenever the two axes are
    separable, which holds for our axis-aligned-ish rooms in practice and is
    re-checked by the combined test below.
    """
    nx = x1 if center_valid(room, x1, y0, radius) else x0
    ny = y1 if center_valid(room, nx, y1, radius) else y0
    return nx, ny


def step_robot(pose: Pose2D, cmd: Command, dt: float, room: Room | None = None) -> Pose2D:
    """Integrate one step; with a room, clip the translation by wall sliding."""
    target = integrate(pose, cmd, dt)
    if room is None:
        return target
    nx, ny = slide(room, pose.x, pose.y, target.x, target.y, config.ROBOT_RADIUS)
    if nx == target.x and ny == target.y:
        return target
    return replace(target, x=nx, y=ny)


def goal_reached(pose: Pose2D, goal: Goal) -> bool:
    return math.hypot(pose.x - goal.x, pose.y - goal.y) < config.R_GOAL
