"""Scripted human motion.

Statics never move. Walkers head for a waypoint, turn-rate limited, and pick a
fresh waypoint on arrival (consuming the shared episode RNG, so replays from
the same seed reproduce every wander). A walker freezes for the tick when an
obstacle (robot or another human, not a co-member) is closing within HALT_GAP
of its body ahead of it.

Walking groups are pairs moving in lockstep: the leader integrates, members
are materialized each tick as leader pose + a fixed world-frame offset with
the leader's exact heading. A group halts as a unit when any member would.
Note the offset is re-applied from the leader every tick rather than
accumulated per member; accumulating both trajectories independently lets
float rounding smear the formation apart at the ulp level.

Humans only collide with walls (axis sliding); bodies can overlap furniture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import config
from .rng import SplitMix64
from .world import (Human, Pose2D, Room, Velocity2D, angle_wrap, center_valid,
                    slide)


class BehaviorError(RuntimeError):
    pass


@dataclass(slots=True)
class WalkerState:
    waypoint_x: float
    waypoint_y: float
    speed: float  # m/s, fixed per walker for the episode


@dataclass(slots=True)
class GroupState:
    leader_id: int
    member_ids: list[int]                    # excludes the leader
    offsets: dict[int, tuple[float, float]]  # member id -> world offset from leader


@dataclass(slots=True)
class BehaviorState:
    walkers: dict[int, WalkerState]  # walker human id -> state (leaders included)
    groups: dict[int, GroupState]    # group id -> state


def pick_waypoint(room: Room, rng: SplitMix64,
                  offsets: tuple[tuple[float, float], ...] = ((0.0, 0.0),)) -> tuple[float, float]:
    """Waypoint inside the room, WAYPOINT_CLEARANCE from walls, valid for every
    formation offset. Draws two uniforms per attempt."""
    minx, miny, maxx, maxy = room.bbox()
    for _ in range(config.PLACEMENT_ATTEMPTS):
        x = rng.uniform(minx, maxx)
        y = rng.uniform(miny, maxy)
        if all(center_valid(room, x + ox, y + oy, config.WAYPOINT_CLEARANCE)
               for ox, oy in offsets):
            return x, y
    raise BehaviorError("no valid waypoint found, room too tight")


def _halted(x: float, y: float, heading: float, self_radius: float,
            obstacles: list[tuple[float, float, float]]) -> bool:
    hx, hy = math.cos(heading), math.sin(heading)
    for ox, oy, orad in obstacles:
        dx, dy = ox - x, oy - y
        if dx * hx + dy * hy <= 0.0:
            continue  # behind or abeam
        if math.hypot(dx, dy) - self_radius - orad < config.HALT_GAP:
            return True
    return False


def _advance_walker(pose: Pose2D, st: WalkerState, room: Room, dt: float,
                    obstacle_sets: list[list[tuple[float, float, float]]],
                    probe_offsets: list[tuple[float, float]]) -> tuple[Pose2D, Velocity2D, bool]:
    """Turn toward the waypoint, halt-check every probe point, then move."""
    desired = math.atan2(st.waypoint_y - pose.y, st.waypoint_x - pose.x)
    turn = angle_wrap(desired - pose.theta)
    max_turn = config.WALK_TURN_MAX * dt
    if turn > max_turn:
        turn = max_turn
    elif turn < -max_turn:
        turn = -max_turn
    heading = angle_wrap(pose.theta + turn)

    for (ox, oy), obstacles in zip(probe_offsets, obstacle_sets):
        if _halted(pose.x + ox, pose.y + oy, heading, config.HUMAN_RADIUS, obstacles):
            return pose, Velocity2D(0.0, 0.0, 0.0), True

    step = st.speed * dt
    tx = pose.x + step * math.cos(heading)
    ty = pose.y + step * math.sin(heading)
    nx, ny = slide(room, pose.x, pose.y, tx, ty, config.HUMAN_RADIUS)
    vel = Velocity2D((nx - pose.x) / dt, (ny - pose.y) / dt, turn / dt)
    return Pose2D(nx, ny, heading), vel, False


def step_humans(humans: list[Human], room: Room, robot: Pose2D,
                state: BehaviorState, dt: float, rng: SplitMix64) -> list[Human]:
    """Advance every human one tick. `humans` must be in ascending id order;
    statics are passed through by reference so downstream payload caches hold.

    Obstacle positions are the pre-tick ones for all humans plus the robot's
    already-stepped pose, keeping the result independent of iteration order.
    """
    pre = {h.id: h for h in humans}
    group_of: dict[int, int] = {}
    for gid, g in state.groups.items():
        group_of[g.leader_id] = gid
        for m in g.member_ids:
            group_of[m] = gid

    robot_obs = (robot.x, robot.y, config.ROBOT_RADIUS)
    bodies = [(h.id, group_of.get(h.id), h.pose.x, h.pose.y) for h in humans]

    def obstacles_for(hid: int) -> list[tuple[float, float, float]]:
        gid = group_of.get(hid)
        return [robot_obs] + [
            (x, y, config.HUMAN_RADIUS) for oid, ogid, x, y in bodies
            # formation mates are not obstacles to each other
            if oid != hid and (gid is None or ogid != gid)]

    moved: dict[int, Human] = {}

    # groups first: the leader decides the whole formation's tick
    for gid in sorted(state.groups):
        g = state.groups[gid]
        leader = pre[g.leader_id]
        st = state.walkers[g.leader_id]
        if math.hypot(st.waypoint_x - leader.pose.x,
                      st.waypoint_y - leader.pose.y) < config.WAYPOINT_REACHED:
            offsets = ((0.0, 0.0),) + tuple(g.offsets[m] for m in g.member_ids)
            st.waypoint_x, st.waypoint_y = pick_waypoint(room, rng, offsets)
        probe_offsets = [(0.0, 0.0)] + [g.offsets[m] for m in g.member_ids]
        obstacle_sets = [obstacles_for(g.leader_id)] + [obstacles_for(m) for m in g.member_ids]
        pose, vel, halted = _advance_walker(leader.pose, st, room, dt,
                                            obstacle_sets, probe_offsets)
        moved[leader.id] = Human(leader.id, pose, vel, "walker", gid)
        for m in g.member_ids:
            ox, oy = g.offsets[m]
            mp = Pose2D(pose.x + ox, pose.y + oy, pose.theta)
            mv = Velocity2D(vel.vx, vel.vy, vel.vtheta)
            moved[m] = Human(m, mp, mv, "walker", gid)

    out: list[Human] = []
    for h in humans:
        if h.mobility == "static":
            out.append(h)
            continue
        if h.id in moved:
            out.append(moved[h.id])
            continue
        st = state.walkers[h.id]
        if math.hypot(st.waypoint_x - h.pose.x,
                      st.waypoint_y - h.pose.y) < config.WAYPOINT_REACHED:
            st.waypoint_x, st.waypoint_y = pick_waypoint(room, rng)
        pose, vel, _ = _advance_walker(h.pose, st, room, dt,
                                       [obstacles_for(h.id)], [(0.0, 0.0)])
        out.append(Human(h.id, pose, vel, "walker", None))
    return out
