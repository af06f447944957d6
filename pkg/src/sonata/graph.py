"""Temporal scene graphs and GNN-ready feature matrices.

Each simulation frame becomes a star graph around a room node: one node per
human, object and wall, one goal node, one room node. A training sample stacks
the newest frame with the one or two preceding it (window 2 or 3) and connects
consecutive frames with temporal edges from each entity's older node to its
newer one. frame_index counts backwards in time: 0 is the newest frame.

Node features are a fixed 42-column vector; a node only populates its own
type's block (plus the shared one-hots and the time pair). All geometry is
expressed in the robot's frame of its own snapshot, positions and lengths
divided by 6, velocities by the command caps, so every entry stays in a small
bounded range:

    [0:5)   node type one-hot (human, object, wall, goal, room)
    [5:8)   frame one-hot (frame_index 0, 1, 2)
    [8:10)  min(t/100, 1), min(step/1000, 1)
    [10:18) human: x, y, sin, cos, vx, vy, vtheta, dist
    [18:26) object: x, y, sin, cos, side_x, side_y, dist, half_diag
    [26:30) room: n_humans/10, n_objects/10, n_walls/10, area/100
    [30:38) wall: x1, y1, x2, y2, sin, cos, length, dist
    [38:42) goal: x, y, dist, reached

Relations: room_link (entity -> room), room_link_rev, interaction (entity1 ->
entity2), interaction_rev, temporal (older -> newer), self_loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from . import config
from .canon import dump_bytes, loads, q
from .recorder import Episode
from .world import (Pose2D, WorldSnapshot, angle_wrap, point_segment_distance,
                    world_to_robot)

FEATURE_DIM = 42
NODE_TYPES = ("human", "object", "wall", "goal", "room")
RELATIONS = ("room_link", "room_link_rev", "interaction", "interaction_rev",
             "temporal", "self_loop")
WINDOWS = (2, 3)

FEATURE_COLUMNS = (
    "type_human", "type_object", "type_wall", "type_goal", "type_room",
    "frame_0", "frame_1", "frame_2",
    "time_norm", "step_norm",
    "hum_x", "hum_y", "hum_sin", "hum_cos", "hum_vx", "hum_vy", "hum_vtheta",
    "hum_dist",
    "obj_x", "obj_y", "obj_sin", "obj_cos", "obj_side_x", "obj_side_y",
    "obj_dist", "obj_half_diag",
    "room_humans", "room_objects", "room_walls", "room_area",
    "wall_x1", "wall_y1", "wall_x2", "wall_y2", "wall_sin", "wall_cos",
    "wall_length", "wall_dist",
    "goal_x", "goal_y", "goal_dist", "goal_reached",
)

# columns that flip sign under the y -> -y mirror (see tests for the oracle)
MIRROR_NEGATED_COLUMNS = (11, 12, 15, 16, 19, 20, 31, 33, 34, 39)


class GraphError(ValueError):
    pass


@dataclass(slots=True)
class GraphNode:
    node_id: int      # index into the sample's feature matrix
    entity_id: int    # world id; -1 for goal, -2 for room
    node_type: int    # index into NODE_TYPES
    frame_index: int  # 0 = newest


@dataclass(slots=True)
class GraphSample:
    nodes: list[GraphNode]
    edges: list[tuple[int, int, str]]
    features: list[list[float]]
    label: tuple[float, float, float]
    window: int
    frame_id: int     # newest frame


def _base(node_type: int, frame_index: int, t: float, step: int) -> list[float]:
    row = [0.0] * FEATURE_DIM
    row[node_type] = 1.0
    row[5 + frame_index] = 1.0
    row[8] = min(t / config.FEATURE_TIME_CAP, 1.0)
    row[9] = min(step / config.FEATURE_STEP_CAP, 1.0)
    return row


def featurize_node(kind: str, entity, snap: WorldSnapshot, robot: Pose2D,
                   frame_index: int) -> list[float]:
    """One node's 42 features; geometry in `robot`'s frame, t/step from snap."""
    D = config.FEATURE_DIST_DIVISOR
    t, step = snap.sim_time, snap.frame_id
    if kind == "human":
        row = _base(0, frame_index, t, step)
        px, py = world_to_robot(robot, entity.pose.x, entity.pose.y)
        rel = angle_wrap(entity.pose.theta - robot.theta)
        c, s = math.cos(robot.theta), math.sin(robot.theta)
        v = entity.velocity
        row[10] = px / D
        row[11] = py / D
        row[12] = math.sin(rel)
        row[13] = math.cos(rel)
        row[14] = (c * v.vx + s * v.vy) / config.ADV_MAX
        row[15] = (-s * v.vx + c * v.vy) / config.LAT_MAX
        row[16] = v.vtheta / config.ROT_MAX
        row[17] = math.hypot(px, py) / D
        return row
    if kind == "object":
        row = _base(1, frame_index, t, step)
        px, py = world_to_robot(robot, entity.pose.x, entity.pose.y)
        rel = angle_wrap(entity.pose.theta - robot.theta)
        row[18] = px / D
        row[19] = py / D
        row[20] = math.sin(rel)
        row[21] = math.cos(rel)
        row[22] = entity.side_x / D
        row[23] = entity.side_y / D
        row[24] = math.hypot(px, py) / D
        row[25] = entity.footprint_radius() / D
        return row
    if kind == "wall":
        row = _base(2, frame_index, t, step)
        x1, y1 = world_to_robot(robot, entity.x1, entity.y1)
        x2, y2 = world_to_robot(robot, entity.x2, entity.y2)
        ang = math.atan2(y2 - y1, x2 - x1)
        row[30] = x1 / D
        row[31] = y1 / D
        row[32] = x2 / D
        row[33] = y2 / D
        row[34] = math.sin(ang)
        row[35] = math.cos(ang)
        row[36] = math.hypot(x2 - x1, y2 - y1) / D
        row[37] = point_segment_distance(0.0, 0.0, x1, y1, x2, y2) / D
        return row
    if kind == "goal":
        row = _base(3, frame_index, t, step)
        px, py = world_to_robot(robot, entity.x, entity.y)
        d = math.hypot(px, py)
        row[38] = px / D
        row[39] = py / D
        row[40] = d / D
        row[41] = 1.0 if d < config.R_GOAL else 0.0
        return row
    if kind == "room":
        row = _base(4, frame_index, t, step)
        row[26] = len(snap.humans) / config.FEATURE_COUNT_DIVISOR
        row[27] = len(snap.objects) / config.FEATURE_COUNT_DIVISOR
        row[28] = len(snap.walls) / config.FEATURE_COUNT_DIVISOR
        row[29] = snap.room.area() / config.FEATURE_AREA_DIVISOR
        return row
    raise GraphError(f"unknown node kind {kind!r}")


def build_frame_graph(snap: WorldSnapshot, frame_index: int):
    """Nodes, edges and features for one frame, local node ids from 0.

    Node order: humans by id, objects by id, walls by id, goal, room."""
    robot = snap.robot
    nodes: list[GraphNode] = []
    feats: list[list[float]] = []
    index_of: dict[int, int] = {}

    def add(kind_name: str, type_idx: int, entity, entity_id: int):
        idx = len(nodes)
        nodes.append(GraphNode(idx, entity_id, type_idx, frame_index))
        feats.append(featurize_node(kind_name, entity, snap, robot, frame_index))
        return idx

    for h in sorted(snap.humans, key=lambda h: h.id):
        index_of[h.id] = add("human", 0, h, h.id)
    for o in sorted(snap.objects, key=lambda o: o.id):
        index_of[o.id] = add("object", 1, o, o.id)
    for w in sorted(snap.walls, key=lambda w: w.wall_id):
        add("wall", 2, w, w.wall_id)
    goal_idx = add("goal", 3, snap.goal, -1)
    room_idx = add("room", 4, None, -2)

    edges: list[tuple[int, int, str]] = []
    for i in range(len(nodes)):
        if i != room_idx:
            edges.append((i, room_idx, "room_link"))
            edges.append((room_idx, i, "room_link_rev"))
    for it in snap.interactions:
        a = index_of.get(it.entity1_id)
        b = index_of.get(it.entity2_id)
        if a is None or b is None:
            raise GraphError(f"interaction references unknown entity "
                             f"{it.entity1_id}/{it.entity2_id}")
        edges.append((a, b, "interaction"))
        edges.append((b, a, "interaction_rev"))
    for i in range(len(nodes)):
        edges.append((i, i, "self_loop"))
    return nodes, edges, feats


def _entity_key(n: GraphNode) -> tuple[int, int]:
    return (n.node_type, n.entity_id)


def assemble_window(frames: list[WorldSnapshot],
                    label: tuple[float, float, float]) -> GraphSample:
    """Stack 2 or 3 consecutive frames (oldest first) into one sample."""
    w = len(frames)
    if w not in WINDOWS:
        raise GraphError(f"window must be one of {WINDOWS}, got {w}")
    for a, b in zip(frames, frames[1:]):
        if b.frame_id != a.frame_id + 1:
            raise GraphError(f"frames not consecutive: {a.frame_id} -> {b.frame_id}")

    nodes: list[GraphNode] = []
    edges: list[tuple[int, int, str]] = []
    feats: list[list[float]] = []
    per_frame_keys: list[dict] = []
    for j, snap in enumerate(frames):
        frame_index = w - 1 - j
        fnodes, fedges, ffeats = build_frame_graph(snap, frame_index)
        off = len(nodes)
        key_to_id = {}
        for n in fnodes:
            key_to_id[_entity_key(n)] = off + n.node_id
            nodes.append(GraphNode(off + n.node_id, n.entity_id, n.node_type,
                                   n.frame_index))
        edges.extend((s + off, d + off, rel) for s, d, rel in fedges)
        feats.extend(ffeats)
        per_frame_keys.append(key_to_id)

    for older, newer in zip(per_frame_keys, per_frame_keys[1:]):
        if set(older) != set(newer):
            gone = set(older) ^ set(newer)
            raise GraphError(f"entity sets differ between frames: {sorted(gone)}")
        for key, src in older.items():
            edges.append((src, newer[key], "temporal"))

    return GraphSample(nodes, edges, feats, label, w, frames[-1].frame_id)


def episode_to_samples(ep: Episode, window: int = 3,
                       stride: int = 1) -> list[GraphSample]:
    if window not in WINDOWS:
        raise GraphError(f"window must be one of {WINDOWS}, got {window}")
    if stride < 1:
        raise GraphError("stride must be >= 1")
    out = []
    steps = ep.steps
    for i in range(0, len(steps) - window + 1, stride):
        frames = [st.snapshot for st in steps[i:i + window]]
        out.append(assemble_window(frames, steps[i + window - 1].label))
    return out


# ---------------------------------------------------------------------------
# dataset files

def sample_to_doc(s: GraphSample) -> dict:
    return {
        "window": s.window,
        "frame_id": s.frame_id,
        "nodes": [[n.node_id, n.entity_id, n.node_type, n.frame_index]
                  for n in s.nodes],
        "edges": [[a, b, RELATIONS.index(rel)] for a, b, rel in s.edges],
        "features": [[q(v) for v in row] for row in s.features],
        "label": [q(s.label[0]), q(s.label[1]), q(s.label[2])],
    }


def doc_to_sample(doc: dict) -> GraphSample:
    try:
        nodes = [GraphNode(a, b, c, d) for a, b, c, d in doc["nodes"]]
        edges = [(a, b, RELATIONS[r]) for a, b, r in doc["edges"]]
        feats = [[float(v) for v in row] for row in doc["features"]]
        label = tuple(float(v) for v in doc["label"])
        return GraphSample(nodes, edges, feats, label, doc["window"],
                           doc["frame_id"])
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise GraphError(f"malformed graph sample: {e!r}") from None


def schema_doc() -> dict:
    return {
        "feature_dim": FEATURE_DIM,
        "feature_columns": list(FEATURE_COLUMNS),
        "node_types": list(NODE_TYPES),
        "relations": list(RELATIONS),
        "label": ["advance", "lateral", "rotation"],
        "node_record": ["node_id", "entity_id", "node_type", "frame_index"],
        "edge_record": ["src", "dst", "relation"],
        "normalization": {
            "distance_divisor": config.FEATURE_DIST_DIVISOR,
            "time_cap": config.FEATURE_TIME_CAP,
            "step_cap": config.FEATURE_STEP_CAP,
            "count_divisor": config.FEATURE_COUNT_DIVISOR,
            "area_divisor": config.FEATURE_AREA_DIVISOR,
            "velocity_caps": {"advance": config.ADV_MAX, "lateral": config.LAT_MAX,
                              "rotation": config.ROT_MAX},
        },
        "mirror_negated_columns": list(MIRROR_NEGATED_COLUMNS),
    }


def sidecar_path(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".schema.json")


def export_graph_dataset(samples: list[GraphSample], path: str | Path) -> Path:
    """Line-delimited canonical JSON plus a .schema.json sidecar."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "wb") as f:
        for s in samples:
            f.write(dump_bytes(sample_to_doc(s)))
            f.write(b"\n")
    sidecar_path(p).write_bytes(dump_bytes(schema_doc()))
    return p


def load_graph_dataset(path: str | Path) -> list[GraphSample]:
    out = []
    with open(path, "rb") as f:
        for i, line in enumerate(f):
            line = line.strip()
            if not line:
                continue
            try:
                doc = loads(line)
            except ValueError as e:
                raise GraphError(f"{path}:{i + 1}: invalid JSON ({e})") from None
            out.append(doc_to_sample(doc))
    return out
