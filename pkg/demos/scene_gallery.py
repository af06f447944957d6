"""Print a few randomized scenes as ASCII maps.

Usage: python3 demos/scene_gallery.py [--seed N] [--count K]
"""

import argparse
import math

from sonata.scenegen import GenerationRanges, SceneGenerationError, generate_scene
from sonata.world import point_in_room

CELL = 0.25

BUSY = GenerationRanges(humans_static=(2, 4), humans_walking=(2, 4),
                        tables=(1, 3), laptops=(1, 2), plants=(1, 2),
                        human_human_talking=(1, 1),
                        human_laptop_interaction=(0, 1),
                        walking_groups=(0, 1))


def glyph_layers(snap):
    marks = []
    for o in snap.objects:
        marks.append((o.pose.x, o.pose.y,
                      {"table": "T", "laptop": "l", "plant": "p"}[o.kind]))
    for h in snap.humans:
        marks.append((h.pose.x, h.pose.y,
                      "w" if h.mobility == "walker" else "h"))
    marks.append((snap.goal.x, snap.goal.y, "G"))
    marks.append((snap.robot.x, snap.robot.y, "R"))
    return marks


def render(snap):
    minx, miny, maxx, maxy = snap.room.bbox()
    nx = math.ceil((maxx - minx) / CELL)
    ny = math.ceil((maxy - miny) / CELL)
    rows = []
    for j in range(ny - 1, -1, -1):
        row = []
        for i in range(nx):
            cx, cy = minx + (i + 0.5) * CELL, miny + (j + 0.5) * CELL
            row.append(" " if point_in_room(snap.room, cx, cy) else "#")
        rows.append(row)
    for x, y, ch in glyph_layers(snap):
        i = min(nx - 1, max(0, int((x - minx) / CELL)))
        j = min(ny - 1, max(0, int((y - miny) / CELL)))
        rows[ny - 1 - j][i] = ch
    return "\n".join("".join(r) for r in rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count", type=int, default=3)
    args = ap.parse_args()

    shown = 0
    seed = args.seed
    while shown < args.count:
        try:
            scene = generate_scene(BUSY, seed)
        except SceneGenerationError as e:
            print(f"seed {seed}: placement failed ({e}), skipping")
            seed += 1
            continue
        snap = scene.snapshot
        print(f"\nseed {seed}  shape={snap.room.shape}  "
              f"humans={len(snap.humans)} objects={len(snap.objects)} "
              f"walls={len(snap.walls)} interactions={len(snap.interactions)}")
        print(render(snap))
        shown += 1
        seed += 1
    print("\nlegend: R robot, G goal, h standing human, w walker, "
          "T table, l laptop, p plant, # outside")


if __name__ == "__main__":
    main()
