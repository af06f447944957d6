"""Record one headless episode, mirror it, and export graph samples.

The planner steers the robot to the goal along a grid path, so the whole
pipeline (scene -> teleop loop -> episode file -> mirror twin -> GNN samples)
runs start to finish without a human at the wheel.

Usage: python3 demos/record_and_graph.py [--seed N] [--out DIR]
"""

import argparse
import tempfile
from pathlib import Path

from sonata.driving import drive, plan_goal_trace
from sonata.graph import episode_to_samples, export_graph_dataset
from sonata.recorder import (compliance_report, load_episode, mirror_episode,
                             write_episode)
from sonata.scenegen import GenerationRanges


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--out", type=Path,
                    default=Path(tempfile.mkdtemp(prefix="sonata_demo_")))
    args = ap.parse_args()

    ranges = GenerationRanges(humans_static=(1, 2), humans_walking=(1, 2),
                              tables=(1, 2), laptops=(0, 1), plants=(0, 1),
                              human_human_talking=(0, 1))
    trace = plan_goal_trace(ranges, args.seed)
    print(f"planned {len(trace)} joystick events for seed {args.seed}")

    ctl, path = drive(ranges, args.seed, trace, user_id="demo",
                      data_dir=str(args.out))
    ep = load_episode(path)
    print(f"episode saved: {path} ({len(ep.steps)} steps)")

    rep = compliance_report(ep)
    print("compliance:", ", ".join(f"{k}={v}" for k, v in rep.items()))

    twin = write_episode(mirror_episode(ep), directory=args.out)
    print(f"mirror twin: {twin}")

    samples = episode_to_samples(ep, window=3)
    ds = export_graph_dataset(samples, args.out / "demo.jsonl")
    first = samples[0]
    print(f"graph dataset: {ds} ({len(samples)} samples; first sample has "
          f"{len(first.nodes)} nodes, {len(first.edges)} edges, "
          f"label {first.label})")


if __name__ == "__main__":
    main()
