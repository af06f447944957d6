"""Command line interface.

Subcommands:
    serve         run the WebSocket gateway + live simulation loop
    generate      print a generated scene as canonical JSON
    drive         record an episode headlessly from a scripted trace
    replay        re-simulate episode files and byte-compare them
    validate      check episode files against the format invariants
    mirror        write the mirror twin of an episode file
    graph-export  episodes -> line-delimited graph samples + schema sidecar
    stats         dataset totals and compliance aggregates

Episodes land in --data-dir, else $SONATA_DATA_DIR, else ./data. Exit status
is nonzero iff any error was reported.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config
from .canon import dump_bytes, loads
from .driving import (DriveError, drive, plan_goal_trace, replay_report,
                      trace_from_lists, trace_to_lists)
from .graph import episode_to_samples, export_graph_dataset
from .recorder import (FILENAME_RE, EpisodeError, compliance_report,
                       data_dir, episode_to_doc, load_episode, mirror_episode,
                       snapshot_to_doc, write_episode)
from .scenegen import ENTITY_KEYS, GenerationRanges, RangesError, generate_scene


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _add_ranges_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ranges", metavar="FILE",
                   help="JSON file: entity name -> [min, max]")
    for key in ENTITY_KEYS:
        p.add_argument(_flag(key), nargs=2, type=int, metavar=("MIN", "MAX"),
                       dest=key, help=f"override {key} range")


def _ranges_from_args(args) -> GenerationRanges:
    base = {}
    if args.ranges:
        with open(args.ranges, encoding="utf-8") as f:
            base = json.load(f)
        if not isinstance(base, dict):
            raise RangesError(f"{args.ranges}: ranges file must be a JSON object")
    for key in ENTITY_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            base[key] = [v[0], v[1]]
    if not base:
        return GenerationRanges()
    full = GenerationRanges().to_dict()
    full.update(base)
    return GenerationRanges.from_dict(full)


def _out_write(data: bytes, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _episode_files(paths: list[str]) -> list[Path]:
    """Expand directories to the episode files inside them (by file naming)."""
    out: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            out.extend(sorted(f for f in path.iterdir()
                              if FILENAME_RE.match(f.name)))
        else:
            out.append(path)
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_generate(args) -> int:
    ranges = _ranges_from_args(args)
    scene = generate_scene(ranges, args.seed, args.shape)
    doc = {"seed": args.seed, "ranges": ranges.to_dict(),
           "scene": snapshot_to_doc(scene.snapshot)}
    _out_write(dump_bytes(doc) + b"\n", args.out)
    return 0


def cmd_drive(args) -> int:
    if args.trace:
        with open(args.trace, encoding="utf-8") as f:
            doc = loads(f.read())
        trace = trace_from_lists(doc["events"])
        seed = args.seed if args.seed is not None else doc.get("seed")
        ranges = (_ranges_from_args(args) if (args.ranges or any(
            getattr(args, k, None) for k in ENTITY_KEYS))
            else GenerationRanges.from_dict(doc["ranges"]))
        dt = doc.get("dt", args.dt)
    else:
        if args.seed is None:
            print("drive: --seed is required with --auto", file=sys.stderr)
            return 1
        seed = args.seed
        ranges = _ranges_from_args(args)
        dt = args.dt
        trace = plan_goal_trace(ranges, seed, dt)
    if seed is None:
        print("drive: no seed given (flag or trace file)", file=sys.stderr)
        return 1
    ctl, path = drive(ranges, seed, trace, dt=dt, user_id=args.user,
                      data_dir=args.data_dir)
    if args.save_trace:
        tdoc = {"seed": seed, "ranges": ranges.to_dict(), "dt": dt,
                "events": trace_to_lists(trace)}
        Path(args.save_trace).write_bytes(dump_bytes(tdoc) + b"\n")
    print(f"saved {path} ({len(ctl.steps)} steps)")
    return 0


def cmd_replay(args) -> int:
    failed = 0
    for path in _episode_files(args.files):
        try:
            ep = load_episode(path)
        except EpisodeError as e:
            print(f"{path}: ERROR: {e}")
            failed += 1
            continue
        rep = replay_report(ep)
        if rep["match"]:
            print(f"{path}: OK ({rep['steps']} steps, byte-exact)")
        else:
            print(f"{path}: MISMATCH at frame {rep['first_divergence_frame']}")
            failed += 1
    return 1 if failed else 0


def cmd_validate(args) -> int:
    failed = 0
    for path in _episode_files(args.files):
        try:
            ep = load_episode(path)
        except EpisodeError as e:
            print(f"{path}: ERROR: {e}")
            failed += 1
            continue
        print(f"{path}: OK ({len(ep.steps)} steps)")
    return 1 if failed else 0


def cmd_mirror(args) -> int:
    ep = load_episode(args.file)
    m = mirror_episode(ep)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_bytes(dump_bytes(episode_to_doc(m)))
        print(f"wrote {args.out}")
    else:
        directory = args.data_dir or str(Path(args.file).parent)
        path = write_episode(m, directory)
        print(f"wrote {path}")
    return 0


def cmd_graph_export(args) -> int:
    files = _episode_files(args.files)
    if not files:
        print("graph-export: no episode files found", file=sys.stderr)
        return 1
    samples = []
    failed = 0
    for path in files:
        try:
            ep = load_episode(path)
        except EpisodeError as e:
            print(f"{path}: ERROR: {e}")
            failed += 1
            continue
        samples.extend(episode_to_samples(ep, args.window, args.stride))
    export_graph_dataset(samples, args.out)
    print(f"wrote {args.out} ({len(samples)} samples from {len(files) - failed} episodes)")
    return 1 if failed else 0


def cmd_stats(args) -> int:
    files = _episode_files(args.files or [str(data_dir(args.data_dir))])
    episodes = 0
    unreadable = 0
    steps = 0
    per_user: dict[str, int] = {}
    personal = crossing = speeding = 0
    min_dist = None
    for path in files:
        try:
            ep = load_episode(path)
        except EpisodeError as e:
            print(f"{path}: ERROR: {e}")
            unreadable += 1
            continue
        episodes += 1
        steps += len(ep.steps)
        per_user[ep.user_id] = per_user.get(ep.user_id, 0) + 1
        rep = compliance_report(ep)
        personal += rep["personal_space_violation_steps"]
        crossing += rep["interaction_crossing_steps"]
        speeding += rep["speeding_near_human_steps"]
        d = rep["min_human_distance"]
        if d is not None and (min_dist is None or d < min_dist):
            min_dist = d
    print(f"episodes: {episodes}")
    print(f"unreadable: {unreadable}")
    print(f"steps: {steps}")
    for user in sorted(per_user):
        print(f"user {user}: {per_user[user]} episodes")
    print(f"personal_space_violation_steps: {personal}")
    print(f"interaction_crossing_steps: {crossing}")
    print(f"speeding_near_human_steps: {speeding}")
    print(f"min_human_distance: {'null' if min_dist is None else min_dist}")
    return 1 if unreadable else 0


def cmd_serve(args) -> int:
    from .server import serve  # websockets import stays optional for library use
    ranges = _ranges_from_args(args)
    return serve(host=args.host, port=args.port, ranges=ranges, seed=args.seed,
                 dt=args.dt, data_dir=args.data_dir, user=args.user)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sonata",
                                 description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the live teleoperation gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--seed", type=int, help="session seed (episode seeds derive from it)")
    p.add_argument("--dt", type=float, default=config.DT)
    p.add_argument("--data-dir", help="episode directory (default $SONATA_DATA_DIR or ./data)")
    p.add_argument("--user", default="anon", help="user id for saved episodes")
    _add_ranges_args(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("generate", help="generate a scene and print it")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--shape", choices=("random", "rectangle", "l_shape"),
                   default="random")
    p.add_argument("--out", help="write to file instead of stdout")
    _add_ranges_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("drive", help="record an episode from a scripted trace")
    p.add_argument("--seed", type=int)
    p.add_argument("--trace", help="trace file with {seed, ranges, dt, events}")
    p.add_argument("--auto", action="store_true",
                   help="plan a goal-reaching trace instead of reading one")
    p.add_argument("--save-trace", help="write the trace that was driven")
    p.add_argument("--user", default="anon")
    p.add_argument("--dt", type=float, default=config.DT)
    p.add_argument("--data-dir")
    _add_ranges_args(p)
    p.set_defaults(func=cmd_drive)

    p = sub.add_parser("replay", help="re-simulate episodes and byte-compare")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("validate", help="check episode files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mirror", help="write an episode's mirror twin")
    p.add_argument("file")
    p.add_argument("--out", help="explicit output path")
    p.add_argument("--data-dir", help="output directory (default: alongside input)")
    p.set_defaults(func=cmd_mirror)

    p = sub.add_parser("graph-export", help="episodes -> graph dataset (.jsonl)")
    p.add_argument("files", nargs="+", help="episode files or directories")
    p.add_argument("--window", type=int, choices=(2, 3), default=3)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph_export)

    p = sub.add_parser("stats", help="dataset totals and compliance aggregates")
    p.add_argument("files", nargs="*", help="episode files or directories "
                                            "(default: the data dir)")
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EpisodeError, RangesError, DriveError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
