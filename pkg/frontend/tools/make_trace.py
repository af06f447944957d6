"""Author the keyboard fixture for the e2e interchangeability test.

Finds a seed whose scene a blind two-phase script can solve (rotate toward
the goal, then advance), emits the key script, and proves it reaches the
goal by running the headless recorder on the equivalent joystick trace.
Talks to the toolkit only through its CLI and file formats, never imports
it: the frontend stays on the public interface.

The 20 Hz sampling below mirrors src/input.ts; if the two ever drift the
e2e test fails loudly rather than silently diverging.

Usage: python3 tools/make_trace.py [--start-seed N] [--out fixtures/drive_script.json]
"""

import argparse
import json
import math
import subprocess
import tempfile
from pathlib import Path

DT = 0.1
SAMPLE_DT = 0.05
ROT_PER_TICK = 0.15  # 1.5 rad/s * 0.1 s
# The live gateway folds an event only if it is in the bus before the tick
# that owns its stamp. The first tick lands ~0-20 ms after regenerate, well
# before a client can see the fresh scene, so the script must not touch a
# key at t=0; a lead-in gives the event stream four ticks of delivery slack.
LEAD = 0.4

KEY_AXIS = {"KeyW": (0, 1), "KeyS": (0, -1), "KeyA": (1, 1), "KeyD": (1, -1),
            "KeyQ": (2, 1), "KeyE": (2, -1)}


def wrap(a):
    return math.remainder(a, math.tau)


def grid(t):
    return round(t * 1e6) / 1e6


def sample_key_script(script, duration):
    """Python mirror of input.ts sampleKeyScript."""
    held = set()
    last = [0, 0, 0]
    events = []
    pending = sorted(script, key=lambda e: e[0])
    i = 0
    for k in range(int(round(duration / SAMPLE_DT)) + 1):
        stamp = grid(k * SAMPLE_DT)
        while i < len(pending) and pending[i][0] <= stamp + 1e-9:
            _, typ, code = pending[i]
            if typ == "down":
                held.add(code)
            else:
                held.discard(code)
            i += 1
        axes = [0, 0, 0]
        for code in held:
            axis, sign = KEY_AXIS[code]
            axes[axis] = max(-1, min(1, axes[axis] + sign))
        for axis in range(3):
            if axes[axis] != 0 or last[axis] != 0:
                events.append([stamp, axis, axes[axis]])
        last = axes
    return events


def two_phase_script(robot, goal):
    dx, dy = goal["x"] - robot["x"], goal["y"] - robot["y"]
    dist = math.hypot(dx, dy)
    dth = wrap(math.atan2(dy, dx) - robot["angle"])
    n_rot = round(abs(dth) / ROT_PER_TICK)
    err = abs(abs(dth) - n_rot * ROT_PER_TICK)
    if dist > 6.0 or err > 0.03:
        return None
    rot_key = "KeyQ" if dth > 0 else "KeyE"
    script = []
    handoff = LEAD
    if n_rot > 0:
        handoff = grid(LEAD + (n_rot - 1) * DT + SAMPLE_DT)
        script.append([LEAD, "down", rot_key])
        script.append([handoff, "up", rot_key])
    script.append([handoff, "down", "KeyW"])
    n_adv = math.ceil(dist / 0.1) + 5
    w_up = grid(handoff + (n_adv - 1) * DT + SAMPLE_DT)
    script.append([w_up, "up", "KeyW"])
    return script, grid(w_up + DT)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--start-seed", type=int, default=100)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent
                    / "tests" / "fixtures" / "drive_script.json")
    args = ap.parse_args()

    for seed in range(args.start_seed, args.start_seed + 300):
        doc = json.loads(subprocess.run(
            ["sonata", "generate", "--seed", str(seed)],
            capture_output=True, text=True, check=True).stdout)
        scene = doc["scene"]
        if scene["room"]["shape"] != "rectangle":
            continue
        plan = two_phase_script(scene["robot"], scene["goal"])
        if plan is None:
            continue
        script, duration = plan
        events = sample_key_script(script, duration)
        with tempfile.TemporaryDirectory() as td:
            trace = Path(td) / "trace.json"
            trace.write_text(json.dumps({
                "seed": seed, "ranges": doc["ranges"], "dt": DT,
                "events": events,
            }))
            proc = subprocess.run(
                ["sonata", "drive", "--trace", str(trace),
                 "--data-dir", td, "--user", "probe"],
                capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"seed {seed}: did not reach ({proc.stderr.strip()})")
            continue
        fixture = {"seed": seed, "dt": DT, "ranges": doc["ranges"],
                   "duration": duration, "script": script}
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(fixture, indent=1) + "\n")
        print(f"seed {seed}: {proc.stdout.strip()}")
        print(f"wrote {args.out} ({len(events)} joystick events)")
        return 0
    print("no workable seed in range")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
