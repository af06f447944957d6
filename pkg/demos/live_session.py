"""Drive a live gateway over its websocket for a couple of seconds.

Starts `serve` on a free port, connects like a browser client would, nudges
the robot with joystick envelopes, regenerates, and prints what arrives.

Usage: python3 demos/live_session.py
"""

import json
import socket
import threading
import time

from websockets.sync.client import connect

from sonata.server import serve


def client_frame(topic, payload):
    return json.dumps({"topic": topic, "seq": 0, "stamp": 0.0,
                       "payload": payload})


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def main():
    port = free_port()
    ready = threading.Event()
    stop = threading.Event()
    t = threading.Thread(target=serve,
                         kwargs=dict(port=port, seed=5, dt=0.05,
                                     ready_event=ready, stop_event=stop),
                         daemon=True)
    t.start()
    ready.wait(5.0)
    print(f"gateway up on ws://127.0.0.1:{port}")

    seen = {}
    with connect(f"ws://127.0.0.1:{port}") as ws:
        deadline = time.monotonic() + 1.0
        while time.monotonic() < deadline:
            env = json.loads(ws.recv(timeout=2.0))
            seen.setdefault(env["topic"], env)
        print("topics seen:", ", ".join(sorted(seen)))
        robot = seen["robot"]["payload"]
        print(f"robot at ({robot['x']:.2f}, {robot['y']:.2f}) "
              f"angle {robot['angle']:.2f}")

        # full forward stick, held; the loop folds it into every tick
        ws.send(client_frame("joystick", {"axis_id": 0, "value": 1.0}))
        time.sleep(0.5)
        latest = None
        deadline = time.monotonic() + 1.0
        while time.monotonic() < deadline:
            try:
                env = json.loads(ws.recv(timeout=0.2))
            except TimeoutError:
                break
            if env["topic"] == "robot":
                latest = env
        moved = latest["payload"]
        print(f"after driving: ({moved['x']:.2f}, {moved['y']:.2f}) "
              f"stamp {latest['stamp']}")

        ws.send(client_frame("control", {"action": "regenerate", "seed": 6}))
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline:
            env = json.loads(ws.recv(timeout=2.0))
            if env["topic"] == "robot" and env["stamp"] == 0.0:
                fresh = env["payload"]
                print(f"regenerated: robot back at "
                      f"({fresh['x']:.2f}, {fresh['y']:.2f}), stamp 0.0")
                break
    stop.set()
    print("done")


if __name__ == "__main__":
    main()
