"""Gateway integration: a real server, a real WebSocket client."""

import socket
import threading
import time

import pytest
from websockets.sync.client import connect

from sonata.canon import dumps, loads
from sonata.scenegen import GenerationRanges
from sonata.server import serve

QUIET = GenerationRanges(humans_static=(1, 1), humans_walking=(1, 1),
                         tables=(1, 1), laptops=(0, 0), plants=(0, 0),
                         human_human_talking=(0, 0),
                         human_laptop_interaction=(0, 0), walking_groups=(0, 0))


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture()
def gateway(tmp_path):
    port = free_port()
    ready = threading.Event()
    stop = threading.Event()
    thread = threading.Thread(
        target=serve,
        kwargs=dict(host="127.0.0.1", port=port, ranges=QUIET, seed=99,
                    dt=0.01, data_dir=str(tmp_path), user="webuser",
                    ready_event=ready, stop_event=stop),
        daemon=True)
    thread.start()
    assert ready.wait(10.0), "server did not come up"
    yield f"ws://127.0.0.1:{port}", tmp_path
    stop.set()
    thread.join(timeout=10.0)


def wait_for(ws, pred, timeout=5.0):
    deadline = time.monotonic() + timeout
    while True:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise AssertionError("expected envelope never arrived")
        msg = ws.recv(timeout=remaining)
        env = loads(msg)
        if pred(env):
            return env, msg


def send(ws, topic, payload, stamp=0.0):
    ws.send(dumps({"topic": topic, "seq": 0, "stamp": stamp,
                   "payload": payload}))


def test_late_joiner_gets_scene(gateway):
    url, _ = gateway
    with connect(url) as ws:
        seen = set()
        deadline = time.monotonic() + 5.0
        while seen < {"walls", "objects", "goal", "humans", "robot",
                      "episode", "interactions"}:
            msg = ws.recv(timeout=deadline - time.monotonic())
            env = loads(msg)
            assert msg.startswith('{"topic":')  # canonical key order on wire
            seen.add(env["topic"])
        assert "walls" in seen and "robot" in seen


def test_robot_stream_advances_and_seq_contiguous(gateway):
    url, _ = gateway
    with connect(url) as ws:
        envs = []
        while len(envs) < 5:
            env, _ = wait_for(ws, lambda e: e["topic"] == "robot")
            envs.append(env)
        seqs = [e["seq"] for e in envs]
        assert seqs == list(range(seqs[0], seqs[0] + 5))
        # stamp carries the sim clock: frame_id = stamp / dt
        stamps = [e["stamp"] for e in envs]
        assert stamps == sorted(stamps)
        assert stamps[-1] > stamps[0]


def test_joystick_moves_robot(gateway):
    url, _ = gateway
    with connect(url) as ws:
        first, _ = wait_for(ws, lambda e: e["topic"] == "robot")
        send(ws, "joystick", {"axis_id": 2, "value": 1.0})
        moved, _ = wait_for(
            ws, lambda e: e["topic"] == "robot"
            and e["payload"]["angle"] != first["payload"]["angle"])
        assert moved["stamp"] > first["stamp"]


def test_control_regenerate_resets_robot_clock(gateway):
    url, _ = gateway
    with connect(url) as ws:
        wait_for(ws, lambda e: e["topic"] == "robot" and e["stamp"] > 0.1)
        send(ws, "control", {"action": "regenerate", "seed": 123})
        env, _ = wait_for(ws, lambda e: e["topic"] == "robot"
                          and e["stamp"] == 0.0)
        assert env["stamp"] == 0.0  # frame_id 0 observed on the robot topic
        running, _ = wait_for(ws, lambda e: e["topic"] == "episode"
                              and e["payload"].get("frame_id") == 0)
        assert running["payload"]["state"] == "running"


def test_save_before_reached_is_refused(gateway):
    url, data_dir = gateway
    with connect(url) as ws:
        wait_for(ws, lambda e: e["topic"] == "episode"
                 and e["payload"]["state"] == "running")
        send(ws, "control", {"action": "save"})
        env, _ = wait_for(ws, lambda e: e["topic"] == "episode"
                          and e["payload"]["state"] == "error")
        assert "save" in env["payload"]["detail"]
    assert list(data_dir.glob("*.json")) == []


def test_malformed_frame_answered_not_fatal(gateway):
    url, _ = gateway
    with connect(url) as ws:
        wait_for(ws, lambda e: e["topic"] == "robot")
        ws.send("this is not json")
        env, _ = wait_for(ws, lambda e: e["topic"] == "episode"
                          and e["payload"]["state"] == "error")
        assert env["payload"]["detail"]
        # connection still works: joystick still accepted, sim still ticking
        send(ws, "joystick", {"axis_id": 0, "value": 0.2})
        wait_for(ws, lambda e: e["topic"] == "robot")


def test_client_cannot_publish_server_topics(gateway):
    url, _ = gateway
    with connect(url) as ws:
        wait_for(ws, lambda e: e["topic"] == "robot")
        send(ws, "robot", {"x": 0.0, "y": 0.0, "angle": 0.0, "frame_id": 4})
        env, _ = wait_for(ws, lambda e: e["topic"] == "episode"
                          and e["payload"]["state"] == "error")
        assert "robot" in env["payload"]["detail"]


def test_bad_payload_schema_reported(gateway):
    url, _ = gateway
    with connect(url) as ws:
        wait_for(ws, lambda e: e["topic"] == "robot")
        send(ws, "joystick", {"axis_id": "zero", "value": 1.0})
        env, _ = wait_for(ws, lambda e: e["topic"] == "episode"
                          and e["payload"]["state"] == "error")
        assert "axis_id" in env["payload"]["detail"]


def test_two_clients_see_the_same_stream(gateway):
    url, _ = gateway
    with connect(url) as a, connect(url) as b:
        ea, _ = wait_for(a, lambda e: e["topic"] == "robot")
        eb, _ = wait_for(b, lambda e: e["topic"] == "robot"
                         and e["seq"] == ea["seq"])
        assert eb == ea
