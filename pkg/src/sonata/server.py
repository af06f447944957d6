"""WebSocket gateway and the live simulation loop.

One process, two threads: the simulation thread ticks the controller on the
wall clock (dt seconds per tick) and answers control requests; the asyncio
thread serves WebSocket clients. Both meet at the TopicBus, which is the only
shared state.

Wire protocol: every WebSocket text frame is one canonical-JSON envelope
{topic, seq, stamp, payload}. The server pushes the seven simulator topics
(humans, walls, objects, interactions, goal, robot, episode) as they are
published, resuming new clients from the latest scene; clients send joystick
and control envelopes (their seq is ignored, the bus assigns its own).
Malformed client frames are answered with an error event on the episode topic
and the connection stays up.
"""

from __future__ import annotations

import asyncio
import logging
import threading
import time

from . import config
from .bus import (CLIENT_TOPICS, SERVER_TOPICS, SchemaError, TopicBus,
                  decode_envelope, encode_envelope)
from .canon import q
from .controller import EpisodeController
from .scenegen import GenerationRanges

log = logging.getLogger("sonata.serve")


class SimulationLoop:
    """Wall-clock pacing for the controller; one tick per dt while running."""

    def __init__(self, controller: EpisodeController):
        self.controller = controller
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, name="sim", daemon=True)
        self._control_cursor = controller.bus.length("control")

    def start(self):
        self._thread.start()

    def stop(self):
        self._stop.set()
        self._thread.join(timeout=5.0)

    def _drain_control(self):
        ctl = self.controller
        for env in ctl.bus.poll("control", self._control_cursor):
            self._control_cursor = env.seq + 1
            ctl.handle_control(env.payload)

    def _run(self):
        ctl = self.controller
        next_tick = time.monotonic()
        while not self._stop.is_set():
            self._drain_control()
            if ctl.phase == "running":
                now = time.monotonic()
                if now >= next_tick:
                    ctl.tick()
                    next_tick = max(next_tick + ctl.dt, now - 1.0)
                else:
                    time.sleep(min(next_tick - now, 0.02))
            else:
                next_tick = time.monotonic()
                time.sleep(0.02)


async def _client_session(ws, bus: TopicBus, controller: EpisodeController):
    peer = getattr(ws, "remote_address", None)
    log.info("client connected: %s", peer)

    # start history cursors at the latest retained state so a late joiner
    # renders the current scene immediately without replaying old episodes
    cursors = {}
    for topic in SERVER_TOPICS:
        n = bus.length(topic)
        cursors[topic] = max(0, n - 1)

    async def pump():
        while True:
            sent = False
            for topic in SERVER_TOPICS:
                for env in bus.poll(topic, cursors[topic]):
                    cursors[topic] = env.seq + 1
                    await ws.send(encode_envelope(env).decode("ascii"))
                    sent = True
            if not sent:
                await asyncio.sleep(0.01)

    pump_task = asyncio.create_task(pump())
    try:
        async for message in ws:
            try:
                env = decode_envelope(message)
                if env.topic not in CLIENT_TOPICS:
                    raise SchemaError(f"clients cannot publish {env.topic!r}")
                bus.publish(env.topic, env.payload, env.stamp)
            except SchemaError as e:
                payload = {"state": "error", "frame_id": controller.frame_id,
                           "detail": str(e)}
                bus.publish("episode", payload, q(controller.sim_time))
    finally:
        pump_task.cancel()
        log.info("client disconnected: %s", peer)


def serve(host: str = "127.0.0.1", port: int = 8765,
          ranges: GenerationRanges | None = None, seed: int | None = None,
          dt: float = config.DT, data_dir: str | None = None,
          user: str = "anon", ready_event: threading.Event | None = None,
          stop_event: threading.Event | None = None) -> int:
    """Run the gateway until interrupted. Generates the first scene eagerly so
    clients always find a world."""
    import websockets.asyncio.server as ws_server

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    bus = TopicBus()
    controller = EpisodeController(bus, ranges, dt=dt, data_dir=data_dir,
                                   default_user=user, session_seed=seed)
    controller.regenerate()
    loop = SimulationLoop(controller)
    loop.start()

    async def amain():
        async def handler(ws):
            await _client_session(ws, bus, controller)

        async with ws_server.serve(handler, host, port) as server:
            log.info("listening on ws://%s:%d (data dir: %s)", host, port,
                     data_dir or "$SONATA_DATA_DIR or ./data")
            if ready_event is not None:
                ready_event.set()
            if stop_event is None:
                await asyncio.get_running_loop().create_future()  # until ^C
            else:
                while not stop_event.is_set():
                    await asyncio.sleep(0.05)

    try:
        asyncio.run(amain())
    except KeyboardInterrupt:
        log.info("interrupted, shutting down")
    finally:
        loop.stop()
    return 0
