"""Retained-history publish/subscribe bus and the wire schemas.

Every message is an envelope {topic, seq, stamp, payload} with exactly that
key order on the wire. seq is per-topic, contiguous from 0; stamp is the
publisher's sim-time in seconds and must be non-decreasing per topic. Topics
retain their full history so consumers poll by cursor and can never miss or
reorder anything; the same mechanism backs live clients, the recorder and the
scripted replays.

Schemas below mirror the wire contract exactly; payloads are validated and
float-quantized on publish. Internal publishers that construct
already-canonical payloads may pass trusted=True to skip the re-walk (the
gateway never does).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Any

from .canon import dump_bytes, loads, q

INTERACTION_TYPES = ("human_human_talking", "human_laptop_interaction",
                     "human_human_walking")
EPISODE_STATES = ("running", "reached", "saved", "discarded", "error")
CONTROL_ACTIONS = ("regenerate", "save", "discard")

# field name -> type tag; "float" quantizes, "angle" additionally checks the
# wrap, "int"/"str" pass through, ("enum", values) restricts strings
_HUMAN = {"id": "int", "x": "float", "y": "float", "angle": "angle",
          "ix": "float", "iy": "float", "iangle": "float"}
_WALL = {"wall_id": "int", "x1": "float", "y1": "float",
         "x2": "float", "y2": "float"}
_OBJECT = {"id": "int", "x": "float", "y": "float", "angle": "angle",
           "sideX": "float", "sideY": "float"}
_GOAL = {"identifier": "int", "x": "float", "y": "float"}
_INTERACTION = {"entity1_id": "int", "entity2_id": "int",
                "interaction_type": ("enum", INTERACTION_TYPES)}
_ROBOT = {"x": "float", "y": "float", "angle": "angle"}
_EPISODE = {"state": ("enum", EPISODE_STATES), "frame_id": "int",
            "detail?": "str"}
_JOYSTICK = {"axis_id": "int", "value": "float"}
_CONTROL = {"action": ("enum", CONTROL_ACTIONS), "ranges?": "ranges",
            "seed?": "int", "user_id?": "str"}

# topic -> (is_list, record schema)
SCHEMAS: dict[str, tuple[bool, dict]] = {
    "humans": (True, _HUMAN),
    "walls": (True, _WALL),
    "objects": (True, _OBJECT),
    "interactions": (True, _INTERACTION),
    "goal": (False, _GOAL),
    "robot": (False, _ROBOT),
    "episode": (False, _EPISODE),
    "joystick": (False, _JOYSTICK),
    "control": (False, _CONTROL),
}

SERVER_TOPICS = ("humans", "walls", "objects", "interactions", "goal",
                 "robot", "episode")
CLIENT_TOPICS = ("joystick", "control")


class SchemaError(ValueError):
    pass


def _check_field(topic: str, name: str, kind, value):
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaError(f"{topic}.{name}: expected int, got {value!r}")
        return value
    if kind in ("float", "angle"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{topic}.{name}: expected number, got {value!r}")
        v = float(value)
        if not math.isfinite(v):
            raise SchemaError(f"{topic}.{name}: non-finite number")
        if kind == "angle" and not (-math.pi - 1e-9 < v <= math.pi + 1e-9):
            raise SchemaError(f"{topic}.{name}: angle {v} outside (-pi, pi]")
        return q(v)
    if kind == "str":
        if not isinstance(value, str):
            raise SchemaError(f"{topic}.{name}: expected string, got {value!r}")
        return value
    if kind == "ranges":
        # structural check only; semantic validation happens in scenegen
        if not isinstance(value, dict):
            raise SchemaError(f"{topic}.{name}: expected object, got {value!r}")
        out = {}
        for k, v in value.items():
            if (not isinstance(v, list) or len(v) != 2
                    or not all(isinstance(i, int) and not isinstance(i, bool) for i in v)):
                raise SchemaError(f"{topic}.{name}.{k}: expected [min, max] ints")
            out[k] = list(v)
        return out
    tag, allowed = kind
    if tag == "enum":
        if value not in allowed:
            raise SchemaError(f"{topic}.{name}: {value!r} not in {allowed}")
        return value
    raise AssertionError(f"bad schema kind {kind!r}")


def _check_record(topic: str, schema: dict, rec: Any) -> dict:
    if not isinstance(rec, dict):
        raise SchemaError(f"{topic}: expected object, got {type(rec).__name__}")
    out = {}
    seen = set()
    for name, kind in schema.items():
        optional = name.endswith("?")
        key = name[:-1] if optional else name
        if key not in rec:
            if optional:
                continue
            raise SchemaError(f"{topic}.{key}: missing field")
        out[key] = _check_field(topic, key, kind, rec[key])
        seen.add(key)
    extra = set(rec) - seen
    if extra:
        raise SchemaError(f"{topic}: unknown fields {sorted(extra)}")
    return out


def validate_payload(topic: str, payload: Any) -> Any:
    """Check against the topic schema; returns the canonical payload
    (schema key order, floats quantized)."""
    if topic not in SCHEMAS:
        raise SchemaError(f"unknown topic {topic!r}")
    is_list, schema = SCHEMAS[topic]
    if is_list:
        if not isinstance(payload, list):
            raise SchemaError(f"{topic}: expected a list payload")
        return [_check_record(topic, schema, r) for r in payload]
    return _check_record(topic, schema, payload)


@dataclass(slots=True)
class Envelope:
    topic: str
    seq: int
    stamp: float
    payload: Any

    def to_wire(self) -> dict:
        return {"topic": self.topic, "seq": self.seq, "stamp": self.stamp,
                "payload": self.payload}


def encode_envelope(env: Envelope) -> bytes:
    return dump_bytes(env.to_wire())


def decode_envelope(data: bytes | str) -> Envelope:
    try:
        doc = loads(data)
    except ValueError as e:
        raise SchemaError(f"envelope is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaError("envelope must be a JSON object")
    missing = {"topic", "seq", "stamp", "payload"} - set(doc)
    if missing:
        raise SchemaError(f"envelope missing fields {sorted(missing)}")
    extra = set(doc) - {"topic", "seq", "stamp", "payload"}
    if extra:
        raise SchemaError(f"envelope has unknown fields {sorted(extra)}")
    topic, seq, stamp = doc["topic"], doc["seq"], doc["stamp"]
    if not isinstance(topic, str):
        raise SchemaError("envelope.topic must be a string")
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
        raise SchemaError("envelope.seq must be a non-negative integer")
    if isinstance(stamp, bool) or not isinstance(stamp, (int, float)):
        raise SchemaError("envelope.stamp must be a number")
    stamp = float(stamp)
    if not math.isfinite(stamp) or stamp < 0.0:
        raise SchemaError("envelope.stamp must be finite and non-negative")
    payload = validate_payload(topic, doc["payload"])
    return Envelope(topic, seq, q(stamp), payload)


class _Topic:
    __slots__ = ("history", "last_stamp")

    def __init__(self):
        self.history: list[Envelope] = []
        self.last_stamp = 0.0


class TopicBus:
    """Thread-safe retained-history bus. One lock; publish is append-only and
    readers only ever index below len(), so polls don't block each other long."""

    def __init__(self):
        self._lock = threading.Lock()
        self._topics = {name: _Topic() for name in SCHEMAS}

    def publish(self, topic: str, payload: Any, stamp: float,
                trusted: bool = False) -> Envelope:
        if not trusted:
            payload = validate_payload(topic, payload)
            if isinstance(stamp, bool) or not isinstance(stamp, (int, float)):
                raise SchemaError(f"{topic}: stamp must be a number")
            stamp = q(float(stamp))
            if stamp < 0.0:
                raise SchemaError(f"{topic}: negative stamp")
        t = self._topics.get(topic)
        if t is None:
            raise SchemaError(f"unknown topic {topic!r}")
        with self._lock:
            if stamp < t.last_stamp:
                raise SchemaError(
                    f"{topic}: stamp {stamp} decreases below {t.last_stamp}")
            env = Envelope(topic, len(t.history), stamp, payload)
            t.history.append(env)
            t.last_stamp = stamp
        return env

    def reset_stamps(self) -> None:
        """Drop the per-topic stamp floors (seq keeps counting). Called when a
        new episode resets sim time to 0; within an episode stamps stay
        non-decreasing."""
        with self._lock:
            for t in self._topics.values():
                t.last_stamp = 0.0

    def poll(self, topic: str, cursor: int, limit: int | None = None) -> list[Envelope]:
        """Envelopes with seq >= cursor, in order. The caller advances its own
        cursor to last seq + 1."""
        t = self._topics.get(topic)
        if t is None:
            raise SchemaError(f"unknown topic {topic!r}")
        if cursor < 0:
            raise ValueError("cursor must be >= 0")
        with self._lock:
            end = len(t.history)
        if limit is not None:
            end = min(end, cursor + limit)
        return t.history[cursor:end]

    def length(self, topic: str) -> int:
        t = self._topics.get(topic)
        if t is None:
            raise SchemaError(f"unknown topic {topic!r}")
        with self._lock:
            return len(t.history)

    def latest(self, topic: str) -> Envelope | None:
        t = self._topics.get(topic)
        if t is None:
            raise SchemaError(f"unknown topic {topic!r}")
        with self._lock:
            return t.history[-1] if t.history else None
