"""Episode persistence: documents, validation, files, mirroring, compliance."""

import json
import math

import pytest

from sonata import config
from sonata.canon import dump_bytes, dumps, q
from sonata.driving import drive, plan_goal_trace
from sonata.recorder import (FILENAME_RE, Episode, EpisodeError,
                             EpisodeParseError, EpisodeStep, compliance_report,
                             data_dir, doc_to_episode, episode_path,
                             episode_to_doc, load_episode, mirror_episode,
                             validate_episode, write_episode)
from sonata.scenegen import GenerationRanges
from sonata.world import (Command, Goal, Human, Interaction, Pose2D, Room,
                          Velocity2D, WorldSnapshot, step_robot)

SEED = 42
QUIET = GenerationRanges(humans_static=(0, 0), humans_walking=(1, 1),
                         tables=(0, 0), laptops=(0, 0), plants=(0, 0),
                         human_human_talking=(0, 0),
                         human_laptop_interaction=(0, 0), walking_groups=(0, 0))


@pytest.fixture(scope="module")
def episode():
    trace = plan_goal_trace(QUIET, SEED)
    ctl, _ = drive(QUIET, SEED, trace, save=False)
    ep = ctl.episode("tester")
    ep.created_at = 1_700_000_000
    return ep


def test_round_trip_is_byte_exact(episode, tmp_path):
    path = write_episode(episode, directory=tmp_path)
    again = load_episode(path)
    assert dump_bytes(episode_to_doc(again)) == path.read_bytes()
    assert episode_to_doc(again) == episode_to_doc(episode)


def test_document_key_order(episode):
    doc = episode_to_doc(episode)
    assert list(doc) == ["metadata", "steps"]
    assert list(doc["metadata"]) == ["user_id", "created_at", "seed", "ranges",
                                     "dt", "caps", "toolkit_version", "mirrored"]
    step = doc["steps"][0]
    assert list(step) == ["snapshot", "label"]
    assert list(step["snapshot"]) == ["frame_id", "sim_time", "robot", "room",
                                      "humans", "objects", "walls", "goal",
                                      "interactions"]


def test_validate_accepts_good_episode(episode):
    validate_episode(episode)  # should not raise


def corrupt(episode, mutate):
    doc = json.loads(dumps(episode_to_doc(episode)))  # deep copy
    mutate(doc)
    return doc_to_episode(doc)


@pytest.mark.parametrize("mutate, hint", [
    (lambda d: d["steps"][3]["snapshot"].__setitem__("frame_id", 99),
     "contiguity"),
    (lambda d: d["steps"][2]["snapshot"].__setitem__("sim_time", 0.7),
     "sim_time"),
    (lambda d: d["steps"][0]["label"].__setitem__(0, 1.5), "label"),
    (lambda d: d["steps"][0]["snapshot"]["robot"].__setitem__("angle", 7.0),
     "not wrapped"),
    (lambda d: d["steps"][0]["snapshot"]["room"].__setitem__("shape", "hexagon"),
     "shape"),
    (lambda d: d["steps"][0]["snapshot"]["walls"].pop(), "walls"),
    (lambda d: d["steps"][0]["snapshot"]["humans"].append(
        dict(d["steps"][0]["snapshot"]["humans"][0])), "duplicate"),
    (lambda d: d["steps"][0]["snapshot"]["interactions"].append(
        {"entity1_id": 77, "entity2_id": 78,
         "interaction_type": "human_human_talking"}), "unknown"),
    (lambda d: d.__setitem__("steps", d["steps"][:5]), "goal"),
])
def test_validate_rejects(episode, mutate, hint):
    bad = corrupt(episode, mutate)
    with pytest.raises(EpisodeError) as err:
        validate_episode(bad)
    assert hint in str(err.value)


def test_validate_rejects_empty_steps(episode):
    bad = corrupt(episode, lambda d: d.__setitem__("steps", []))
    with pytest.raises(EpisodeError, match="no steps"):
        validate_episode(bad)


def test_validate_rejects_bad_user_id(episode):
    bad = corrupt(episode, lambda d: d["metadata"].__setitem__("user_id", "a_b"))
    with pytest.raises(EpisodeError, match="user_id"):
        validate_episode(bad)


def test_filename_pattern_and_collision_suffix(episode, tmp_path):
    first = write_episode(episode, directory=tmp_path)
    second = write_episode(episode, directory=tmp_path)
    third = write_episode(episode, directory=tmp_path)
    assert first.name == "tester_1700000000.json"
    assert second.name == "tester_1700000000_1.json"
    assert third.name == "tester_1700000000_2.json"
    for p in (first, second, third):
        assert FILENAME_RE.match(p.name)


def test_write_fills_zero_created_at_from_clock(episode, tmp_path):
    doc = json.loads(dumps(episode_to_doc(episode)))
    doc["metadata"]["created_at"] = 0
    ep = doc_to_episode(doc)
    path = write_episode(ep, directory=tmp_path, clock=lambda: 555)
    assert path.name == "tester_555.json"


def test_write_is_atomic_no_temp_left_behind(episode, tmp_path):
    write_episode(episode, directory=tmp_path)
    names = [p.name for p in tmp_path.iterdir()]
    assert names == ["tester_1700000000.json"]


def test_data_dir_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("SONATA_DATA_DIR", str(tmp_path / "alt"))
    assert data_dir() == tmp_path / "alt"
    monkeypatch.delenv("SONATA_DATA_DIR")
    assert data_dir() == __import__("pathlib").Path("data")
    assert data_dir("elsewhere") == __import__("pathlib").Path("elsewhere")


def test_episode_path_picks_first_free_name(tmp_path):
    (tmp_path / "bob_7.json").touch()
    (tmp_path / "bob_7_1.json").touch()
    assert episode_path(tmp_path, "bob", 7) == tmp_path / "bob_7_2.json"
    assert episode_path(tmp_path, "bob", 8) == tmp_path / "bob_8.json"


def test_load_rejects_malformed_json(tmp_path):
    path = tmp_path / "x_1.json"
    path.write_text('{"metadata": {"user_id": "x",\n  "created_at": }}')
    with pytest.raises(EpisodeParseError) as err:
        load_episode(path)
    assert "line 2" in str(err.value)


def test_load_rejects_wrong_shape(tmp_path):
    path = tmp_path / "x_1.json"
    path.write_text('{"metadata": {"user_id": "x"}}')
    with pytest.raises(EpisodeError):
        load_episode(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(EpisodeError, match="cannot read"):
        load_episode(tmp_path / "nope.json")


def test_mirror_is_involution(episode):
    twice = mirror_episode(mirror_episode(episode))
    assert dump_bytes(episode_to_doc(twice)) == dump_bytes(episode_to_doc(episode))


def test_mirror_flips_geometry_and_labels(episode):
    m = mirror_episode(episode)
    assert m.mirrored is True
    a, b = episode.steps[5], m.steps[5]
    assert b.snapshot.robot.x == a.snapshot.robot.x
    assert b.snapshot.robot.y == -a.snapshot.robot.y
    assert b.label[0] == a.label[0]
    assert b.label[1] == -a.label[1]
    assert b.label[2] == -a.label[2]
    assert b.snapshot.goal.y == -a.snapshot.goal.y
    assert b.snapshot.goal.x == a.snapshot.goal.x


def test_mirror_preserves_validity(episode):
    validate_episode(mirror_episode(episode))


def test_mirror_polygon_stays_counterclockwise(episode):
    m = mirror_episode(episode)
    assert m.steps[0].snapshot.room.area() > 0


# ---------------------------------------------------------------------------
# compliance, on scripted straight-line runs where the counts are computable

def synthetic_episode(humans, labels, start, interactions=()):
    """Scripted run in a 10 x 6 rectangle with the goal at (3, 0)."""
    room = Room("rectangle", [(-5.0, -3.0), (5.0, -3.0), (5.0, 3.0), (-5.0, 3.0)])
    cast = [Human(i + 1, Pose2D(x, y, 0.0), Velocity2D(0.0, 0.0, 0.0), "static")
            for i, (x, y) in enumerate(humans)]
    goal = Goal(0, 3.0, 0.0)
    pose = Pose2D(*start)
    steps = []
    for k, label in enumerate(labels, start=1):
        pose = step_robot(pose, Command(*label), config.DT, room)
        snap = WorldSnapshot(k, k * config.DT, pose, room, cast, [],
                             room.walls(), goal, list(interactions))
        steps.append(EpisodeStep(snap, label))
    return Episode(user_id="unit", created_at=1, seed=0,
                   ranges=GenerationRanges().to_dict(), dt=config.DT,
                   caps={"advance": config.ADV_MAX, "lateral": config.LAT_MAX,
                         "rotation": config.ROT_MAX},
                   mirrored=False, steps=steps)


def test_compliance_counts_personal_space():
    # half speed straight past a human standing 0.5 m off the track
    labels = [(0.5, 0.0, 0.0)] * 111
    ep = synthetic_episode([(0.0, 0.5)], labels, (-3.0, 0.0, 0.0))
    validate_episode(ep)  # the run really ends at the goal
    rep = compliance_report(ep)
    assert rep["steps"] == 111
    assert rep["personal_space_violation_steps"] > 0
    assert rep["interaction_crossing_steps"] == 0
    assert rep["speeding_near_human_steps"] == 0  # 0.5 m/s is under the limit
    assert rep["min_human_distance"] == 0.5


def test_compliance_speeding_needs_both_speed_and_proximity():
    labels = [(1.0, 0.0, 0.0)] * 56
    ep = synthetic_episode([(0.0, 0.5)], labels, (-3.0, 0.0, 0.0))
    rep = compliance_report(ep)
    assert rep["speeding_near_human_steps"] > 0
    far = synthetic_episode([(0.0, 2.9)], labels, (-3.0, 0.0, 0.0))
    assert compliance_report(far)["speeding_near_human_steps"] == 0


def test_compliance_speed_combines_linear_axes():
    # hypot(0.4, 0.5) > 0.6 even though each axis alone is under the limit
    labels = [(0.4, 0.5, 0.0)] * 20
    ep = synthetic_episode([(-2.0, 0.6)], labels, (-2.5, 0.0, 0.0))
    assert compliance_report(ep)["speeding_near_human_steps"] > 0
    slow = [(0.4, 0.3, 0.0)] * 20  # hypot = 0.5, under
    ep2 = synthetic_episode([(-2.0, 0.6)], slow, (-2.5, 0.0, 0.0))
    assert compliance_report(ep2)["speeding_near_human_steps"] == 0


def test_compliance_rotation_is_not_speed():
    labels = [(0.0, 0.0, 1.0)] * 20  # spin in place right next to a human
    ep = synthetic_episode([(-2.9, 0.3)], labels, (-2.9, 0.0, 0.0))
    rep = compliance_report(ep)
    assert rep["speeding_near_human_steps"] == 0
    assert rep["personal_space_violation_steps"] == 20


def test_compliance_interaction_crossing():
    pair = [(0.0, 0.6), (0.0, -0.6)]
    talk = [Interaction(1, 2, "human_human_talking")]
    labels = [(0.5, 0.0, 0.0)] * 111
    ep = synthetic_episode(pair, labels, (-3.0, 0.0, 0.0), talk)
    rep = compliance_report(ep)
    assert rep["interaction_crossing_steps"] > 0
    # same walk with nobody talking: no segment to cross
    ep2 = synthetic_episode(pair, labels, (-3.0, 0.0, 0.0))
    assert compliance_report(ep2)["interaction_crossing_steps"] == 0


def test_compliance_empty_room_reports_null_distance():
    labels = [(0.5, 0.0, 0.0)] * 111
    ep = synthetic_episode([], labels, (-3.0, 0.0, 0.0))
    rep = compliance_report(ep)
    assert rep["min_human_distance"] is None
    assert rep["personal_space_violation_steps"] == 0
    assert rep["speeding_near_human_steps"] == 0


def test_compliance_document_is_canonical():
    labels = [(0.5, 0.0, 0.0)] * 111
    ep = synthetic_episode([(0.0, 0.5)], labels, (-3.0, 0.0, 0.0))
    rep = compliance_report(ep)
    assert list(rep) == ["steps", "personal_space_violation_steps",
                         "interaction_crossing_steps",
                         "speeding_near_human_steps", "min_human_distance"]
    dumps(rep)  # canonical-serializable as is
