"""Episode controller: lifecycle phases, input folding, publishing, saving."""

import math

import pytest

from sonata import config
from sonata.bus import TopicBus
from sonata.canon import q
from sonata.controller import ControllerError, EpisodeController
from sonata.scenegen import GenerationRanges

SEED = 42
QUIET = GenerationRanges(humans_static=(0, 0), humans_walking=(1, 1),
                         tables=(0, 0), laptops=(0, 0), plants=(0, 0),
                         human_human_talking=(0, 0),
                         human_laptop_interaction=(0, 0), walking_groups=(0, 0))


def controller(**kw):
    kw.setdefault("session_seed", 1)
    return EpisodeController(TopicBus(), QUIET, **kw)


def joy(ctl, axis, value, stamp):
    ctl.bus.publish("joystick", {"axis_id": axis, "value": value}, stamp)


def test_initial_phase_idle_and_tick_refused():
    ctl = controller()
    assert ctl.phase == "idle"
    with pytest.raises(ControllerError):
        ctl.tick()


def test_regenerate_publishes_frame0_records_nothing():
    ctl = controller()
    snap = ctl.regenerate(SEED)
    assert ctl.phase == "running"
    assert snap.frame_id == 0 and ctl.frame_id == 0
    assert ctl.steps == []
    # every scene topic published once, episode says running
    for topic in ("walls", "objects", "goal", "interactions", "humans", "robot"):
        assert ctl.bus.length(topic) == 1, topic
    ep = ctl.bus.latest("episode")
    assert ep.payload == {"state": "running", "frame_id": 0}


def test_tick_records_frames_from_one_and_sim_time_multiplies():
    ctl = controller()
    ctl.regenerate(SEED)
    for k in range(1, 6):
        snap = ctl.tick()
        assert snap.frame_id == k
        assert snap.sim_time == k * ctl.dt  # multiplication, not accumulation
    assert [st.snapshot.frame_id for st in ctl.steps] == [1, 2, 3, 4, 5]
    assert ctl.bus.length("robot") == 6  # frame 0 plus 5 ticks
    assert ctl.bus.length("walls") == 1  # statics are not republished


def test_input_applies_at_its_stamp_not_before():
    ctl = controller()
    ctl.regenerate(SEED)
    start = ctl.snapshot.robot
    joy(ctl, 0, 1.0, 0.25)  # falls between frame 2 (t=0.2) and frame 3 (t=0.3)
    ctl.tick()  # t becomes 0.1; folds stamps <= 0.0
    ctl.tick()  # folds stamps <= 0.1
    assert ctl.steps[-1].label == (0.0, 0.0, 0.0)
    assert ctl.snapshot.robot.x == start.x and ctl.snapshot.robot.y == start.y
    ctl.tick()  # folds stamps <= 0.2: still not 0.25
    assert ctl.steps[-1].label == (0.0, 0.0, 0.0)
    ctl.tick()  # folds stamps <= 0.3: applies
    assert ctl.steps[-1].label == (1.0, 0.0, 0.0)


def test_input_at_stamp_zero_drives_first_tick():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 0, 0.5, 0.0)
    ctl.tick()
    assert ctl.steps[0].label == (0.5, 0.0, 0.0)


def test_last_writer_wins_within_a_tick():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 0, 0.2, 0.0)
    joy(ctl, 0, 0.9, 0.0)
    joy(ctl, 1, -0.4, 0.0)
    ctl.tick()
    assert ctl.steps[0].label == (0.9, -0.4, 0.0)


def test_inputs_latch_until_changed():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 2, 1.0, 0.0)
    ctl.tick()
    ctl.tick()
    assert ctl.steps[0].label == (0.0, 0.0, 1.0)
    assert ctl.steps[1].label == (0.0, 0.0, 1.0)  # still latched


def test_labels_reproduce_commands_exactly():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 0, 0.3333333333333, 0.0)
    before = ctl.snapshot.robot
    ctl.tick()
    label = ctl.steps[0].label[0]
    assert label == q(0.3333333333333)  # quantized at the boundary
    moved = ctl.snapshot.robot.x - before.x
    # distance equals label * cap * dt in the robot's heading projection
    expect = label * config.ADV_MAX * ctl.dt
    assert math.hypot(ctl.snapshot.robot.x - before.x,
                      ctl.snapshot.robot.y - before.y) == pytest.approx(
        abs(expect), abs=1e-12) or moved == 0.0  # unless a wall clipped it


def test_out_of_range_values_clamped():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 0, 5.0, 0.0)
    joy(ctl, 1, -5.0, 0.0)
    ctl.tick()
    assert ctl.steps[0].label == (1.0, -1.0, 0.0)


def test_unknown_axis_counts_warning_and_is_ignored():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 7, 1.0, 0.0)
    ctl.tick()
    assert ctl.warnings == 1
    assert ctl.steps[0].label == (0.0, 0.0, 0.0)


def test_regenerate_drops_stale_pending_inputs():
    ctl = controller()
    ctl.regenerate(SEED)
    joy(ctl, 0, 1.0, 99.0)  # far future, held pending
    ctl.tick()
    assert ctl.steps[0].label == (0.0, 0.0, 0.0)
    ctl.regenerate(SEED)
    ctl.tick()
    # the held event belongs to the old episode; the cursor skipped it
    assert ctl.steps[0].label == (0.0, 0.0, 0.0)


def test_finish_requires_reached(tmp_path):
    ctl = controller(data_dir=str(tmp_path))
    ctl.regenerate(SEED)
    with pytest.raises(ControllerError):
        ctl.finish("save")
    with pytest.raises(ControllerError):
        ctl.finish("discard")
    with pytest.raises(ControllerError):
        ctl.finish("explode")


def run_to_goal(ctl, max_ticks=20000):
    from sonata.driving import plan_goal_trace, publish_trace
    trace = plan_goal_trace(QUIET, SEED, ctl.dt)
    ctl.regenerate(SEED)
    publish_trace(ctl.bus, trace)
    for _ in range(max_ticks):
        ctl.tick()
        if ctl.phase == "reached":
            return
    raise AssertionError("never reached the goal")


def test_reached_then_save_writes_file(tmp_path):
    ctl = controller(data_dir=str(tmp_path), clock=lambda: 1_700_000_000)
    run_to_goal(ctl)
    assert ctl.bus.latest("episode").payload["state"] == "reached"
    with pytest.raises(ControllerError):
        ctl.tick()  # no ticking after the goal
    path = ctl.finish("save", "alice")
    assert ctl.phase == "saved"
    assert path.name == "alice_1700000000.json"
    assert path.exists()
    assert ctl.bus.latest("episode").payload["state"] == "saved"


def test_reached_then_discard_writes_nothing(tmp_path):
    ctl = controller(data_dir=str(tmp_path))
    run_to_goal(ctl)
    assert ctl.finish("discard") is None
    assert ctl.phase == "discarded"
    assert list(tmp_path.iterdir()) == []
    ctl.regenerate(SEED)  # a new run can start afterwards
    assert ctl.phase == "running"


def test_handle_control_regenerate_and_errors():
    ctl = controller()
    ctl.handle_control({"action": "regenerate", "seed": 7})
    assert ctl.phase == "running" and ctl.scene.seed == 7
    n = ctl.bus.length("episode")
    ctl.handle_control({"action": "save"})  # not reached -> error envelope
    env = ctl.bus.latest("episode")
    assert ctl.bus.length("episode") == n + 1
    assert env.payload["state"] == "error"
    assert "save" in env.payload["detail"]
    assert ctl.phase == "running"  # failure does not change phase


def test_handle_control_regenerate_with_ranges():
    ctl = controller()
    ctl.handle_control({"action": "regenerate", "seed": 3,
                        "ranges": {"humans_walking": [2, 2]}})
    walkers = [h for h in ctl.snapshot.humans if h.mobility == "walker"]
    assert len(walkers) == 2


def test_handle_control_bad_ranges_reports_error():
    ctl = controller()
    ctl.regenerate(SEED)
    ctl.handle_control({"action": "regenerate", "ranges": {"tables": [3, 1]}})
    env = ctl.bus.latest("episode")
    assert env.payload["state"] == "error"
    assert ctl.phase == "running"  # old scene still live


def test_session_seed_gives_deterministic_auto_seeds():
    a = controller()
    b = controller()
    a.regenerate()
    b.regenerate()
    assert a.scene.seed == b.scene.seed


def test_episode_metadata():
    ctl = controller(clock=lambda: 123)
    ctl.regenerate(SEED)
    ctl.tick()
    ep = ctl.episode("zoe")
    assert ep.user_id == "zoe"
    assert ep.created_at == 123
    assert ep.seed == SEED
    assert ep.ranges == QUIET.to_dict()
    assert ep.dt == ctl.dt
    assert ep.caps == {"advance": config.ADV_MAX, "lateral": config.LAT_MAX,
                       "rotation": config.ROT_MAX}
    assert ep.mirrored is False
    assert len(ep.steps) == 1


def test_stamps_non_decreasing_across_regenerate():
    ctl = controller()
    ctl.regenerate(SEED)
    for _ in range(5):
        ctl.tick()
    ctl.regenerate(SEED)  # sim time resets; bus must accept stamp 0 again
    ctl.tick()
    robots = ctl.bus.poll("robot", 0)
    stamps = [e.stamp for e in robots]
    assert stamps == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.0, 0.1]
