"""Social-navigation dataset toolkit: a deterministic 2D crowd simulator, a
teleoperation recorder and a temporal scene-graph exporter.

Typical flow: generate a randomized room scene from a seed, drive the robot to
the goal (live over WebSocket or from a scripted trace), save the episode as
canonical JSON, then mirror-augment and export graph samples for training.
"""

__version__ = "0.1.0"

from .bus import Envelope, SchemaError, TopicBus, decode_envelope, encode_envelope
from .controller import ControllerError, EpisodeController
from .driving import DriveError, JoyEvent, drive, plan_goal_trace
from .graph import (GraphSample, assemble_window, build_frame_graph,
                    episode_to_samples, export_graph_dataset, featurize_node,
                    load_graph_dataset)
from .recorder import (Episode, EpisodeError, EpisodeStep, compliance_report,
                       load_episode, mirror_episode, validate_episode,
                       write_episode)
from .rng import SplitMix64
from .scenegen import (GenerationRanges, RangesError, Scene,
                       SceneGenerationError, generate_scene)
from .world import (Command, Goal, Human, Interaction, Pose2D, Room,
                    SceneObject, Velocity2D, Wall, WorldSnapshot, angle_wrap,
                    goal_reached, step_robot)

__all__ = [name for name in dir() if not name.startswith("_")]
