"""Tunable constants for the simulator, generator and metrics.

Everything with a unit lives here so experiments can be re-run with the numbers
that produced them. Distances are meters, angles radians, times seconds.
"""

# Simulation step. sim_time is always frame_id * DT (multiplied, never
# accumulated) so long episodes cannot drift.
DT = 0.1

# Robot command caps. Normalized joystick values in [-1, 1] scale to these.
ADV_MAX = 1.0   # m/s, forward/backward
LAT_MAX = 1.0   # m/s, left/right (holonomic base)
ROT_MAX = 1.5   # rad/s, counterclockwise positive

ROBOT_RADIUS = 0.25
HUMAN_RADIUS = 0.25

# Episode ends when robot-goal distance drops below this (strict).
R_GOAL = 0.5

# Scene generation.
ROOM_SIDE_MIN = 6.0
ROOM_SIDE_MAX = 12.0
L_CUT_MIN = 0.3          # corner cut, fraction of the parent side
L_CUT_MAX = 0.6
CLEARANCE = 0.3          # min surface gap between non-interacting footprints
PLACEMENT_ATTEMPTS = 200 # rejection-sampling budget per entity
ROBOT_GOAL_MIN = 2.0     # min spawn distance robot -> goal
REACH_GRID = 0.25        # flood-fill resolution for goal reachability

TABLE_SIDE_MIN, TABLE_SIDE_MAX = 0.7, 1.4
PLANT_SIDE_MIN, PLANT_SIDE_MAX = 0.25, 0.4
LAPTOP_SIDE_X, LAPTOP_SIDE_Y = 0.35, 0.25

# Interaction geometry (center distances).
TALK_DIST_MIN, TALK_DIST_MAX = 0.8, 1.5
LAPTOP_DIST_MIN, LAPTOP_DIST_MAX = 0.5, 1.0
GROUP_OFFSET = 0.8       # side-by-side spacing inside a walking pair

# Walker behavior.
WALK_SPEED_MIN, WALK_SPEED_MAX = 0.3, 0.8
WALK_TURN_MAX = 1.5      # rad/s toward the waypoint
WAYPOINT_REACHED = 0.3   # waypoint considered reached under this distance
WAYPOINT_CLEARANCE = 0.4 # waypoints keep this far from walls
HALT_GAP = 0.4           # walkers freeze when an obstacle surface is this close ahead

# Social compliance thresholds (report only, nothing is enforced).
PERSONAL_SPACE = 0.9     # personal-space violation under this distance
INTERACTION_SPACE = 0.4  # crossing an interaction: distance to the pair segment
SPEED_LIMIT = 0.6        # speeding when faster than this near a human
SPEED_NEAR = 1.5         # ... with a human within this distance

# Feature normalization.
FEATURE_DIST_DIVISOR = 6.0    # linear map, D
FEATURE_TIME_CAP = 100.0      # seconds; time feature saturates at 1
FEATURE_STEP_CAP = 1000.0     # steps; step feature saturates at 1
FEATURE_COUNT_DIVISOR = 10.0  # room entity counts
FEATURE_AREA_DIVISOR = 100.0  # room area, m^2
