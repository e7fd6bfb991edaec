"""Navigation simulator, feature coding, and preference-conditioned
Q-learning."""

from .features import FeatureMap
from .policy import LinearQPolicy, PolicyFormatError
from .sim import (
    DT_S,
    GAMMA,
    MAX_STEPS,
    N_ACTIONS,
    N_RAYS,
    V_MAX,
    NavEnv,
    Observation,
    Outcome,
    SimulationError,
    action_velocity,
)
from .train import TrainConfig, TrainingDivergence, TrainStats, td_train, train_policy
from .world import (
    BoxObstacle,
    CircleObstacle,
    Human,
    Region,
    Scenario,
    ScenarioError,
    World,
    bundled_scenario_names,
    load_scenario,
    parse_scenario,
)

__all__ = [
    "DT_S", "GAMMA", "MAX_STEPS", "N_ACTIONS", "N_RAYS", "V_MAX",
    "NavEnv", "Observation", "Outcome", "SimulationError", "action_velocity",
    "FeatureMap", "LinearQPolicy", "PolicyFormatError",
    "TrainConfig", "TrainingDivergence", "TrainStats", "td_train", "train_policy",
    "BoxObstacle", "CircleObstacle", "Human", "Region", "Scenario",
    "ScenarioError", "World", "bundled_scenario_names", "load_scenario",
    "parse_scenario",
]
