from .base import Env, EnvId, EnvKind, EnvModel, Outcome, StepResult, TabularEnv
from .flappy import FlappyBird, FlappyPhysics, FlappyState, Pipe, flappy_observe
from .gridworld import CliffWalking, FrozenLake, LAKE_MAPS, grid_index, slip_directions
from .model import enumerate_model, make_env, reachable_states, terminal_reachable_from_all
from .taxi import TAXI_MAP, Taxi, taxi_decode, taxi_encode

ALL_ENV_IDS = (
    EnvId(EnvKind.CLIFF_WALKING),
    EnvId(EnvKind.TAXI),
    EnvId(EnvKind.FROZEN_LAKE_4X4),
    EnvId(EnvKind.FROZEN_LAKE_4X4, slippery=True),
    EnvId(EnvKind.FROZEN_LAKE_8X8),
    EnvId(EnvKind.FROZEN_LAKE_8X8, slippery=True),
    EnvId(EnvKind.FLAPPY_BIRD),
)

TABULAR_ENV_IDS = tuple(e for e in ALL_ENV_IDS if e.tabular)

ACTION_NAMES = {
    EnvKind.CLIFF_WALKING: ("up", "right", "down", "left"),
    EnvKind.TAXI: ("south", "north", "east", "west", "pickup", "dropoff"),
    EnvKind.FROZEN_LAKE_4X4: ("left", "down", "right", "up"),
    EnvKind.FROZEN_LAKE_8X8: ("left", "down", "right", "up"),
    EnvKind.FLAPPY_BIRD: ("idle", "flap"),
}
