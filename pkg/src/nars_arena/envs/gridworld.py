"""CliffWalking and FrozenLake on rectangular grids."""
from __future__ import annotations

from typing import List, Optional

from ..errors import ContractViolation
from .base import ONE, THIRD, EnvId, EnvKind, Outcome, TabularEnv


def grid_index(row: int, col: int, ncols: int) -> int:
    """Flattened observation index of a grid cell."""
    if row < 0 or not 0 <= col < ncols:
        raise ContractViolation(f"cell ({row}, {col}) outside a grid with {ncols} columns")
    return row * ncols + col


CLIFF_MAP = (
    "oooooooooooo",
    "oooooooooooo",
    "oooooooooooo",
    "SCCCCCCCCCCG",
)

# CliffWalking actions: 0 up, 1 right, 2 down, 3 left
CLIFF_MOVES = ((-1, 0), (0, 1), (1, 0), (0, -1))


class CliffWalking(TabularEnv):
    """4x12 grid; stepping onto the cliff costs -100 and teleports back to the start.

    The episode only terminates at the goal.  Cliff contact is not an
    episode end.
    """

    n_actions = 4
    n_states = 48
    nrows, ncols = 4, 12
    start = 36
    goal = 47
    cliff = frozenset(range(37, 47))
    reward_set = frozenset({-1.0, -100.0})
    default_step_limit = 10000

    def __init__(self, env_id: Optional[EnvId] = None, step_limit: Optional[int] = None):
        super().__init__(env_id or EnvId(EnvKind.CLIFF_WALKING), step_limit)
        self._table = [[self._outcomes(s, a) for a in range(4)] for s in range(48)]

    def _outcomes(self, state: int, action: int) -> List[Outcome]:
        row, col = divmod(state, self.ncols)
        dr, dc = CLIFF_MOVES[action]
        row = min(max(row + dr, 0), self.nrows - 1)
        col = min(max(col + dc, 0), self.ncols - 1)
        nxt = grid_index(row, col, self.ncols)
        if nxt in self.cliff:
            return [Outcome(self.start, ONE, -100.0, False, False)]
        if nxt == self.goal:
            return [Outcome(nxt, ONE, -1.0, True, True)]
        return [Outcome(nxt, ONE, -1.0, False, False)]

    def outcomes(self, state: int, action: int) -> List[Outcome]:
        return self._table[state][action]

    def initial_states(self) -> List[int]:
        return [self.start]


# FrozenLake actions: 0 left, 1 down, 2 right, 3 up
LAKE_MOVES = ((0, -1), (1, 0), (0, 1), (-1, 0))

LAKE_MAPS = {
    EnvKind.FROZEN_LAKE_4X4: (
        "SFFF",
        "FHFH",
        "FFFH",
        "HFFG",
    ),
    EnvKind.FROZEN_LAKE_8X8: (
        "SFFFFFFF",
        "FFFFFFFF",
        "FFFHFFFF",
        "FFFFFHFF",
        "FFFHFFFF",
        "FHHFFFHF",
        "FHFFHFHF",
        "FFFHFFFG",
    ),
}

LAKE_STEP_LIMITS = {EnvKind.FROZEN_LAKE_4X4: 100, EnvKind.FROZEN_LAKE_8X8: 200}


def slip_directions(action: int) -> List[int]:
    """Directions a slippery move may take: counter-clockwise neighbour, intended, clockwise neighbour."""
    return [(action - 1) % 4, action, (action + 1) % 4]


class FrozenLake(TabularEnv):
    """Preloaded 4x4 or 8x8 lake, optionally slippery.

    Rows of hole and goal cells are filled in with the ordinary movement
    rule so that every ``(state, action)`` has the same outcome count; an
    episode never steps from those cells because entering one terminates.
    """

    n_actions = 4
    reward_set = frozenset({0.0, 1.0})

    def __init__(self, env_id: EnvId, step_limit: Optional[int] = None):
        if env_id.kind not in LAKE_MAPS:
            raise ContractViolation(f"{env_id.kind.value} is not a FrozenLake map")
        self.default_step_limit = LAKE_STEP_LIMITS[env_id.kind]
        super().__init__(env_id, step_limit)
        self.desc = LAKE_MAPS[env_id.kind]
        self.nrows = len(self.desc)
        self.ncols = len(self.desc[0])
        self.n_states = self.nrows * self.ncols
        self.slippery = env_id.slippery
        self._table = [[self._outcomes(s, a) for a in range(4)] for s in range(self.n_states)]

    def cell(self, state: int) -> str:
        row, col = divmod(state, self.ncols)
        return self.desc[row][col]

    def _move(self, state: int, direction: int) -> int:
        row, col = divmod(state, self.ncols)
        dr, dc = LAKE_MOVES[direction]
        row = min(max(row + dr, 0), self.nrows - 1)
        col = min(max(col + dc, 0), self.ncols - 1)
        return grid_index(row, col, self.ncols)

    def _outcome(self, state: int, direction: int, prob) -> Outcome:
        nxt = self._move(state, direction)
        letter = self.cell(nxt)
        goal = letter == "G"
        return Outcome(nxt, prob, 1.0 if goal else 0.0, letter in "GH", goal)

    def _outcomes(self, state: int, action: int) -> List[Outcome]:
        if not self.slippery:
            return [self._outcome(state, action, ONE)]
        return [self._outcome(state, d, THIRD) for d in slip_directions(action)]

    def outcomes(self, state: int, action: int) -> List[Outcome]:
        return self._table[state][action]

    def initial_states(self) -> List[int]:
        return [0]
