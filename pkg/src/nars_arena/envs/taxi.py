"""Taxi on the classic 5x5 map with walls."""
from __future__ import annotations

from typing import List, Optional, Tuple

from ..errors import ContractViolation
from .base import ONE, EnvId, EnvKind, Outcome, TabularEnv

# ':' is an open passage, '|' a wall between two cells.
TAXI_MAP = (
    "+---------+",
    "|R: | : :G|",
    "| : | : : |",
    "| : : : : |",
    "| | : | : |",
    "|Y| : |B: |",
    "+---------+",
)

# R, G, Y, B
LOCATIONS = ((0, 0), (0, 4), (4, 0), (4, 3))
IN_TAXI = 4

SOUTH, NORTH, EAST, WEST, PICKUP, DROPOFF = range(6)


def taxi_encode(taxi_row: int, taxi_col: int, passenger_location: int, destination: int) -> int:
    if not (0 <= taxi_row < 5 and 0 <= taxi_col < 5 and 0 <= passenger_location < 5
            and 0 <= destination < 4):
        raise ContractViolation(
            f"taxi state ({taxi_row}, {taxi_col}, {passenger_location}, {destination}) out of range")
    return ((taxi_row * 5 + taxi_col) * 5 + passenger_location) * 4 + destination


def taxi_decode(state: int) -> Tuple[int, int, int, int]:
    if not 0 <= state < 500:
        raise ContractViolation(f"taxi state index {state} outside [0, 500)")
    state, destination = divmod(state, 4)
    state, passenger = divmod(state, 5)
    row, col = divmod(state, 5)
    return row, col, passenger, destination


class Taxi(TabularEnv):
    n_actions = 6
    n_states = 500
    reward_set = frozenset({-1.0, -10.0, 20.0})
    default_step_limit = 200

    def __init__(self, env_id: Optional[EnvId] = None, step_limit: Optional[int] = None):
        super().__init__(env_id or EnvId(EnvKind.TAXI), step_limit)
        self._table = [[self._outcomes(s, a) for a in range(6)] for s in range(500)]
        self._starts = [
            taxi_encode(r, c, p, d)
            for r in range(5) for c in range(5) for p in range(4) for d in range(4) if p != d
        ]

    @staticmethod
    def _open(row: int, col: int, side: int) -> bool:
        """Whether the taxi can leave cell (row, col) east (side=+1) or west (side=-1)."""
        return TAXI_MAP[1 + row][2 * col + 1 + side] == ":"

    def _outcomes(self, state: int, action: int) -> List[Outcome]:
        row, col, passenger, dest = taxi_decode(state)
        reward = -1.0
        terminated = False
        if action == SOUTH:
            row = min(row + 1, 4)
        elif action == NORTH:
            row = max(row - 1, 0)
        elif action == EAST:
            if self._open(row, col, +1):
                col += 1
        elif action == WEST:
            if self._open(row, col, -1):
                col -= 1
        elif action == PICKUP:
            if passenger < IN_TAXI and (row, col) == LOCATIONS[passenger]:
                passenger = IN_TAXI
            else:
                reward = -10.0
        elif action == DROPOFF:
            if passenger == IN_TAXI and (row, col) == LOCATIONS[dest]:
                passenger = dest
                reward = 20.0
                terminated = True
            elif passenger == IN_TAXI and (row, col) in LOCATIONS:
                passenger = LOCATIONS.index((row, col))
            else:
                reward = -10.0
        nxt = taxi_encode(row, col, passenger, dest)
        return [Outcome(nxt, ONE, reward, terminated, terminated)]

    def outcomes(self, state: int, action: int) -> List[Outcome]:
        return self._table[state][action]

    def initial_states(self) -> List[int]:
        return self._starts
