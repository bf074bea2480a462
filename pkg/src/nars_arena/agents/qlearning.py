"""Tabular Q-learning with an exponentially decaying epsilon-greedy policy."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterator, List, Optional, TextIO, Tuple

from ..envs.base import StepResult
from ..errors import ContractViolation
from ..rng import Rng
from .base import Agent, AgentDecision, Source


@dataclass(frozen=True)
class QLearningConfig:
    alpha: float = 0.7
    gamma: float = 0.618
    eps_max: float = 1.0
    eps_min: float = 0.01
    decay: float = 0.01

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ContractViolation(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 <= self.gamma < 1:
            raise ContractViolation(f"gamma must be in [0, 1), got {self.gamma}")
        if not 0 <= self.eps_min <= self.eps_max <= 1:
            raise ContractViolation("need 0 <= eps_min <= eps_max <= 1")
        if self.decay < 0:
            raise ContractViolation("decay must be nonnegative")


class QTable:
    """State x action value table, zero initialised.

    With ``n_states=None`` rows are created on first access, which is how
    the unbounded FlappyBird index space is handled.
    """

    def __init__(self, n_states: Optional[int], n_actions: int):
        if n_actions < 1:
            raise ContractViolation("n_actions must be >= 1")
        self.n_states = n_states
        self.n_actions = n_actions
        if n_states is None:
            self._rows: Dict[int, List[float]] = {}
        else:
            self._dense = [[0.0] * n_actions for _ in range(n_states)]

    @property
    def growable(self) -> bool:
        return self.n_states is None

    def row(self, s: int) -> List[float]:
        if self.n_states is None:
            r = self._rows.get(s)
            if r is None:
                if not isinstance(s, int) or s < 0:
                    raise ContractViolation(f"state {s!r} is not a nonnegative index")
                r = self._rows[s] = [0.0] * self.n_actions
            return r
        if not 0 <= s < self.n_states:
            raise ContractViolation(f"state {s} outside [0, {self.n_states})")
        return self._dense[s]

    def __getitem__(self, key: Tuple[int, int]) -> float:
        s, a = key
        return self.row(s)[a]

    def __setitem__(self, key: Tuple[int, int], value: float) -> None:
        s, a = key
        if not 0 <= a < self.n_actions:
            raise ContractViolation(f"action {a} outside [0, {self.n_actions})")
        self.row(s)[a] = value

    def states(self) -> List[int]:
        if self.n_states is None:
            return sorted(self._rows)
        return list(range(self.n_states))

    def items(self) -> Iterator[Tuple[int, int, float]]:
        for s in self.states():
            for a, v in enumerate(self.row(s)):
                yield s, a, v

    def greedy(self, s: int) -> int:
        return argmax(self.row(s))

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["state", "action", "value"])
        for s, a, v in self.items():
            w.writerow([s, a, repr(v)])

    @classmethod
    def read_csv(cls, fh: TextIO, n_states: Optional[int], n_actions: int) -> QTable:
        table = cls(n_states, n_actions)
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["state", "action", "value"]:
            raise ContractViolation(f"unexpected Q-table header {reader.fieldnames}")
        for rec in reader:
            v = float(rec["value"])
            if not math.isfinite(v):
                raise ContractViolation("Q-table values must be finite")
            table[int(rec["state"]), int(rec["action"])] = v
        return table


def argmax(values: List[float]) -> int:
    """Index of the largest value; ties go to the lowest index."""
    best, best_v = 0, values[0]
    for i in range(1, len(values)):
        if values[i] > best_v:
            best, best_v = i, values[i]
    return best


def epsilon_at(cfg: QLearningConfig, episode: int) -> float:
    """Exploration rate after ``episode`` completed episodes."""
    return cfg.eps_min + (cfg.eps_max - cfg.eps_min) * math.exp(-cfg.decay * episode)


def q_update(table: QTable, s: int, a: int, r: float, s_next: int, terminal: bool,
             cfg: QLearningConfig) -> float:
    """Watkins update of Q(s, a); the bootstrap term is dropped for terminal transitions."""
    if not math.isfinite(r):
        raise ContractViolation(f"reward must be finite, got {r}")
    target = r if terminal else r + cfg.gamma * max(table.row(s_next))
    row = table.row(s)
    row[a] = row[a] + cfg.alpha * (target - row[a])
    return row[a]


def select_action_q(table: QTable, s: int, eps: float, rng: Rng) -> AgentDecision:
    if rng.uniform_real() < eps:
        return AgentDecision(rng.uniform_below(table.n_actions), Source.EXPLORE)
    return AgentDecision(table.greedy(s), Source.POLICY)


class QLearningAgent(Agent):
    kind = "qlearning"

    def __init__(self, n_states: Optional[int], n_actions: int, rng: Rng,
                 cfg: QLearningConfig = QLearningConfig(),
                 encoder: Optional[Callable[[object], int]] = None):
        self.cfg = cfg
        self.rng = rng
        self.n_actions = n_actions
        self.table = QTable(n_states, n_actions)
        self.episodes_done = 0
        self._encoder = encoder

    def encode(self, observation) -> int:
        return observation if self._encoder is None else self._encoder(observation)

    @property
    def epsilon(self) -> float:
        return epsilon_at(self.cfg, self.episodes_done)

    def decide(self, state: int) -> AgentDecision:
        return select_action_q(self.table, state, self.epsilon, self.rng)

    def learn(self, state, action, source, result: StepResult, next_state) -> None:
        q_update(self.table, state, action, result.reward, next_state, result.terminated, self.cfg)

    def end_episode(self, result: StepResult) -> None:
        self.episodes_done += 1
