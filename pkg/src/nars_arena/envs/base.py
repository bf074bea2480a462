from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, TextIO, Tuple

from ..errors import ContractViolation, UsageError
from ..rng import Rng


class EnvKind(enum.Enum):
    CLIFF_WALKING = "cliffwalking"
    TAXI = "taxi"
    FROZEN_LAKE_4X4 = "frozenlake4x4"
    FROZEN_LAKE_8X8 = "frozenlake8x8"
    FLAPPY_BIRD = "flappybird"


@dataclass(frozen=True)
class EnvId:
    kind: EnvKind
    slippery: bool = False

    def __post_init__(self):
        if self.slippery and self.kind not in (EnvKind.FROZEN_LAKE_4X4, EnvKind.FROZEN_LAKE_8X8):
            raise ContractViolation(f"{self.kind.value} has no slippery variant")

    @property
    def name(self) -> str:
        return self.kind.value + ("-slippery" if self.slippery else "")

    @property
    def tabular(self) -> bool:
        return self.kind is not EnvKind.FLAPPY_BIRD

    @classmethod
    def parse(cls, text: str, slippery: bool = False) -> EnvId:
        """Parse names such as ``taxi``, ``frozenlake8x8`` or ``frozenlake4x4-slippery``."""
        key = text.strip().lower().replace("_", "")
        if key.endswith("-slippery"):
            key = key[: -len("-slippery")]
            slippery = True
        aliases = {"cliffwalking-v0": "cliffwalking", "taxi-v3": "taxi", "flappybird-v0": "flappybird"}
        key = aliases.get(key, key)
        try:
            kind = EnvKind(key)
        except ValueError:
            raise ContractViolation(f"unknown environment {text!r}") from None
        return cls(kind, slippery)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class StepResult:
    """One environment transition (or the initial observation after reset)."""

    observation: Any
    reward: float = 0.0
    terminated: bool = False
    truncated: bool = False
    success: bool = False

    def __post_init__(self):
        if self.terminated and self.truncated:
            raise ContractViolation("a transition cannot be both terminated and truncated")

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated


@dataclass(frozen=True)
class Outcome:
    next_state: int
    prob: Fraction
    reward: float
    terminated: bool
    success: bool


@dataclass
class EnvModel:
    """Exhaustive ``(state, action) -> outcomes`` table of a tabular environment."""

    env: EnvId
    n_states: int
    n_actions: int
    outcomes: List[List[List[Outcome]]] = field(repr=False)
    initial_states: List[int] = field(default_factory=list)

    def __getitem__(self, key: Tuple[int, int]) -> List[Outcome]:
        s, a = key
        return self.outcomes[s][a]

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["state", "action", "next_state", "prob_num", "prob_den",
                         "reward", "terminated", "success"])
        for s in range(self.n_states):
            for a in range(self.n_actions):
                for o in self.outcomes[s][a]:
                    writer.writerow([s, a, o.next_state, o.prob.numerator, o.prob.denominator,
                                     _fmt_reward(o.reward), int(o.terminated), int(o.success)])


def _fmt_reward(r: float) -> str:
    return str(int(r)) if float(r).is_integer() else repr(float(r))


class Env:
    """Common episode bookkeeping: action checks, step limit, done flag.

    Subclasses implement ``_reset`` and ``_transition``; the latter returns
    ``(observation, reward, terminated, success)``.
    """

    n_actions: int = 0
    n_states: Optional[int] = None
    default_step_limit: int = 10000

    def __init__(self, env_id: EnvId, step_limit: Optional[int] = None):
        self.env_id = env_id
        self.step_limit = self.default_step_limit if step_limit is None else step_limit
        if self.step_limit < 1:
            raise ContractViolation("step_limit must be >= 1")
        self.elapsed = 0
        self._done = True
        self._started = False

    def reset(self, rng: Rng) -> StepResult:
        self.elapsed = 0
        self._done = False
        self._started = True
        return StepResult(self._reset(rng))

    def step(self, action: int, rng: Rng) -> StepResult:
        if not isinstance(action, int) or not 0 <= action < self.n_actions:
            raise ContractViolation(
                f"action {action!r} outside {self.env_id.name} action space [0, {self.n_actions})")
        if not self._started:
            raise UsageError("step() called before reset()")
        if self._done:
            raise UsageError("step() called on a finished episode; call reset() first")
        obs, reward, terminated, success = self._transition(action, rng)
        self.elapsed += 1
        truncated = not terminated and self.elapsed >= self.step_limit
        self._done = terminated or truncated
        return StepResult(obs, float(reward), terminated, truncated, success)

    @property
    def done(self) -> bool:
        return self._done

    def _reset(self, rng: Rng):
        raise NotImplementedError

    def _transition(self, action: int, rng: Rng):
        raise NotImplementedError


class TabularEnv(Env):
    """Environment whose dynamics are fully described by ``outcomes``.

    ``step`` samples from exactly the same outcome list that
    :func:`enumerate_model` exports, so the two cannot drift apart.
    """

    reward_set: frozenset = frozenset()

    def __init__(self, env_id: EnvId, step_limit: Optional[int] = None):
        super().__init__(env_id, step_limit)
        self.state = 0

    def set_state(self, state: int) -> None:
        """Place the agent in ``state`` and open a fresh episode (used by rollouts and tests)."""
        if not 0 <= state < self.n_states:
            raise ContractViolation(f"state {state} outside [0, {self.n_states})")
        self.state = state
        self.elapsed = 0
        self._done = False
        self._started = True

    def outcomes(self, state: int, action: int) -> List[Outcome]:
        raise NotImplementedError

    def initial_states(self) -> List[int]:
        raise NotImplementedError

    def _reset(self, rng: Rng) -> int:
        starts = self.initial_states()
        self.state = starts[0] if len(starts) == 1 else starts[rng.uniform_below(len(starts))]
        return self.state

    def _transition(self, action: int, rng: Rng):
        outs = self.outcomes(self.state, action)
        o = outs[0] if len(outs) == 1 else outs[rng.uniform_below(len(outs))]
        self.state = o.next_state
        return o.next_state, o.reward, o.terminated, o.success


ONE = Fraction(1)
THIRD = Fraction(1, 3)
