from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Hashable, Optional

from ..envs.base import StepResult
from ..errors import ContractViolation
from ..rng import Rng


class Source(str, enum.Enum):
    POLICY = "policy"
    EXPLORE = "explore"
    BABBLE = "babble"
    SILENT = "silent"
    FALLBACK = "fallback"  # assigned by the harness, never by an agent

    def __str__(self) -> str:
        return self.value

    @property
    def random(self) -> bool:
        return self is not Source.POLICY


@dataclass(frozen=True)
class AgentDecision:
    action: Optional[int]
    source: Source

    def __post_init__(self):
        if (self.source is Source.SILENT) != (self.action is None):
            raise ContractViolation("a decision is silent exactly when it carries no action")

    @classmethod
    def silent(cls) -> AgentDecision:
        return cls(None, Source.SILENT)


class Agent:
    """Decision interface driven by the harness.

    ``state`` arguments are the agent-side encoding of an observation
    (see :meth:`encode`).
    """

    kind = "agent"
    n_actions: int

    def encode(self, observation: Any) -> Hashable:
        return observation

    def begin_episode(self, state: Hashable) -> None:
        pass

    def decide(self, state: Hashable) -> AgentDecision:
        raise NotImplementedError

    def learn(self, state: Hashable, action: int, source: Source,
              result: StepResult, next_state: Hashable) -> None:
        pass

    def end_episode(self, result: StepResult) -> None:
        pass

    @property
    def epsilon(self) -> Optional[float]:
        return None

    def close(self) -> None:
        pass


class RandomAgent(Agent):
    """Uniform-random baseline."""

    kind = "random"

    def __init__(self, n_actions: int, rng: Rng):
        self.n_actions = n_actions
        self.rng = rng

    def decide(self, state) -> AgentDecision:
        return AgentDecision(self.rng.uniform_below(self.n_actions), Source.EXPLORE)
