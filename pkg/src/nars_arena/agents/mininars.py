"""A small evidence-based sensorimotor reasoner.

This is a stand-in for an external NARS implementation, not a port of
one.  It keeps one temporal implication ``<(state &/ op) =/> G>`` per
(state, op) pair and tracks its positive and negative evidence:

* a goal event credits every (state, op) executed in the last ``window``
  steps of the episode;
* a policy decision whose window elapses without a goal event is a
  failed anticipation and gets one unit of negative evidence.

Decisions are taken when the best expectation exceeds the decision
threshold; otherwise the agent babbles with ``babble_chance`` or stays
silent.  Babbling therefore fades as soon as confident hypotheses exist.
"""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, Hashable, Iterable, List, Optional, TextIO, Tuple

from ..envs.base import StepResult
from ..errors import ContractViolation, NoEvidenceError
from ..rng import Rng
from .base import Agent, AgentDecision, Source

EVIDENTIAL_HORIZON = 1.0


@dataclass(frozen=True)
class Truth:
    frequency: float
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.frequency <= 1.0 or not 0.0 <= self.confidence < 1.0:
            raise ContractViolation(f"invalid truth value {self}")


@dataclass
class TemporalLink:
    state: Hashable
    action: int
    w_plus: int = 0
    w_minus: int = 0

    @property
    def truth(self) -> Truth:
        return truth_from_evidence(self.w_plus, self.w_minus)


@dataclass(frozen=True)
class MiniNarsConfig:
    ops: Tuple[str, ...] = ()
    babble_chance: float = 0.2
    decision_threshold: float = 0.501
    window: int = 10

    def __post_init__(self):
        if not 0.0 <= self.babble_chance <= 1.0:
            raise ContractViolation("babble_chance must lie in [0, 1]")
        if not 0.5 < self.decision_threshold < 1.0:
            raise ContractViolation("decision_threshold must lie in (0.5, 1)")
        if self.window < 1:
            raise ContractViolation("window must be >= 1")


def truth_from_evidence(w_plus: float, w_minus: float) -> Truth:
    w = w_plus + w_minus
    if w_plus < 0 or w_minus < 0:
        raise ContractViolation("evidence counts must be nonnegative")
    if w <= 0:
        raise NoEvidenceError("no evidence for this link")
    return Truth(w_plus / w, w / (w + EVIDENTIAL_HORIZON))


def expectation(t: Truth) -> float:
    return t.confidence * (t.frequency - 0.5) + 0.5


class LinkTable:
    """Temporal links keyed by (state, action)."""

    def __init__(self):
        self._links: Dict[Tuple[Hashable, int], TemporalLink] = {}

    def __len__(self) -> int:
        return len(self._links)

    def __iter__(self):
        return iter(self._links.values())

    def get(self, state: Hashable, action: int) -> Optional[TemporalLink]:
        return self._links.get((state, action))

    def link(self, state: Hashable, action: int) -> TemporalLink:
        key = (state, action)
        lk = self._links.get(key)
        if lk is None:
            lk = self._links[key] = TemporalLink(state, action)
        return lk

    def expectation(self, state: Hashable, action: int) -> float:
        """Expectation of the link, 0.5 when it is absent or has no evidence."""
        lk = self._links.get((state, action))
        if lk is None or lk.w_plus + lk.w_minus == 0:
            return 0.5
        return expectation(lk.truth)

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["state", "action", "w_plus", "w_minus"])
        for lk in sorted(self._links.values(), key=lambda l: (str(l.state), l.action)):
            w.writerow([lk.state, lk.action, lk.w_plus, lk.w_minus])


def nars_decide(links: LinkTable, s: Hashable, cfg: MiniNarsConfig, rng: Rng) -> AgentDecision:
    n = len(cfg.ops)
    if n == 0:
        raise ContractViolation("no operations registered")
    best, best_e = 0, links.expectation(s, 0)
    for a in range(1, n):
        e = links.expectation(s, a)
        if e > best_e:
            best, best_e = a, e
    if best_e > cfg.decision_threshold:
        return AgentDecision(best, Source.POLICY)
    if rng.bernoulli(cfg.babble_chance):
        return AgentDecision(rng.uniform_below(n), Source.BABBLE)
    return AgentDecision.silent()


@dataclass(frozen=True)
class HistoryEntry:
    state: Hashable
    action: int
    source: Source


def nars_learn(links: LinkTable, history: Deque[HistoryEntry], entry: HistoryEntry,
               goal_event: bool, window: int) -> None:
    """Record one executed step and update evidence in place.

    ``history`` holds the most recent steps of the current episode; it is
    never longer than ``window``.
    """
    if len(history) >= window:
        old = history.popleft()
        if old.source is Source.POLICY:
            links.link(old.state, old.action).w_minus += 1
    history.append(entry)
    if goal_event:
        for h in history:
            links.link(h.state, h.action).w_plus += 1
        history.clear()


class MiniNarsAgent(Agent):
    kind = "mininars"

    def __init__(self, cfg: MiniNarsConfig, rng: Rng,
                 encoder: Optional[Callable[[object], Hashable]] = None):
        if not cfg.ops:
            raise ContractViolation("MiniNarsAgent needs at least one registered op")
        self.cfg = cfg
        self.rng = rng
        self.n_actions = len(cfg.ops)
        self.links = LinkTable()
        self.history: Deque[HistoryEntry] = deque()
        self._encoder = encoder

    def encode(self, observation) -> Hashable:
        return observation if self._encoder is None else self._encoder(observation)

    def begin_episode(self, state) -> None:
        self.history.clear()

    def decide(self, state) -> AgentDecision:
        return nars_decide(self.links, state, self.cfg, self.rng)

    def learn(self, state, action, source, result: StepResult, next_state) -> None:
        nars_learn(self.links, self.history, HistoryEntry(state, action, source),
                   result.success, self.cfg.window)

    def end_episode(self, result: StepResult) -> None:
        self.history.clear()
