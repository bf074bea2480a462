from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Set

from ..errors import UnsupportedEnvironment
from .base import Env, EnvId, EnvKind, EnvModel, TabularEnv
from .flappy import FlappyBird
from .gridworld import CliffWalking, FrozenLake
from .taxi import Taxi


def make_env(env_id: EnvId, step_limit: Optional[int] = None) -> Env:
    if env_id.kind is EnvKind.CLIFF_WALKING:
        return CliffWalking(env_id, step_limit)
    if env_id.kind is EnvKind.TAXI:
        return Taxi(env_id, step_limit)
    if env_id.kind is EnvKind.FLAPPY_BIRD:
        return FlappyBird(env_id, step_limit)
    return FrozenLake(env_id, step_limit)


def enumerate_model(env_id: EnvId) -> EnvModel:
    env = make_env(env_id)
    if not isinstance(env, TabularEnv):
        raise UnsupportedEnvironment(f"{env_id.name} has no finite transition model")
    outcomes = [[list(env.outcomes(s, a)) for a in range(env.n_actions)]
                for s in range(env.n_states)]
    return EnvModel(env_id, env.n_states, env.n_actions, outcomes, list(env.initial_states()))


def reachable_states(model: EnvModel, starts: Optional[Iterable[int]] = None) -> Set[int]:
    """States observable in some episode: BFS that does not expand past terminal outcomes."""
    frontier = deque(model.initial_states if starts is None else starts)
    seen = set(frontier)
    expanded = set()
    while frontier:
        s = frontier.popleft()
        if s in expanded:
            continue
        expanded.add(s)
        for a in range(model.n_actions):
            for o in model.outcomes[s][a]:
                if o.next_state not in seen:
                    seen.add(o.next_state)
                    if not o.terminated:
                        frontier.append(o.next_state)
    return seen


def terminal_reachable_from_all(model: EnvModel) -> bool:
    """True when every state has at least one action sequence that can end the episode."""
    preds = [set() for _ in range(model.n_states)]
    goal_side = set()
    for s in range(model.n_states):
        for a in range(model.n_actions):
            for o in model.outcomes[s][a]:
                if o.terminated:
                    goal_side.add(s)
                else:
                    preds[o.next_state].add(s)
    seen = set(goal_side)
    frontier = deque(goal_side)
    while frontier:
        s = frontier.popleft()
        for p in preds[s]:
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return len(seen) == model.n_states
