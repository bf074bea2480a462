"""Value iteration over an enumerated model, and greedy policy rollouts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

from ..envs import EnvId, EnvModel, TabularEnv, make_env, terminal_reachable_from_all
from ..errors import ContractViolation, OracleError
from ..rng import STREAM_ENV, Rng

MAX_SWEEPS = 10 ** 6


def _q_values(model: EnvModel, values: List[float], s: int, discount: float) -> List[float]:
    qs = []
    for a in range(model.n_actions):
        total = 0.0
        for o in model.outcomes[s][a]:
            v = o.reward if o.terminated else o.reward + discount * values[o.next_state]
            total += float(o.prob) * v
        qs.append(total)
    return qs


def _argmax(qs: List[float]) -> int:
    best = 0
    for i in range(1, len(qs)):
        if qs[i] > qs[best]:
            best = i
    return best


def value_iteration(model: EnvModel, discount: float = 1.0, tol: float = 1e-10,
                    max_sweeps: int = MAX_SWEEPS) -> Tuple[List[float], List[int]]:
    """Optimal state values and the greedy policy (ties to the lowest action).

    Terminal outcomes contribute their reward only.  ``discount == 1`` is
    accepted when every state can reach termination.
    """
    if not 0 < discount <= 1:
        raise ContractViolation(f"discount must be in (0, 1], got {discount}")
    if discount == 1 and not terminal_reachable_from_all(model):
        raise ContractViolation("undiscounted value iteration needs termination reachable from every state")
    values = [0.0] * model.n_states
    for _ in range(max_sweeps):
        new = [max(_q_values(model, values, s, discount)) for s in range(model.n_states)]
        delta = max(abs(a - b) for a, b in zip(new, values))
        values = new
        if delta < tol:
            break
    else:
        raise OracleError(f"value iteration did not converge within {max_sweeps} sweeps")
    policy = [_argmax(_q_values(model, values, s, discount)) for s in range(model.n_states)]
    if discount == 1:
        policy = _proper_policy(model, values, policy)
    return values, policy


def _proper_policy(model: EnvModel, values: List[float], fallback: List[int]) -> List[int]:
    """Among value-optimal actions pick, per state, the lowest index that makes progress.

    Without discounting, ties between optimal actions are common (every
    FrozenLake state worth 1 is tied with standing still), so plain argmax
    can loop forever.  States are layered by how many optimal steps they
    need to reach termination; each state takes the lowest optimal action
    with an outcome in a lower layer.
    """
    optimal = []
    for s in range(model.n_states):
        qs = _q_values(model, values, s, 1.0)
        best = max(qs)
        slack = 1e-9 * max(1.0, abs(best))
        optimal.append([a for a, q in enumerate(qs) if q >= best - slack])
    policy = list(fallback)
    layered = set()
    changed = True
    while changed:
        changed = False
        frontier = set()
        for s in range(model.n_states):
            if s in layered:
                continue
            for a in optimal[s]:
                if any(o.terminated or o.next_state in layered for o in model.outcomes[s][a]):
                    policy[s] = a
                    frontier.add(s)
                    break
        if frontier:
            layered |= frontier
            changed = True
    return policy


def start_value(model: EnvModel, values: Sequence[float]) -> float:
    """Value of the initial-state distribution (uniform over ``model.initial_states``)."""
    starts = model.initial_states
    return sum(values[s] for s in starts) / len(starts)


@dataclass
class EvalResult:
    mean_return: float
    success_rate: float
    returns: List[float] = field(default_factory=list)
    start_states: list = field(default_factory=list)

    def __iter__(self):
        yield self.mean_return
        yield self.success_rate


Policy = Union[Sequence[int], Callable[[object], int]]


def evaluate_policy(env: EnvId, policy: Policy, episodes: int, seed: int = 1,
                    step_limit: Optional[int] = None) -> EvalResult:
    """Roll out ``policy`` greedily for ``episodes`` episodes without learning."""
    act = policy if callable(policy) else policy.__getitem__
    e = make_env(env, step_limit)
    rng = Rng.substream(seed, STREAM_ENV)
    returns, starts, wins = [], [], 0
    for _ in range(episodes):
        res = e.reset(rng)
        starts.append(res.observation)
        total, success = 0.0, False
        while not res.done:
            res = e.step(int(act(res.observation)), rng)
            total += res.reward
            success = success or res.success
        returns.append(total)
        wins += success
    n = max(episodes, 1)
    return EvalResult(sum(returns) / n, wins / n, returns, starts)
