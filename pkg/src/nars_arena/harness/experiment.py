from __future__ import annotations

import hashlib
import io
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Hashable, Iterable, List, Optional, TextIO, Tuple

from ..agents import (
    Agent,
    MiniNarsAgent,
    MiniNarsConfig,
    QLearningAgent,
    QLearningConfig,
    RandomAgent,
    Source,
)
from ..envs import ACTION_NAMES, Env, EnvId, EnvKind, make_env
from ..errors import ConfigError
from ..narsese import DEFAULT_EXECUTION_PATTERN, flappy_qindex, flappy_token
from ..rng import STREAM_AGENT, STREAM_ENV, STREAM_FALLBACK, Rng

log = logging.getLogger(__name__)

AGENT_KINDS = ("qlearning", "mininars", "bridge", "random")

STEP_HEADER = ("time_step", "episode", "state", "action", "source", "reward",
               "terminated", "truncated", "success", "epsilon")
EPISODE_HEADER = ("episode", "length", "return", "success", "epsilon_at_start")


@dataclass(frozen=True)
class BridgeSettings:
    command: str = ""
    deadline_ms: float = 100.0
    pattern: str = DEFAULT_EXECUTION_PATTERN
    # "{n_ops}" is replaced by the number of registered operations
    babbling: Optional[str] = "*babblingops={n_ops}"


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvId
    agent: str = "qlearning"
    total_steps: int = 100000
    seed: int = 1
    step_limit: Optional[int] = None
    q: QLearningConfig = QLearningConfig()
    nars: MiniNarsConfig = MiniNarsConfig()
    bridge: BridgeSettings = BridgeSettings()
    out_dir: Optional[Path] = None

    def __post_init__(self):
        if self.total_steps < 1:
            raise ConfigError("total_steps must be >= 1")
        if self.agent not in AGENT_KINDS:
            raise ConfigError(f"unknown agent kind {self.agent!r}; expected one of {AGENT_KINDS}")


@dataclass(frozen=True)
class StepRecord:
    __slots__ = ("time_step", "episode", "state", "action", "source", "reward",
                 "terminated", "truncated", "success", "epsilon")
    time_step: int
    episode: int
    state: Hashable
    action: int
    source: Source
    reward: float
    terminated: bool
    truncated: bool
    success: bool
    epsilon: Optional[float]

    @property
    def random(self) -> bool:
        return self.source is not Source.POLICY

    @property
    def episode_end(self) -> bool:
        return self.terminated or self.truncated

    def csv_row(self) -> str:
        eps = "" if self.epsilon is None else repr(self.epsilon)
        return (f"{self.time_step},{self.episode},{self.state},{self.action},{self.source.value},"
                f"{fmt_num(self.reward)},{int(self.terminated)},{int(self.truncated)},"
                f"{int(self.success)},{eps}")


@dataclass
class EpisodeSummary:
    episode: int
    length: int = 0
    ret: float = 0.0
    success: bool = False
    epsilon_at_start: Optional[float] = None
    complete: bool = False

    def csv_row(self) -> str:
        eps = "" if self.epsilon_at_start is None else repr(self.epsilon_at_start)
        return f"{self.episode},{self.length},{fmt_num(self.ret)},{int(self.success)},{eps}"


@dataclass
class MetricsLog:
    records: List[StepRecord] = field(default_factory=list)
    episodes: List[EpisodeSummary] = field(default_factory=list)
    agent: Optional[Agent] = field(default=None, repr=False, compare=False)

    @property
    def total_steps(self) -> int:
        return len(self.records)

    def write_steps_csv(self, fh: TextIO) -> None:
        fh.write(",".join(STEP_HEADER) + "\n")
        for rec in self.records:
            fh.write(rec.csv_row() + "\n")

    def write_episodes_csv(self, fh: TextIO) -> None:
        fh.write(",".join(EPISODE_HEADER) + "\n")
        for ep in self.episodes:
            fh.write(ep.csv_row() + "\n")

    def steps_csv(self) -> str:
        buf = io.StringIO()
        self.write_steps_csv(buf)
        return buf.getvalue()

    def episodes_csv(self) -> str:
        buf = io.StringIO()
        self.write_episodes_csv(buf)
        return buf.getvalue()

    def steps_sha256(self) -> str:
        return hashlib.sha256(self.steps_csv().encode("utf-8")).hexdigest()


def fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def state_label(env_id: EnvId, observation) -> Hashable:
    """Observation as written to the step log: the index, or the token for FlappyBird."""
    if env_id.kind is EnvKind.FLAPPY_BIRD:
        return flappy_token(*observation)
    return observation


def build_agent(cfg: ExperimentConfig, env: Env, rng: Rng) -> Agent:
    flappy = cfg.env.kind is EnvKind.FLAPPY_BIRD
    ops = ACTION_NAMES[cfg.env.kind]
    if cfg.agent == "qlearning":
        encoder = (lambda obs: flappy_qindex(*obs)) if flappy else None
        return QLearningAgent(env.n_states, env.n_actions, rng, cfg.q, encoder)
    if cfg.agent == "mininars":
        encoder = (lambda obs: flappy_token(*obs)) if flappy else None
        nars_cfg = cfg.nars if cfg.nars.ops else replace(cfg.nars, ops=tuple(ops))
        return MiniNarsAgent(nars_cfg, rng, encoder)
    if cfg.agent == "bridge":
        from ..bridge import BridgeAgent, BridgeConfig

        if not cfg.bridge.command:
            raise ConfigError("the bridge agent needs bridge.command")
        babbling = cfg.bridge.babbling.format(n_ops=len(ops)) if cfg.bridge.babbling else None
        transcript = Path(cfg.out_dir) / "transcript.tsv" if cfg.out_dir else None
        bcfg = BridgeConfig(cfg.bridge.command, ops, cfg.bridge.deadline_ms, cfg.bridge.pattern,
                            babbling, transcript_path=transcript)
        token = (lambda obs: flappy_token(*obs)) if flappy else (lambda obs: f"s{obs}")
        return BridgeAgent(bcfg, token)
    return RandomAgent(env.n_actions, rng)


def run_experiment(cfg: ExperimentConfig, agent: Optional[Agent] = None) -> MetricsLog:
    """Run ``cfg.total_steps`` environment steps and return the full trace.

    Silent decisions are replaced by a uniform action from the fallback
    stream.  Episodes are numbered from 1; the agent sees ``end_episode``
    before the next reset, which is when the Q-learner's epsilon moves.
    """
    env = make_env(cfg.env, cfg.step_limit)
    env_rng = Rng.substream(cfg.seed, STREAM_ENV)
    fallback_rng = Rng.substream(cfg.seed, STREAM_FALLBACK)
    if agent is None:
        agent = build_agent(cfg, env, Rng.substream(cfg.seed, STREAM_AGENT))
    if agent.n_actions != env.n_actions:
        agent.close()
        raise ConfigError(f"agent has {agent.n_actions} actions but {cfg.env.name} has {env.n_actions}")

    mlog = MetricsLog(agent=agent)
    records = mlog.records
    n_actions = env.n_actions
    try:
        res = env.reset(env_rng)
        obs = res.observation
        state = agent.encode(obs)
        agent.begin_episode(state)
        episode = EpisodeSummary(1, epsilon_at_start=agent.epsilon)
        for t in range(1, cfg.total_steps + 1):
            eps = agent.epsilon
            decision = agent.decide(state)
            if decision.action is None:
                action, source = fallback_rng.uniform_below(n_actions), Source.FALLBACK
            else:
                action, source = decision.action, decision.source
            res = env.step(action, env_rng)
            next_state = agent.encode(res.observation)
            agent.learn(state, action, source, res, next_state)
            records.append(StepRecord(t, episode.episode, state_label(cfg.env, obs), action, source,
                                      res.reward, res.terminated, res.truncated, res.success, eps))
            episode.length += 1
            episode.ret += res.reward
            episode.success = episode.success or res.success
            if res.done:
                agent.end_episode(res)
                episode.complete = True
                mlog.episodes.append(episode)
                res = env.reset(env_rng)
                obs = res.observation
                state = agent.encode(obs)
                agent.begin_episode(state)
                episode = EpisodeSummary(episode.episode + 1, epsilon_at_start=agent.epsilon)
            else:
                obs, state = res.observation, next_state
        if episode.length:
            mlog.episodes.append(episode)
    finally:
        agent.close()
    log.info("%s/%s: %d steps, %d episodes", cfg.env.name, cfg.agent, len(records), len(mlog.episodes))
    return mlog


def write_outputs(cfg: ExperimentConfig, mlog: MetricsLog, out_dir: Path) -> List[Path]:
    """Write steps.csv, episodes.csv and manifest.json; returns the paths written."""
    import json

    from .. import __version__

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    steps_path = out_dir / "steps.csv"
    episodes_path = out_dir / "episodes.csv"
    manifest_path = out_dir / "manifest.json"
    steps_text = mlog.steps_csv()
    steps_path.write_text(steps_text, encoding="utf-8", newline="\n")
    episodes_path.write_text(mlog.episodes_csv(), encoding="utf-8", newline="\n")
    manifest = {
        "version": __version__,
        "seed": cfg.seed,
        "config": config_echo(cfg),
        "steps_sha256": hashlib.sha256(steps_text.encode("utf-8")).hexdigest(),
        "total_steps": mlog.total_steps,
        "episodes": len(mlog.episodes),
        "successful_episodes": sum(e.success for e in mlog.episodes),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return [steps_path, episodes_path, manifest_path]


def config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "env": cfg.env.name,
        "agent": cfg.agent,
        "steps": cfg.total_steps,
        "seed": cfg.seed,
        "step_limit": cfg.step_limit,
        "q": vars(cfg.q).copy(),
        "nars": {"babble_chance": cfg.nars.babble_chance,
                 "decision_threshold": cfg.nars.decision_threshold,
                 "window": cfg.nars.window},
        "bridge": vars(cfg.bridge).copy() if cfg.agent == "bridge" else None,
    }
