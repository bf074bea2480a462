"""Learning-curve series derived from a step log.

Every figure family is a pure function of the per-step records, so the
plots can be regenerated from ``steps.csv`` alone.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from ..agents import Source
from .experiment import STEP_HEADER, StepRecord

Series = Tuple[List[float], List[float]]


def read_steps_csv(fh: TextIO) -> List[StepRecord]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != STEP_HEADER:
        raise ValueError(f"not a step log: header {header}")
    out = []
    for row in reader:
        if not row:
            continue
        t, ep, state, action, source, reward, term, trunc, succ, eps = row
        out.append(StepRecord(int(t), int(ep), state, int(action), Source(source), float(reward),
                              term == "1", trunc == "1", succ == "1",
                              float(eps) if eps else None))
    return out


@dataclass
class Cumulative:
    """Running counters aligned with the step records (index i = after step i+1)."""

    random: List[int]
    nonrandom: List[int]
    successes: List[int]
    episodes_done: List[int]


def cumulative(records: Sequence[StepRecord]) -> Cumulative:
    rnd, non, succ, done = [], [], [], []
    r = n = s = d = 0
    ep_success = False
    for rec in records:
        if rec.random:
            r += 1
        else:
            n += 1
        ep_success = ep_success or rec.success
        if rec.episode_end:
            d += 1
            if ep_success:
                s += 1
            ep_success = False
        rnd.append(r)
        non.append(n)
        succ.append(s)
        done.append(d)
    return Cumulative(rnd, non, succ, done)


def _episode_ends(records: Sequence[StepRecord]) -> List[int]:
    return [i for i, rec in enumerate(records) if rec.episode_end]


def reward_vs_steps(records) -> Series:
    ends = _episode_ends(records)
    return [records[i].time_step for i in ends], [records[i].reward for i in ends]


def reward_vs_episodes(records) -> Series:
    ends = _episode_ends(records)
    return [records[i].episode for i in ends], [records[i].reward for i in ends]


def successes_vs_steps(records) -> Series:
    c = cumulative(records)
    return [r.time_step for r in records], c.successes


def successes_vs_episodes(records) -> Series:
    c = cumulative(records)
    ends = _episode_ends(records)
    return [records[i].episode for i in ends], [c.successes[i] for i in ends]


def epsilon_vs_steps(records) -> Series:
    pts = [(r.time_step, r.epsilon) for r in records if r.epsilon is not None]
    return [p[0] for p in pts], [p[1] for p in pts]


def epsilon_vs_episodes(records) -> Series:
    xs, ys = [], []
    last = None
    for r in records:
        if r.episode != last and r.epsilon is not None:
            xs.append(r.episode)
            ys.append(r.epsilon)
        last = r.episode
    return xs, ys


def random_vs_steps(records) -> Series:
    return [r.time_step for r in records], cumulative(records).random


def random_vs_episodes(records) -> Series:
    c = cumulative(records)
    ends = _episode_ends(records)
    return [records[i].episode for i in ends], [c.random[i] for i in ends]


def nonrandom_vs_steps(records) -> Series:
    return [r.time_step for r in records], cumulative(records).nonrandom


def nonrandom_vs_episodes(records) -> Series:
    c = cumulative(records)
    ends = _episode_ends(records)
    return [records[i].episode for i in ends], [c.nonrandom[i] for i in ends]


def episodes_vs_steps(records) -> Series:
    return [r.time_step for r in records], [r.episode for r in records]


def _lengths(records):
    ends, start = [], 0
    for i, rec in enumerate(records):
        if rec.episode_end:
            ends.append((rec.time_step, rec.episode, i + 1 - start))
            start = i + 1
    return ends


def length_vs_steps(records) -> Series:
    ends = _lengths(records)
    return [e[0] for e in ends], [e[2] for e in ends]


def length_vs_episodes(records) -> Series:
    ends = _lengths(records)
    return [e[1] for e in ends], [e[2] for e in ends]


def cumulative_length_vs_episodes(records) -> Series:
    xs, ys, total = [], [], 0
    for _, episode, length in _lengths(records):
        total += length
        xs.append(episode)
        ys.append(total)
    return xs, ys


@dataclass(frozen=True)
class Family:
    name: str
    title: str
    xlabel: str
    ylabel: str
    series: Callable[[Sequence[StepRecord]], Series]


FAMILIES: Dict[str, Family] = {f.name: f for f in (
    Family("reward-vs-steps", "Reward vs. Time steps", "Time steps", "Reward", reward_vs_steps),
    Family("reward-vs-episodes", "Reward vs. Episodes", "Episodes", "Reward", reward_vs_episodes),
    Family("cumulative-successes-vs-steps", "Cumulative Successful Episodes vs. Time steps",
           "Time steps", "Cumulative successful episodes", successes_vs_steps),
    Family("cumulative-successes-vs-episodes", "Cumulative Successful Episodes vs. Episodes",
           "Episodes", "Cumulative successful episodes", successes_vs_episodes),
    Family("epsilon-vs-steps", "Epsilon vs. Time steps", "Time steps", "Epsilon", epsilon_vs_steps),
    Family("epsilon-vs-episodes", "Epsilon vs. Episodes", "Episodes", "Epsilon", epsilon_vs_episodes),
    Family("cumulative-random-vs-steps", "Cumulative Random Action vs. Time steps",
           "Time steps", "Cumulative random actions", random_vs_steps),
    Family("cumulative-random-vs-episodes", "Cumulative Random Action vs. Episodes",
           "Episodes", "Cumulative random actions", random_vs_episodes),
    Family("cumulative-nonrandom-vs-steps", "Cumulative Non-Random Action vs. Time steps",
           "Time steps", "Cumulative non-random actions", nonrandom_vs_steps),
    Family("cumulative-nonrandom-vs-episodes", "Cumulative Non-Random Action vs. Episodes",
           "Episodes", "Cumulative non-random actions", nonrandom_vs_episodes),
    Family("episodes-vs-steps", "Episodes vs. Time steps", "Time steps", "Episode",
           episodes_vs_steps),
    Family("episode-length-vs-steps", "Episode Length vs. Time steps", "Time steps",
           "Episode length", length_vs_steps),
    Family("episode-length-vs-episodes", "Episode Length vs. Episodes", "Episodes",
           "Episode length", length_vs_episodes),
    Family("cumulative-episode-length-vs-episodes", "Cumulative Episode Length vs. Episodes",
           "Episodes", "Cumulative episode length", cumulative_length_vs_episodes),
)}
