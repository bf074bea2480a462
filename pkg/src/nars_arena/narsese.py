"""Encoders and decoders for the Narsese event/goal/operation line subset.

Grammar of the lines exchanged with a reasoner::

    belief-event  := TOKEN ". :|:"
    goal-event    := TOKEN "! :|:"
    config        := "*" ...            e.g. "*setopname 1 ^left"
    execution     := ... "^" NAME " executed" ...   (pattern is configurable)
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import List, Optional, Sequence

from .errors import EncodingError, UnknownOpError

GOAL_TOKEN = "G"
BELIEF_SUFFIX = ". :|:"
GOAL_SUFFIX = "! :|:"
DEFAULT_EXECUTION_PATTERN = r"\^(\S+?) executed"
MAX_OPS = 10


class LineKind(enum.Enum):
    BELIEF_EVENT = "belief"
    GOAL_EVENT = "goal"
    EXECUTION = "execution"
    CONFIG = "config"
    OTHER = "other"


@dataclass(frozen=True)
class OpName:
    name: str  # including the leading '^'
    index: int  # 1-based registration index

    @property
    def bare(self) -> str:
        return self.name[1:]


def _check_token(token: str) -> None:
    if not isinstance(token, str) or not token or any(ch.isspace() for ch in token):
        raise EncodingError(f"invalid Narsese token {token!r}")


def encode_state_event(token: str) -> str:
    _check_token(token)
    return token + BELIEF_SUFFIX


def encode_goal_event() -> str:
    """Standing goal line sent every step."""
    return GOAL_TOKEN + GOAL_SUFFIX


def encode_goal_achieved() -> str:
    return GOAL_TOKEN + BELIEF_SUFFIX


def register_ops(names: Sequence[str]) -> List[OpName]:
    if not 1 <= len(names) <= MAX_OPS:
        raise EncodingError(f"between 1 and {MAX_OPS} operations are required, got {len(names)}")
    ops = []
    for i, raw in enumerate(names, start=1):
        name = raw if raw.startswith("^") else "^" + raw
        _check_token(name)
        if len(name) == 1:
            raise EncodingError("empty operation name")
        ops.append(OpName(name, i))
    if len({op.name for op in ops}) != len(ops):
        raise EncodingError(f"duplicate operation names in {list(names)}")
    return ops


def setop_commands(names: Sequence[str]) -> List[str]:
    return [f"*setopname {op.index} {op.name}" for op in register_ops(names)]


def parse_execution(line: str, registered: Sequence[OpName],
                    pattern: str = DEFAULT_EXECUTION_PATTERN) -> Optional[OpName]:
    """Return the registered op executed on ``line``, or None if the line is not an execution.

    ``pattern`` must capture the operation name (without ``^``) in group 1.
    """
    m = re.search(pattern, line)
    if m is None:
        return None
    name = m.group(1)
    if not name.startswith("^"):
        name = "^" + name
    for op in registered:
        if op.name == name:
            return op
    raise UnknownOpError(f"reasoner executed unregistered operation {name}")


def classify_line(line: str, pattern: str = DEFAULT_EXECUTION_PATTERN) -> LineKind:
    text = line.rstrip("\n")
    if text.startswith("*"):
        return LineKind.CONFIG
    if re.search(pattern, text):
        return LineKind.EXECUTION
    if text.endswith(GOAL_SUFFIX) and len(text) > len(GOAL_SUFFIX):
        return LineKind.GOAL_EVENT
    if text.endswith(BELIEF_SUFFIX) and len(text) > len(BELIEF_SUFFIX):
        return LineKind.BELIEF_EVENT
    return LineKind.OTHER


def round_half_away(x: float) -> int:
    """Round to the nearest integer, halves away from zero (2.5 -> 3, -2.5 -> -3)."""
    if not math.isfinite(x):
        raise EncodingError(f"cannot round non-finite value {x}")
    return int(Decimal(repr(x)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _scaled(o1: float, o2: float):
    return round_half_away(100 * o1), round_half_away(1000 * o2)


def flappy_token(o1: float, o2: float) -> str:
    """Narsese token for a FlappyBird observation, e.g. ``138_-4``."""
    a, b = _scaled(o1, o2)
    return f"{a}_{b}"


def flappy_qindex(o1: float, o2: float) -> int:
    """Q-table row for a FlappyBird observation; signs are discarded."""
    a, b = _scaled(o1, o2)
    return abs(a) + abs(b)
