"""Drive an external NARS-style reasoner over its stdin/stdout line protocol.

Per environment step the session writes, in order, the achievement event
``G. :|:`` (only after a success), the state event and the standing goal
``G! :|:``, then waits until the deadline for an operation execution.
"""
from __future__ import annotations

import logging
import queue
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable, List, NamedTuple, Optional, Sequence, Union

from .agents.base import Agent, AgentDecision, Source
from .envs.base import StepResult
from .errors import BrokenSessionError, ConfigError, SpawnError, UnknownOpError
from .narsese import (
    DEFAULT_EXECUTION_PATTERN,
    encode_goal_achieved,
    encode_goal_event,
    encode_state_event,
    parse_execution,
    register_ops,
    setop_commands,
)

log = logging.getLogger(__name__)

SENT = "SENT"
RECV = "RECV"
_EOF = object()


@dataclass
class BridgeConfig:
    command: Union[str, Sequence[str]]
    ops: Sequence[str]
    deadline_ms: float = 100.0
    execution_pattern: str = DEFAULT_EXECUTION_PATTERN
    babbling: Optional[str] = None
    extra_lines: Sequence[str] = ()
    transcript_path: Optional[Path] = None

    def __post_init__(self):
        if self.deadline_ms <= 0:
            raise ConfigError("bridge deadline must be positive")
        if not self.ops:
            raise ConfigError("bridge needs a non-empty op list")

    @property
    def argv(self) -> List[str]:
        if isinstance(self.command, str):
            return shlex.split(self.command)
        return list(self.command)


class TranscriptEntry(NamedTuple):
    direction: str
    step: int
    line: str
    timestamp: float

    def format(self) -> str:
        return f"{self.direction}\t{self.step}\t{self.line}"


class BridgeSession:
    def __init__(self, proc: subprocess.Popen, cfg: BridgeConfig):
        self.proc = proc
        self.cfg = cfg
        self.ops = register_ops(cfg.ops)
        self.step = 0
        self.transcript: List[TranscriptEntry] = []
        self.deadline_misses = 0
        self._lines: "queue.Queue" = queue.Queue()
        self._stderr: List[str] = []
        self._eof = False
        self._closed = False
        self._reader = threading.Thread(target=self._pump, args=(proc.stdout, self._lines),
                                         daemon=True)
        self._reader.start()
        self._err_reader = threading.Thread(target=self._collect_stderr, daemon=True)
        self._err_reader.start()

    # reader side

    @staticmethod
    def _pump(stream, out: "queue.Queue") -> None:
        try:
            for raw in stream:
                out.put((time.monotonic(), raw.rstrip("\r\n")))
        except (OSError, ValueError):
            pass
        out.put((time.monotonic(), _EOF))

    def _collect_stderr(self) -> None:
        if self.proc.stderr is None:
            return
        try:
            for raw in self.proc.stderr:
                self._stderr.append(raw.rstrip("\n"))
                del self._stderr[:-50]
        except (OSError, ValueError):
            pass

    def diagnostics(self) -> str:
        return "\n".join(self._stderr[-20:])

    # writer side

    def _record(self, direction: str, line: str) -> None:
        self.transcript.append(TranscriptEntry(direction, self.step, line, time.monotonic()))

    def send(self, line: str) -> None:
        if self._eof or self.proc.poll() is not None:
            raise BrokenSessionError(f"reasoner exited (code {self.proc.poll()})\n{self.diagnostics()}")
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as exc:
            raise BrokenSessionError(f"cannot write to reasoner: {exc}\n{self.diagnostics()}") from exc
        self._record(SENT, line)

    def _drain_stale(self) -> None:
        while True:
            try:
                _, line = self._lines.get_nowait()
            except queue.Empty:
                return
            if line is _EOF:
                self._eof = True
                return
            self._record(RECV, line)
            log.debug("discarding stale reasoner line %r", line)

    def step_exchange(self, state_token: str, goal_achieved: bool) -> AgentDecision:
        """Send one observation and return the reasoner's decision (silent on deadline)."""
        if self._closed:
            raise BrokenSessionError("session already shut down")
        self._drain_stale()
        if self._eof:
            raise BrokenSessionError(f"reasoner closed its output\n{self.diagnostics()}")
        self.step += 1
        sent_at = time.monotonic()
        if goal_achieved:
            self.send(encode_goal_achieved())
        self.send(encode_state_event(state_token))
        self.send(encode_goal_event())

        deadline = sent_at + self.cfg.deadline_ms / 1000.0
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            try:
                ts, line = self._lines.get(timeout=remaining)
            except queue.Empty:
                break
            if line is _EOF:
                self._eof = True
                raise BrokenSessionError(
                    f"reasoner exited during step {self.step} (code {self.proc.poll()})\n"
                    f"{self.diagnostics()}")
            self._record(RECV, line)
            if ts < sent_at:
                continue
            try:
                op = parse_execution(line, self.ops, self.cfg.execution_pattern)
            except UnknownOpError:
                log.warning("step %d: reasoner executed an unregistered op: %r", self.step, line)
                continue
            if op is not None:
                return AgentDecision(op.index - 1, Source.POLICY)
        self.deadline_misses += 1
        return AgentDecision.silent()

    def shutdown(self) -> List[TranscriptEntry]:
        if not self._closed:
            self._closed = True
            try:
                if self.proc.stdin and not self.proc.stdin.closed:
                    self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                self.proc.terminate()
                try:
                    self.proc.wait(timeout=1.0)
                except subprocess.TimeoutExpired:
                    self.proc.kill()
                    self.proc.wait()
            self._reader.join(timeout=1.0)
            self._drain_stale()
        if self.cfg.transcript_path is not None:
            write_transcript(self.transcript, self.cfg.transcript_path)
        return self.transcript


def write_transcript(entries: Sequence[TranscriptEntry], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in entries:
            fh.write(e.format() + "\n")


def read_transcript(path: Path) -> List[TranscriptEntry]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            direction, step, line = raw.rstrip("\n").split("\t", 2)
            out.append(TranscriptEntry(direction, int(step), line, 0.0))
    return out


def spawn(cfg: BridgeConfig) -> BridgeSession:
    argv = cfg.argv
    if not argv:
        raise SpawnError("empty reasoner command")
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
            text=True, encoding="utf-8", bufsize=1,
        )
    except OSError as exc:
        raise SpawnError(f"cannot launch {argv!r}: {exc}") from exc
    session = BridgeSession(proc, cfg)
    try:
        for line in setop_commands(cfg.ops):
            session.send(line)
        if cfg.babbling:
            session.send(cfg.babbling)
        for line in cfg.extra_lines:
            session.send(line)
    except BrokenSessionError as exc:
        session.shutdown()
        raise SpawnError(f"reasoner {argv!r} died during setup: {exc}") from exc
    return session


class BridgeAgent(Agent):
    """Agent backed by an external reasoner; silent steps fall back to the harness."""

    kind = "bridge"

    def __init__(self, cfg: BridgeConfig, token: Callable[[object], str]):
        self.cfg = cfg
        self.n_actions = len(cfg.ops)
        self._token = token
        self._goal_pending = False
        self.session = spawn(cfg)

    def encode(self, observation) -> Hashable:
        return self._token(observation)

    def decide(self, state) -> AgentDecision:
        goal, self._goal_pending = self._goal_pending, False
        return self.session.step_exchange(state, goal)

    def learn(self, state, action, source, result: StepResult, next_state) -> None:
        if result.success:
            self._goal_pending = True

    def close(self) -> None:
        self.session.shutdown()
