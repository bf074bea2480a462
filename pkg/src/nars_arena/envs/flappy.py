"""A minimal deterministic Flappy Bird.

Units are screen pixels of a 288x512 playfield and time advances in
ticks.  The bird's vertical position is the centre of its 24x24 box.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from ..rng import Rng
from .base import Env, EnvId, EnvKind


@dataclass(frozen=True)
class FlappyPhysics:
    width: float = 288.0
    height: float = 512.0
    ground_y: float = 400.0
    bird_x: float = 57.0
    bird_size: float = 24.0
    start_y: float = 200.0
    gravity: float = 1.0
    max_fall_speed: float = 10.0
    flap_velocity: float = -9.0
    pipe_speed: float = 4.0
    pipe_width: float = 52.0
    pipe_spacing: float = 144.0
    first_pipe_x: float = 488.0
    gap_height: float = 100.0
    hole_min: int = 150
    hole_max: int = 350


@dataclass
class Pipe:
    x: float
    hole_y: float
    passed: bool = False


@dataclass
class FlappyState:
    bird_y: float
    velocity: float
    pipes: List[Pipe] = field(default_factory=list)
    tick: int = 0
    score: int = 0
    bird_x: float = 57.0


def next_pipe(state: FlappyState, physics: FlappyPhysics = FlappyPhysics()) -> Pipe:
    """First pipe whose trailing edge is still ahead of the bird's left edge."""
    for pipe in state.pipes:
        if pipe.x + physics.pipe_width >= state.bird_x:
            return pipe
    raise ValueError("no pipe ahead of the bird")


def flappy_observe(state: FlappyState, physics: FlappyPhysics = FlappyPhysics()) -> Tuple[float, float]:
    """Normalized (horizontal distance to next pipe, bird height minus hole height).

    While the bird is between a pipe's edges the distance is clamped at 0.
    """
    pipe = next_pipe(state, physics)
    o1 = max(pipe.x - state.bird_x, 0.0) / physics.width
    o2 = (state.bird_y - pipe.hole_y) / physics.height
    return o1, o2


class FlappyBird(Env):
    n_actions = 2  # 0 do nothing, 1 flap
    n_states = None
    reward_set = frozenset({1.0})
    default_step_limit = 10000

    def __init__(self, env_id: Optional[EnvId] = None, step_limit: Optional[int] = None,
                 physics: FlappyPhysics = FlappyPhysics()):
        super().__init__(env_id or EnvId(EnvKind.FLAPPY_BIRD), step_limit)
        self.physics = physics
        self.state: Optional[FlappyState] = None

    def _hole(self, rng: Rng) -> float:
        p = self.physics
        return float(p.hole_min + rng.uniform_below(p.hole_max - p.hole_min + 1))

    def _reset(self, rng: Rng):
        p = self.physics
        pipes = [Pipe(p.first_pipe_x, self._hole(rng)),
                 Pipe(p.first_pipe_x + p.pipe_spacing, self._hole(rng))]
        self.state = FlappyState(p.start_y, 0.0, pipes, bird_x=p.bird_x)
        return flappy_observe(self.state, p)

    def collided(self) -> bool:
        p, st = self.physics, self.state
        half = p.bird_size / 2
        top, bottom = st.bird_y - half, st.bird_y + half
        if top < 0 or bottom > p.ground_y:
            return True
        left, right = st.bird_x, st.bird_x + p.bird_size
        for pipe in st.pipes:
            if pipe.x < right and pipe.x + p.pipe_width > left:
                gap_top = pipe.hole_y - p.gap_height / 2
                gap_bottom = pipe.hole_y + p.gap_height / 2
                if top < gap_top or bottom > gap_bottom:
                    return True
        return False

    def _transition(self, action: int, rng: Rng):
        p, st = self.physics, self.state
        if action == 1:
            st.velocity = p.flap_velocity
        else:
            st.velocity = min(st.velocity + p.gravity, p.max_fall_speed)
        st.bird_y += st.velocity
        for pipe in st.pipes:
            pipe.x -= p.pipe_speed
        passed = False
        for pipe in st.pipes:
            if not pipe.passed and pipe.x + p.pipe_width < st.bird_x:
                pipe.passed = True
                st.score += 1
                passed = True
        if st.pipes and st.pipes[0].x + p.pipe_width < 0:
            st.pipes.pop(0)
        while st.pipes[-1].x <= p.first_pipe_x:
            st.pipes.append(Pipe(st.pipes[-1].x + p.pipe_spacing, self._hole(rng)))
        st.tick += 1
        dead = self.collided()
        return flappy_observe(st, p), 1.0, dead, passed

    def snapshot(self) -> FlappyState:
        st = self.state
        return replace(st, pipes=[replace(pp) for pp in st.pipes])
