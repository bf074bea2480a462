from fractions import Fraction

import pytest

from nars_arena.envs import (
    ALL_ENV_IDS,
    TABULAR_ENV_IDS,
    CliffWalking,
    EnvId,
    EnvKind,
    FlappyBird,
    FlappyState,
    Pipe,
    StepResult,
    enumerate_model,
    flappy_observe,
    grid_index,
    make_env,
    reachable_states,
    slip_directions,
    taxi_decode,
    taxi_encode,
)
from nars_arena.envs.taxi import IN_TAXI, LOCATIONS
from nars_arena.errors import ContractViolation, UnsupportedEnvironment, UsageError
from nars_arena.rng import Rng

CLIFF = EnvId(EnvKind.CLIFF_WALKING)
TAXI = EnvId(EnvKind.TAXI)
FL4 = EnvId(EnvKind.FROZEN_LAKE_4X4)
FL4S = EnvId(EnvKind.FROZEN_LAKE_4X4, slippery=True)
FL8 = EnvId(EnvKind.FROZEN_LAKE_8X8)
FLAPPY = EnvId(EnvKind.FLAPPY_BIRD)


# -- encodings ---------------------------------------------------------------

@pytest.mark.parametrize("args,expected", [((3, 3, 4), 15), ((0, 0, 12), 0), ((3, 11, 12), 47)])
def test_grid_index(args, expected):
    assert grid_index(*args) == expected


@pytest.mark.parametrize("args", [(-1, 0, 4), (0, 4, 4), (0, -1, 4)])
def test_grid_index_rejects_out_of_range(args):
    with pytest.raises(ContractViolation):
        grid_index(*args)


@pytest.mark.parametrize("args,expected", [((0, 0, 0, 1), 1), ((0, 0, 0, 0), 0), ((4, 4, 4, 3), 499)])
def test_taxi_encode(args, expected):
    assert taxi_encode(*args) == expected


def test_taxi_encode_is_a_bijection():
    codes = {taxi_encode(r, c, p, d) for r in range(5) for c in range(5) for p in range(5) for d in range(4)}
    assert codes == set(range(500))
    for s in range(500):
        assert taxi_encode(*taxi_decode(s)) == s


@pytest.mark.parametrize("args", [(5, 0, 0, 0), (0, 5, 0, 0), (0, 0, 5, 0), (0, 0, 0, 4), (-1, 0, 0, 0)])
def test_taxi_encode_rejects_out_of_range(args):
    with pytest.raises(ContractViolation):
        taxi_encode(*args)


def test_env_id_parse():
    assert EnvId.parse("FrozenLake4x4-slippery") == FL4S
    assert EnvId.parse("taxi") == TAXI
    with pytest.raises(ContractViolation):
        EnvId.parse("pong")
    with pytest.raises(ContractViolation):
        EnvId(EnvKind.TAXI, slippery=True)


def test_action_and_observation_space_sizes():
    sizes = {e.kind: (make_env(e).n_actions, make_env(e).n_states) for e in ALL_ENV_IDS}
    assert sizes[EnvKind.CLIFF_WALKING] == (4, 48)
    assert sizes[EnvKind.TAXI] == (6, 500)
    assert sizes[EnvKind.FROZEN_LAKE_4X4] == (4, 16)
    assert sizes[EnvKind.FROZEN_LAKE_8X8] == (4, 64)
    assert sizes[EnvKind.FLAPPY_BIRD] == (2, None)


# -- reset / step examples ----------------------------------------------------

def test_reset_fixed_starts():
    assert make_env(CLIFF).reset(Rng(1)) == StepResult(36)
    assert make_env(FL4).reset(Rng(1)).observation == 0
    assert make_env(FL8).reset(Rng(1)).observation == 0


def test_taxi_reset_is_random_and_valid():
    env, rng = make_env(TAXI), Rng(1)
    seen = set()
    for _ in range(500):
        res = env.reset(rng)
        row, col, pas, dest = taxi_decode(res.observation)
        assert pas != dest and pas != IN_TAXI
        assert (res.reward, res.terminated, res.truncated) == (0.0, False, False)
        seen.add(res.observation)
    assert len(seen) > 200


def test_cliff_step_into_cliff_returns_to_start():
    env = make_env(CLIFF)
    env.reset(Rng(1))
    assert env.step(1, Rng(1)) == StepResult(36, -100.0, False, False, False)


def test_cliff_step_up():
    env = make_env(CLIFF)
    env.reset(Rng(1))
    assert env.step(0, Rng(1)) == StepResult(24, -1.0, False, False, False)


def test_frozenlake_goal():
    env = make_env(FL4)
    env.set_state(14)
    assert env.step(2, Rng(1)) == StepResult(15, 1.0, True, False, True)


def test_frozenlake_hole_terminates_without_success():
    env = make_env(FL4)
    env.set_state(4)
    res = env.step(2, Rng(1))  # (1,0) -> (1,1) is a hole
    assert res == StepResult(5, 0.0, True, False, False)


def test_taxi_illegal_pickup_and_delivery():
    env, rng = make_env(TAXI), Rng(1)
    env.set_state(taxi_encode(2, 2, 0, 1))
    assert env.step(4, rng).reward == -10.0
    env.set_state(taxi_encode(0, 4, IN_TAXI, 1))
    res = env.step(5, rng)
    assert (res.reward, res.terminated, res.success) == (20.0, True, True)
    assert taxi_decode(res.observation) == (0, 4, 1, 1)


def test_taxi_walls():
    env, rng = make_env(TAXI), Rng(1)
    env.set_state(taxi_encode(0, 1, 0, 1))
    assert taxi_decode(env.step(2, rng).observation)[:2] == (0, 1)  # wall east of (0, 1)
    env.set_state(taxi_encode(2, 1, 0, 1))
    assert taxi_decode(env.step(2, rng).observation)[:2] == (2, 2)


def test_step_errors():
    env = make_env(FL4)
    with pytest.raises(UsageError):
        env.step(0, Rng(1))  # before reset
    env.reset(Rng(1))
    with pytest.raises(ContractViolation):
        env.step(4, Rng(1))
    with pytest.raises(ContractViolation):
        env.step(-1, Rng(1))
    env.set_state(14)
    env.step(2, Rng(1))
    with pytest.raises(UsageError):
        env.step(0, Rng(1))


def test_step_limits_truncate():
    env, rng = make_env(FL4), Rng(1)
    env.reset(rng)
    results = [env.step(0, rng) for _ in range(100)]  # LEFT at the start never moves
    assert not any(r.done for r in results[:-1])
    assert results[-1].truncated and not results[-1].terminated
    assert make_env(TAXI).step_limit == 200
    assert make_env(FL8).step_limit == 200
    assert make_env(CLIFF).step_limit == 10000


def test_step_result_invariant():
    with pytest.raises(ContractViolation):
        StepResult(0, 0.0, True, True)


# -- model ----------------------------------------------------------------------

def test_slippery_example_at_start():
    model = enumerate_model(FL4S)
    outs = model[0, 0]  # LEFT from the start cell
    assert [o.prob for o in outs] == [Fraction(1, 3)] * 3
    # up clamps in place, left clamps in place, down moves to row 1
    assert [o.next_state for o in outs] == [0, 0, 4]


def test_slip_directions_exclude_opposite():
    for a in range(4):
        assert set(slip_directions(a)) == {a, (a + 1) % 4, (a + 3) % 4}
        assert (a + 2) % 4 not in slip_directions(a)


@pytest.mark.parametrize("env_id", TABULAR_ENV_IDS, ids=str)
def test_model_probabilities_sum_to_one(env_id):
    model = enumerate_model(env_id)
    for s in range(model.n_states):
        for a in range(model.n_actions):
            outs = model[s, a]
            assert sum(o.prob for o in outs) == 1
            assert all(o.prob.denominator in (1, 3) for o in outs)
            assert len(outs) == (3 if env_id.slippery else 1)
            assert all(not o.success or o.terminated for o in outs)


def test_taxi_model_shape_and_rewards():
    model = enumerate_model(TAXI)
    assert (model.n_states, model.n_actions) == (500, 6)
    rewards = {o.reward for s in range(500) for a in range(6) for o in model[s, a]}
    assert rewards == {-1.0, -10.0, 20.0}


def test_enumerate_model_rejects_flappy():
    with pytest.raises(UnsupportedEnvironment):
        enumerate_model(FLAPPY)


def test_taxi_reachable_states():
    model = enumerate_model(TAXI)
    reach = reachable_states(model)
    assert len(reach) == 404
    post_success = [s for s in reach if taxi_decode(s)[2] == taxi_decode(s)[3]]
    assert len(post_success) == 4
    for s in post_success:
        row, col, pas, dest = taxi_decode(s)
        assert (row, col) == LOCATIONS[dest]


def test_cliff_reachable_states():
    model = enumerate_model(CLIFF)
    reach = reachable_states(model)
    non_terminal = reach - {47}
    assert len(non_terminal) == 37
    assert non_terminal == set(range(36)) | {36}


def test_model_csv_export():
    import io

    buf = io.StringIO()
    enumerate_model(FL4S).write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "state,action,next_state,prob_num,prob_den,reward,terminated,success"
    assert len(lines) == 1 + 16 * 4 * 3
    assert lines[1] == "0,0,0,1,3,0,0,0"


# -- sampling against the model ----------------------------------------------------

@pytest.mark.parametrize("env_id", TABULAR_ENV_IDS, ids=str)
def test_rewards_in_documented_set(env_id):
    env, rng = make_env(env_id), Rng(5)
    res = env.reset(rng)
    for _ in range(3000):
        res = env.step(rng.uniform_below(env.n_actions), rng)
        assert res.reward in env.reward_set
        if env_id.kind is EnvKind.CLIFF_WALKING and not res.terminated:
            assert res.observation not in CliffWalking.cliff | {CliffWalking.goal}
        if res.done:
            res = env.reset(rng)


def test_deterministic_steps_match_model_exactly():
    for env_id in (CLIFF, TAXI, FL4, FL8):
        env, model, rng = make_env(env_id), enumerate_model(env_id), Rng(11)
        for s in range(0, model.n_states, 7):
            for a in range(model.n_actions):
                env.set_state(s)
                res = env.step(a, rng)
                (o,) = model[s, a]
                assert (res.observation, res.reward, res.terminated, res.success) == \
                    (o.next_state, o.reward, o.terminated, o.success)


def test_slippery_8x8_sampling_matches_model():
    env_id = EnvId(EnvKind.FROZEN_LAKE_8X8, slippery=True)
    env, model, rng = make_env(env_id), enumerate_model(env_id), Rng(1)
    n = 30000
    for s, a in [(9, 1), (27, 2)]:
        counts = {}
        for _ in range(n):
            env.set_state(s)
            nxt = env.step(a, rng).observation
            counts[nxt] = counts.get(nxt, 0) + 1
        expected = {}
        for o in model[s, a]:
            expected[o.next_state] = expected.get(o.next_state, 0) + float(o.prob)
        assert set(counts) == set(expected)
        for k, p in expected.items():
            assert abs(counts[k] / n - p) <= 0.02


def test_same_seed_same_trace():
    def trace(env_id):
        env, rng, act = make_env(env_id), Rng(9), Rng(10)
        out = [env.reset(rng)]
        for _ in range(500):
            res = env.step(act.uniform_below(env.n_actions), rng)
            out.append(res)
            if res.done:
                out.append(env.reset(rng))
        return out

    for env_id in ALL_ENV_IDS:
        assert trace(env_id) == trace(env_id)


# -- FlappyBird -------------------------------------------------------------------

def test_flappy_observe_examples():
    st = FlappyState(bird_y=250.0, velocity=0.0, pipes=[Pipe(57.0, 250.0)])
    assert flappy_observe(st) == (0.0, 0.0)
    st = FlappyState(bird_y=248.0, velocity=0.0, pipes=[Pipe(454.36, 250.0)])
    o1, o2 = flappy_observe(st)
    assert round(100 * o1) == 138
    assert o2 == pytest.approx(-2 / 512)


def test_flappy_observation_never_negative_distance():
    env, rng = make_env(FLAPPY), Rng(3)
    res = env.reset(rng)
    for t in range(2000):
        assert res.observation[0] >= 0
        st = env.state
        hole = st.pipes[0].hole_y if st.pipes[0].x + 52 >= 57 else st.pipes[1].hole_y
        res = env.step(1 if st.bird_y > hole + 5 and st.velocity >= 0 else 0, rng)
        assert res.reward == 1.0
        if res.done:
            res = env.reset(rng)


def test_flappy_falls_and_dies_without_flapping():
    env, rng = make_env(FLAPPY), Rng(1)
    env.reset(rng)
    steps = 0
    res = None
    while res is None or not res.done:
        res = env.step(0, rng)
        steps += 1
    assert res.terminated and not res.truncated
    # free fall from y=200 to the ground at 400 with gravity 1 capped at 10
    assert 15 < steps < 30


def test_flappy_controller_passes_pipes():
    env, rng = make_env(FLAPPY), Rng(2)
    res = env.reset(rng)
    passed = 0
    while not res.done and env.state.tick < 3000:
        st = env.state
        target = next(p for p in st.pipes if p.x + 52 >= 57).hole_y + 10
        res = env.step(1 if st.bird_y > target and st.velocity >= 0 else 0, rng)
        passed += res.success
    assert passed >= 3
    assert passed == env.state.score


def test_flappy_pipes_spacing():
    env, rng = make_env(FLAPPY), Rng(4)
    env.reset(rng)
    for _ in range(200):
        st = env.state
        xs = [p.x for p in st.pipes]
        assert all(b - a == 144 for a, b in zip(xs, xs[1:]))
        assert all(150 <= p.hole_y <= 350 for p in st.pipes)
        res = env.step(1 if st.bird_y > 250 and st.velocity >= 0 else 0, rng)
        if res.done:
            env.reset(rng)
