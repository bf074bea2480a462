import pytest
from hypothesis import given
from hypothesis import strategies as st

from nars_arena.errors import EncodingError, UnknownOpError
from nars_arena.narsese import (
    LineKind,
    OpName,
    classify_line,
    encode_goal_achieved,
    encode_goal_event,
    encode_state_event,
    flappy_qindex,
    flappy_token,
    parse_execution,
    register_ops,
    round_half_away,
    setop_commands,
)

from .conftest import DATA

OPS = register_ops(["left", "down", "right", "up"])


@pytest.mark.parametrize("token,line", [("s14", "s14. :|:"), ("138_-4", "138_-4. :|:")])
def test_state_event(token, line):
    assert encode_state_event(token) == line


@pytest.mark.parametrize("bad", ["", "a b", "x\t", "\n"])
def test_state_event_rejects_bad_tokens(bad):
    with pytest.raises(EncodingError):
        encode_state_event(bad)


def test_goal_lines():
    assert encode_goal_achieved() == "G. :|:"
    assert encode_goal_event() == "G! :|:"
    assert encode_goal_event() == encode_goal_event()


def test_setop_commands():
    lines = setop_commands(["left", "down", "right", "up"])
    assert lines == ["*setopname 1 ^left", "*setopname 2 ^down",
                     "*setopname 3 ^right", "*setopname 4 ^up"]
    taxi = setop_commands(["south", "north", "east", "west", "pickup", "dropoff"])
    assert [int(l.split()[1]) for l in taxi] == [1, 2, 3, 4, 5, 6]


@pytest.mark.parametrize("ops", [[], ["a", "a"], [f"o{i}" for i in range(11)], ["^"]])
def test_setop_commands_errors(ops):
    with pytest.raises(EncodingError):
        setop_commands(ops)


def test_parse_execution():
    assert parse_execution("^left executed with args", OPS) == OpName("^left", 1)
    assert parse_execution("Input: s14. :|:", OPS) is None
    with pytest.raises(UnknownOpError):
        parse_execution("^fly executed", OPS)


def test_parse_execution_custom_pattern():
    ops = register_ops(["flap", "idle"])
    assert parse_execution("EXE flap", ops, pattern=r"EXE (\w+)") == OpName("^flap", 1)


@given(st.text(alphabet=st.characters(blacklist_categories=("Zs", "Cc")), min_size=1, max_size=12))
def test_encoded_lines_never_parse_as_executions(token):
    if any(ch.isspace() for ch in token):
        return
    for line in (encode_state_event(token), encode_goal_event(), encode_goal_achieved()):
        try:
            assert parse_execution(line, OPS) is None
        except UnknownOpError:
            pytest.fail(f"{line!r} looked like an execution")


def test_classify_line():
    assert classify_line("s14. :|:") is LineKind.BELIEF_EVENT
    assert classify_line("G! :|:") is LineKind.GOAL_EVENT
    assert classify_line("*setopname 1 ^left") is LineKind.CONFIG
    assert classify_line("^left executed with args") is LineKind.EXECUTION
    assert classify_line("performing 3 inference steps") is LineKind.OTHER


def test_rounding_convention():
    assert round_half_away(0.5) == 1
    assert round_half_away(-0.5) == -1
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.4) == -2


@pytest.mark.parametrize("o1,o2,token,index", [
    (1.38, -0.004, "138_-4", 142),
    (0.0, 0.0, "0_0", 0),
    (0.005, -0.0005, "1_-1", 2),
    (-1.38, 0.004, "-138_4", 142),
])
def test_flappy_mappings(o1, o2, token, index):
    assert flappy_token(o1, o2) == token
    assert flappy_qindex(o1, o2) == index


@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(-500, 500), st.integers(-500, 500))
def test_flappy_token_injective_on_rounded_pairs(a, b, c, d):
    ta = flappy_token(a / 100, b / 1000)
    tb = flappy_token(c / 100, d / 1000)
    assert (ta == tb) == ((a, b) == (c, d))


def test_golden_transcript_replay():
    """Replaying a recorded transcript yields exactly the recorded decisions."""
    ops = register_ops(["left", "down", "right", "up"])
    decisions = {}
    with open(DATA / "frozenlake_session.narsese") as fh:
        for raw in fh:
            direction, step, line = raw.rstrip("\n").split("\t", 2)
            if direction == "RECV":
                op = parse_execution(line, ops)
                if op is not None:
                    decisions.setdefault(int(step), op.bare)
    with open(DATA / "frozenlake_session.expected") as fh:
        expected = {int(k): v for k, v in (ln.split() for ln in fh if ln.strip())}
    assert decisions == expected
