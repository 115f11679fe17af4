"""The comparison games: move generation, round accounting, scripted replay,
transcripts, and agreement with the fixpoint relation.

The headline property is the last one: the unbounded game's winner is
duplicator exactly when the fixpoint engine relates the two points, for
every dialect.  The bounded game is additionally matched against
depth-bounded equivalence for the plain modal dialect, where rounds and
modal depth coincide (memory dialects spend rounds on closure moves, so no
such identity is asserted for them).
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_model, models, sig_for
from modalkit.enumeration import equivalent_up_to
from modalkit.equivalence import bisimilar
from modalkit.errors import IllegalMoveError, StateSpaceExceededError
from modalkit.games import (
    ClosureMove,
    DuplicatorMove,
    Game,
    GameState,
    SpoilerMove,
    format_transcript,
    solve_game,
)
from modalkit.kripke import KripkeModel
from modalkit.syntax import DIALECTS

BML = DIALECTS["bml"]
BML_MINUS = DIALECTS["bml-minus"]
ML = DIALECTS["ml-diamond"]


def _fork_game(spec=BML):
    two, w0 = fixture_model("fork_two.km")
    three, v0 = fixture_model("fork_three.km")
    game = Game(spec, two, three)
    return game, game.initial(w0, v0)


def _memory_game(*, rounds=None):
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    game = Game(ML, refl, cyc)
    return game, game.initial(a, b, rounds=rounds)


# ---------------------------------------------------------------------------
# Moves and rules


def test_spoiler_moves_follow_the_conditions():
    game, start = _fork_game()
    moves = game.legal_moves(start)
    assert moves == [
        SpoilerMove("left", "e", "u1"),
        SpoilerMove("left", "e", "u2"),
        SpoilerMove("right", "e", "t1"),
        SpoilerMove("right", "e", "t2"),
        SpoilerMove("right", "e", "t3"),
    ]
    # the directed dialect only lets spoiler attack on the left
    directed, start = _fork_game(BML_MINUS)
    assert directed.legal_moves(start) == [
        SpoilerMove("left", "e", "u1"),
        SpoilerMove("left", "e", "u2"),
    ]


def test_memory_dialect_has_closure_moves():
    game, start = _memory_game()
    assert game.legal_moves(start) == [
        ClosureMove("remember"),
        SpoilerMove("left", "r", "a"),
        SpoilerMove("right", "r", "c"),
    ]


def test_traced_moves_for_the_double_modality():
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    game = Game(DIALECTS["ml-ddiamond"], refl, cyc)
    moves = game.legal_moves(game.initial(a, b))
    assert ClosureMove("remember") in moves
    traced = [m for m in moves if isinstance(m, SpoilerMove)]
    assert traced == [
        SpoilerMove("left", "r", "a", traced=True),
        SpoilerMove("right", "r", "c", traced=True),
    ]
    assert traced[0].render() == "spoiler left <<r>> -> a"


def test_duplicator_replies_are_statically_filtered():
    game, start = _fork_game()
    mid = game.apply(start, SpoilerMove("left", "e", "u2"))
    assert mid.turn == "duplicator" and mid.pending == SpoilerMove("left", "e", "u2")
    # only t2 matches u2 on both propositions
    assert game.legal_moves(mid) == [DuplicatorMove("t2")]
    done = game.apply(mid, DuplicatorMove("t2"))
    assert (done.left.world, done.right.world) == ("u2", "t2")
    assert game.winner_at(done) == "duplicator"  # no further attacks exist


def test_nominal_jump_wins_immediately():
    lit = KripkeModel(("w", "z"), {"r": frozenset()}, {"p": frozenset({"z"})}, noms={"i": "z"})
    unlit = KripkeModel(("v", "y"), {"r": frozenset()}, {"p": frozenset()}, noms={"i": "y"})
    game = Game(DIALECTS["hl-at"], lit, unlit)
    result = game.solve(game.initial("w", "v"))
    assert result.winner == "spoiler"
    assert result.strategy[game.initial("w", "v")] == ClosureMove("nom", "i")
    # one round suffices: the static check runs before rounds are consulted
    assert solve_game(DIALECTS["hl-at"], lit, "w", unlit, "v", rounds=1).winner == "spoiler"
    assert solve_game(DIALECTS["hl-at"], lit, "w", unlit, "v", rounds=0).winner == "duplicator"


# ---------------------------------------------------------------------------
# Solving


def test_unbounded_winners_on_the_fixtures():
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    assert solve_game(BML, refl, a, cyc, b).winner == "duplicator"
    assert solve_game(ML, refl, a, cyc, b).winner == "spoiler"
    big, w = fixture_model("four_world.km")
    small, v = fixture_model("two_world_loop.km")
    assert solve_game(BML, big, w, small, v).winner == "duplicator"


def test_closure_moves_spend_rounds():
    # spoiler needs remember plus one relation move: two rounds, not one
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    assert solve_game(ML, refl, a, cyc, b, rounds=1).winner == "duplicator"
    assert solve_game(ML, refl, a, cyc, b, rounds=2).winner == "spoiler"


def test_bounded_strategy_reaches_the_win():
    game, start = _memory_game(rounds=2)
    result = game.solve(start)
    assert result.winner == "spoiler"
    play = game.sample_play(start, result)
    states = game.replay(start, play)
    assert game.winner_at(states[-1]) == "spoiler"


def test_position_caps():
    two, w0 = fixture_model("fork_two.km")
    three, v0 = fixture_model("fork_three.km")
    with pytest.raises(StateSpaceExceededError):
        solve_game(BML, two, w0, three, v0, max_positions=2)
    with pytest.raises(StateSpaceExceededError):
        solve_game(BML, two, w0, three, v0, rounds=3, max_positions=2)


# ---------------------------------------------------------------------------
# Scripted play


def test_replay_validates_moves():
    game, start = _fork_game()
    states = game.replay(start, [SpoilerMove("left", "e", "u2"), DuplicatorMove("t2")])
    assert len(states) == 3
    with pytest.raises(IllegalMoveError) as exc:
        game.replay(start, [SpoilerMove("left", "e", "u2"), DuplicatorMove("t1")])
    assert exc.value.index == 1
    with pytest.raises(IllegalMoveError):
        game.replay(start, [ClosureMove("remember")])


def test_replay_rejects_moves_after_the_game_ends():
    game, start = _memory_game()
    script = [ClosureMove("remember"), SpoilerMove("right", "r", "c")]
    states = game.replay(start, script)
    assert game.winner_at(states[-1]) == "spoiler"
    with pytest.raises(IllegalMoveError) as exc:
        game.replay(start, script + [ClosureMove("remember")])
    assert exc.value.index == 2


def test_transcript_rendering():
    game, start = _fork_game()
    text = format_transcript(
        game, start, [SpoilerMove("left", "e", "u2"), DuplicatorMove("t2")]
    )
    assert text == "1. spoiler left <e> -> u2 | duplicator -> t2\nresult: duplicator"

    game, start = _memory_game()
    text = format_transcript(
        game, start, [ClosureMove("remember"), SpoilerMove("right", "r", "c")]
    )
    assert text == (
        "1. spoiler remember\n"
        "2. spoiler right <r> -> c | (no reply)\n"
        "result: spoiler"
    )


# ---------------------------------------------------------------------------
# Agreement with the relation engine


@settings(max_examples=40)
@given(st.data())
def test_game_agrees_with_fixpoint(data):
    name = data.draw(st.sampled_from(sorted(DIALECTS)))
    spec = DIALECTS[name]
    sig = sig_for(spec)
    mem = spec.allows("known")
    left = data.draw(models(sig=sig, max_worlds=2 if mem else 3, allow_mem=mem))
    right = data.draw(models(sig=sig, max_worlds=2 if mem else 3, allow_mem=mem))
    w = data.draw(st.sampled_from(left.worlds))
    v = data.draw(st.sampled_from(right.worlds))
    related = bisimilar(spec, left, w, right, v, distinguisher_depth=0).related
    winner = solve_game(spec, left, w, right, v).winner
    assert winner == ("duplicator" if related else "spoiler")


@settings(max_examples=30)
@given(st.data())
def test_bounded_game_matches_bounded_equivalence(data):
    """For the plain modal dialect a round is exactly one modal step."""
    left = data.draw(models(max_worlds=3))
    right = data.draw(models(max_worlds=3))
    w = data.draw(st.sampled_from(left.worlds))
    v = data.draw(st.sampled_from(right.worlds))
    depth = data.draw(st.integers(0, 3))
    winner = solve_game(BML, left, w, right, v, rounds=depth).winner
    agrees = equivalent_up_to(BML, left, w, right, v, depth)
    assert (winner == "duplicator") == agrees
