"""The fixpoint (bi)simulation engine: condition derivation, witnesses,
distinguishers, the direct relation verifier, and partition refinement.

conditions_for is pinned as a table because everything downstream hangs off
it; the fixture models carry hand-checked expected relations and separating
formulas.  verify_relation doubles as the oracle for engine output: whatever
the fixpoint returns as a witness must pass the defining conditions verbatim.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SIG, fixture_model, models
from modalkit.equivalence import (
    Config,
    SimConditions,
    bisimilar,
    bml_partition_refinement,
    conditions_for,
    directed_conditions,
    serialize_witness,
    simulated_by,
    verify_relation,
)
from modalkit.errors import (
    InvariantViolationError,
    StateSpaceExceededError,
    UnknownWorldError,
)
from modalkit.kripke import KripkeModel
from modalkit.semantics import check
from modalkit.syntax import DIALECTS, modal_depth, print_formula

BML = DIALECTS["bml"]
BML_MINUS = DIALECTS["bml-minus"]
ML = DIALECTS["ml-diamond"]


def _pair(w: str, v: str, mem1=frozenset(), mem2=frozenset()):
    return (Config(frozenset(mem1), w), Config(frozenset(mem2), v))


# ---------------------------------------------------------------------------
# Condition derivation

CONDITION_TABLE = {
    # negation makes every active direction two-way
    "bml": dict(forth=True, back=True),
    "bml-minus": dict(forth=True, atomic_one_directional=True),
    "hl": dict(forth=True, back=True, nagree=True),
    "hl-at": dict(forth=True, back=True, nagree=True, nom=True),
    "ml-diamond": dict(forth=True, back=True, kagree=True, remember=True),
    "ml-ddiamond": dict(mforth=True, mback=True, kagree=True, remember=True),
    "ml-forget": dict(forth=True, back=True, kagree=True, remember=True, forget=True),
    "ml-erase": dict(forth=True, back=True, kagree=True, remember=True, erase=True),
    "ml-full": dict(
        forth=True,
        back=True,
        mforth=True,
        mback=True,
        kagree=True,
        remember=True,
        forget=True,
        erase=True,
    ),
}


@pytest.mark.parametrize("name", sorted(CONDITION_TABLE))
def test_conditions_for(name):
    assert conditions_for(DIALECTS[name]) == SimConditions(agree=True, **CONDITION_TABLE[name])


def test_directed_conditions():
    directed = directed_conditions(conditions_for(DIALECTS["ml-full"]))
    assert not directed.back and not directed.mback
    assert directed.atomic_one_directional
    assert directed.forth and directed.mforth and directed.remember


def test_memory_active_flag():
    assert not conditions_for(BML).memory_active
    assert not conditions_for(DIALECTS["hl-at"]).memory_active
    assert conditions_for(ML).memory_active


# ---------------------------------------------------------------------------
# Relatedness on the fixture models


def test_unwound_pair_is_bisimilar_with_witness():
    big, w = fixture_model("four_world.km")
    small, v = fixture_model("two_world_loop.km")
    out = bisimilar(BML, big, w, small, v)
    assert out.related and out.distinguisher is None
    expected = {_pair("w", "v"), _pair("b", "v"), _pair("c", "z"), _pair("d", "z")}
    assert expected <= out.witness
    assert verify_relation(conditions_for(BML), big, small, out.witness) is None


def test_witness_serialization():
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    out = bisimilar(BML, refl, a, cyc, b)
    assert out.related
    assert serialize_witness(out.witness) == "((|a),(|b))\n((|a),(|c))"


def test_fork_simulated_one_way():
    two, w0 = fixture_model("fork_two.km")
    three, v0 = fixture_model("fork_three.km")
    out = simulated_by(BML_MINUS, two, w0, three, v0)
    assert out.related
    directed = directed_conditions(conditions_for(BML_MINUS))
    assert verify_relation(directed, two, three, out.witness) is None

    back = simulated_by(BML_MINUS, three, v0, two, w0)
    assert not back.related
    assert print_formula(back.distinguisher) == "<e>r"


def test_fork_not_bisimilar_with_distinguisher():
    two, w0 = fixture_model("fork_two.km")
    three, v0 = fixture_model("fork_three.km")
    out = bisimilar(BML, three, v0, two, w0)
    assert not out.related and out.witness is None
    assert print_formula(out.distinguisher) == "<e>(r & ~q)"
    assert check(three, v0, out.distinguisher)
    assert not check(two, w0, out.distinguisher)


def test_memory_splits_what_bml_equates():
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    assert bisimilar(BML, refl, a, cyc, b).related
    out = bisimilar(ML, cyc, b, refl, a)
    assert not out.related
    phi = out.distinguisher
    assert phi is not None and modal_depth(phi) <= 4
    assert check(cyc, b, phi)
    assert not check(refl, a, phi)


def test_distinguisher_search_can_be_skipped():
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    out = bisimilar(ML, cyc, b, refl, a, distinguisher_depth=0)
    assert not out.related and out.distinguisher is None


def test_nominals_constrain_relatedness():
    named_loop = KripkeModel(("w",), {"r": frozenset({("w", "w")})}, {}, noms={"i": "w"})
    named_cycle = KripkeModel(
        ("b", "c"), {"r": frozenset({("b", "c"), ("c", "b")})}, {}, noms={"i": "b"}
    )
    assert bisimilar(BML, named_loop, "w", named_cycle, "b").related
    out = bisimilar(DIALECTS["hl"], named_loop, "w", named_cycle, "b")
    assert not out.related
    phi = out.distinguisher
    assert check(named_loop, "w", phi) and not check(named_cycle, "b", phi)


def test_at_reaches_unconnected_worlds():
    lit = KripkeModel(("w", "z"), {"r": frozenset()}, {"p": frozenset({"z"})}, noms={"i": "z"})
    unlit = KripkeModel(("v", "y"), {"r": frozenset()}, {"p": frozenset()}, noms={"i": "y"})
    assert bisimilar(DIALECTS["hl"], lit, "w", unlit, "v").related
    out = bisimilar(DIALECTS["hl-at"], lit, "w", unlit, "v")
    assert not out.related
    phi = out.distinguisher
    assert phi is not None
    assert check(lit, "w", phi) and not check(unlit, "v", phi)


def test_nominal_vocabulary_must_match():
    named = KripkeModel(("w",), {}, {}, noms={"i": "w"})
    bare = KripkeModel(("v",), {}, {})
    with pytest.raises(InvariantViolationError):
        bisimilar(DIALECTS["hl"], named, "w", bare, "v")


def test_unknown_world():
    refl, a = fixture_model("reflexive.km")
    with pytest.raises(UnknownWorldError):
        bisimilar(BML, refl, "nope", refl, a)


def test_pair_space_caps():
    big, w = fixture_model("four_world.km")
    small, v = fixture_model("two_world_loop.km")
    with pytest.raises(StateSpaceExceededError):
        bisimilar(BML, big, w, small, v, max_pairs=7)  # 4 x 2 = 8 pairs
    refl, a = fixture_model("reflexive.km")
    cyc, b = fixture_model("two_cycle.km")
    with pytest.raises(StateSpaceExceededError):
        bisimilar(ML, refl, a, cyc, b, max_pairs=2, distinguisher_depth=0)


# ---------------------------------------------------------------------------
# verify_relation as a standalone checker


def test_verify_rejects_empty_relation():
    refl, _ = fixture_model("reflexive.km")
    assert verify_relation(conditions_for(BML), refl, refl, frozenset()) == (
        None,
        "a simulation must be non-empty",
    )


def test_verify_reports_static_violation():
    two, _ = fixture_model("fork_two.km")
    bad = frozenset({_pair("w0", "u1")})  # u1 carries p, w0 does not
    pair, reason = verify_relation(conditions_for(BML), two, two, bad)
    assert pair == _pair("w0", "u1")
    assert reason.startswith("static condition fails")


def test_verify_reports_broken_forth():
    big, _ = fixture_model("four_world.km")
    small, _ = fixture_model("two_world_loop.km")
    partial = frozenset({_pair("w", "v"), _pair("b", "v"), _pair("c", "z")})
    pair, reason = verify_relation(conditions_for(BML), big, small, partial)
    assert pair == _pair("b", "v")
    assert reason == "forth fails for r:d"


def test_verify_reports_missing_memory_closure():
    cyc, _ = fixture_model("two_cycle.km")
    refl, _ = fixture_model("reflexive.km")
    no_closure = frozenset({_pair("b", "a")})
    pair, reason = verify_relation(conditions_for(ML), cyc, refl, no_closure)
    assert pair == _pair("b", "a")
    assert reason == "closure condition remember leads outside the relation"


@settings(max_examples=40)
@given(st.data())
def test_witnesses_verify(data):
    """Whenever the engine says related, its witness passes the verifier."""
    name = data.draw(st.sampled_from(sorted(DIALECTS)))
    spec = DIALECTS[name]
    from conftest import sig_for

    sig = sig_for(spec)
    mem = spec.allows("known")
    left = data.draw(models(sig=sig, max_worlds=3, allow_mem=mem))
    right = data.draw(models(sig=sig, max_worlds=3, allow_mem=mem))
    w = data.draw(st.sampled_from(left.worlds))
    v = data.draw(st.sampled_from(right.worlds))
    conds = conditions_for(spec)
    out = bisimilar(spec, left, w, right, v, distinguisher_depth=0)
    if out.related:
        assert _pair(w, v, left.mem, right.mem) in out.witness
        assert verify_relation(conds, left, right, out.witness) is None
    directed = simulated_by(spec, left, w, right, v, distinguisher_depth=0)
    if directed.related:
        assert (
            verify_relation(directed_conditions(conds), left, right, directed.witness)
            is None
        )


# ---------------------------------------------------------------------------
# Partition refinement


def test_partition_refinement_fixture_blocks():
    big, _ = fixture_model("four_world.km")
    assert bml_partition_refinement(big) == (
        frozenset({"b", "w"}),
        frozenset({"c", "d"}),
    )
    cyc, _ = fixture_model("two_cycle.km")
    assert bml_partition_refinement(cyc) == (frozenset({"b", "c"}),)
    two, _ = fixture_model("fork_two.km")
    assert bml_partition_refinement(two) == (
        frozenset({"u1"}),
        frozenset({"u2"}),
        frozenset({"w0"}),
    )


@settings(max_examples=50)
@given(models(sig=SIG), st.data())
def test_partition_blocks_match_fixpoint(model, data):
    """Same block in the refinement partition <=> bml-bisimilar as points."""
    w = data.draw(st.sampled_from(model.worlds))
    v = data.draw(st.sampled_from(model.worlds))
    blocks = bml_partition_refinement(model)
    same_block = any(w in b and v in b for b in blocks)
    assert bisimilar(BML, model, w, model, v).related == same_block
