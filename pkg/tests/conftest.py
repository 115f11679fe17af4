"""Shared fixtures and hypothesis strategies.

The model and formula strategies are deliberately small (a handful of worlds,
two propositions, one relation): every engine in the package does exhaustive
or fixpoint work over the model, so small inputs already exercise every code
path and keep shrinking fast.
"""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from modalkit.kripke import KripkeModel, PointedModel
from modalkit.kripke import load_model as _load_model
from modalkit.syntax import (
    DIALECTS,
    And,
    At,
    Bottom,
    Box,
    DBox,
    DDiamond,
    Diamond,
    Erase,
    Forget,
    Iff,
    Implies,
    Known,
    LogicSpec,
    Nom,
    Not,
    Or,
    Prop,
    Remember,
    Signature,
    Top,
)

settings.register_profile(
    "workbench",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("workbench")

FIXTURES = Path(__file__).parent / "fixtures"

SIG = Signature(props=("p", "q"), rels=("r",))
SIG_NOM = Signature(props=("p", "q"), rels=("r",), noms=("i",))

ALL_DIALECTS = tuple(sorted(DIALECTS))


def fixture_model(name: str) -> tuple[KripkeModel, str]:
    model, point = _load_model((FIXTURES / name).read_text(encoding="utf-8"))
    assert point is not None, f"fixture {name} must carry a point directive"
    return model, point


def sig_for(spec: LogicSpec) -> Signature:
    return SIG_NOM if spec.allows("nominal") else SIG


@pytest.fixture(params=ALL_DIALECTS)
def spec(request) -> LogicSpec:
    """Parametrizes a test over every named dialect."""
    return DIALECTS[request.param]


# ---------------------------------------------------------------------------
# Strategies


@st.composite
def models(
    draw,
    sig: Signature = SIG,
    max_worlds: int = 4,
    allow_mem: bool = False,
):
    """A model over the signature with 1..max_worlds worlds.

    Nominals in the signature are always assigned (the evaluator treats an
    unassigned nominal as an error, which is tested separately)."""
    n = draw(st.integers(1, max_worlds))
    worlds = tuple(f"w{k}" for k in range(n))
    pairs = [(a, b) for a in worlds for b in worlds]
    rels = {r: frozenset(draw(st.sets(st.sampled_from(pairs)))) for r in sig.rels}
    val = {p: frozenset(draw(st.sets(st.sampled_from(worlds)))) for p in sig.props}
    mem = frozenset(draw(st.sets(st.sampled_from(worlds)))) if allow_mem else frozenset()
    noms = {i: draw(st.sampled_from(worlds)) for i in sig.noms}
    return KripkeModel(worlds, rels, val, mem, noms)


@st.composite
def pointed_models(draw, **kwargs):
    model = draw(models(**kwargs))
    return PointedModel(model, draw(st.sampled_from(model.worlds)))


def formulas(spec: LogicSpec, sig: Signature | None = None, max_leaves: int = 6):
    """Random formulas of the dialect over the signature."""
    if sig is None:
        sig = sig_for(spec)
    leaves = [st.just(Top()), st.just(Bottom())]
    if sig.props:
        leaves.append(st.sampled_from([Prop(p) for p in sig.props]))
    if spec.allows("known"):
        leaves.append(st.just(Known()))
    if spec.allows("nominal") and sig.noms:
        leaves.append(st.sampled_from([Nom(i) for i in sig.noms]))

    def extend(sub):
        opts = [
            st.tuples(sub, sub).map(lambda ab: And(*ab)),
            st.tuples(sub, sub).map(lambda ab: Or(*ab)),
        ]
        if spec.has_negation:
            opts.append(sub.map(Not))
            opts.append(st.tuples(sub, sub).map(lambda ab: Implies(*ab)))
            opts.append(st.tuples(sub, sub).map(lambda ab: Iff(*ab)))
        for op, mk in (
            ("diamond", Diamond),
            ("box", Box),
            ("ddiamond", DDiamond),
            ("dbox", DBox),
        ):
            if spec.allows(op) and sig.rels:
                opts.append(
                    st.tuples(st.sampled_from(sig.rels), sub).map(lambda rs, mk=mk: mk(*rs))
                )
        for op, mk in (("remember", Remember), ("forget", Forget), ("erase", Erase)):
            if spec.allows(op):
                opts.append(sub.map(mk))
        if spec.allows("at") and sig.noms:
            opts.append(
                st.tuples(st.sampled_from(sig.noms), sub).map(lambda ns: At(*ns))
            )
        return st.one_of(opts)

    return st.recursive(st.one_of(leaves), extend, max_leaves=max_leaves)
