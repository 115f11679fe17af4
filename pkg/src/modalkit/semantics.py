"""Truth in a pointed model, for every dialect the workbench speaks.

Memory effects (remember/forget/erase and the double modalities) are threaded
through the recursion as an explicit memory-set argument instead of
materializing modified models; @-jumps keep the current memory.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnassignedNominalError
from .kripke import KripkeModel
from .syntax import (
    And,
    At,
    Bottom,
    Box,
    DBox,
    DDiamond,
    Diamond,
    Erase,
    Forget,
    Formula,
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
    validate_formula,
)


@dataclass(frozen=True)
class EvalConfig:
    """The active dialect and signature; passing one to check() validates the
    formula before evaluation."""

    spec: LogicSpec
    sig: Signature


def check(model: KripkeModel, world: str, phi: Formula, config: EvalConfig | None = None) -> bool:
    """Does phi hold at world in model (starting from the model's own memory)?"""
    model.require_world(world)
    if config is not None:
        validate_formula(phi, config.sig, config.spec)
    return eval_at(model, model.mem, world, phi)


def eval_at(model: KripkeModel, mem: frozenset[str], world: str, phi: Formula) -> bool:
    """Truth of phi at (mem, world); the workhorse behind check()."""
    match phi:
        case Top():
            return True
        case Bottom():
            return False
        case Prop(name):
            return world in model.val.get(name, frozenset())
        case Nom(name):
            try:
                return model.noms[name] == world
            except KeyError:
                raise UnassignedNominalError(name) from None
        case Known():
            return world in mem
        case Not(sub):
            return not eval_at(model, mem, world, sub)
        case And(a, b):
            return eval_at(model, mem, world, a) and eval_at(model, mem, world, b)
        case Or(a, b):
            return eval_at(model, mem, world, a) or eval_at(model, mem, world, b)
        case Implies(a, b):
            return (not eval_at(model, mem, world, a)) or eval_at(model, mem, world, b)
        case Iff(a, b):
            return eval_at(model, mem, world, a) == eval_at(model, mem, world, b)
        case Diamond(rel, sub):
            return any(eval_at(model, mem, w2, sub) for w2 in model.successors(rel, world))
        case Box(rel, sub):
            return all(eval_at(model, mem, w2, sub) for w2 in model.successors(rel, world))
        case DDiamond(rel, sub):
            traced = mem | {world}
            return any(eval_at(model, traced, w2, sub) for w2 in model.successors(rel, world))
        case DBox(rel, sub):
            traced = mem | {world}
            return all(eval_at(model, traced, w2, sub) for w2 in model.successors(rel, world))
        case Remember(sub):
            return eval_at(model, mem | {world}, world, sub)
        case Forget(sub):
            return eval_at(model, mem - {world}, world, sub)
        case Erase(sub):
            return eval_at(model, frozenset(), world, sub)
        case At(nom, sub):
            try:
                target = model.noms[nom]
            except KeyError:
                raise UnassignedNominalError(nom) from None
            return eval_at(model, mem, target, sub)
    raise TypeError(f"not a formula: {phi!r}")


def check_global(model: KripkeModel, phi: Formula, config: EvalConfig | None = None) -> bool:
    """True iff phi holds at every world of the model."""
    if config is not None:
        validate_formula(phi, config.sig, config.spec)
    return all(eval_at(model, model.mem, w, phi) for w in model.worlds)


def satisfying_set(model: KripkeModel, phi: Formula, config: EvalConfig | None = None) -> frozenset[str]:
    """The worlds at which phi holds (each evaluated from the model's memory)."""
    if config is not None:
        validate_formula(phi, config.sig, config.spec)
    return frozenset(w for w in model.worlds if eval_at(model, model.mem, w, phi))
