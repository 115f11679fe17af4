"""Simulations and bisimulations for every dialect, as greatest fixpoints
over configuration pairs.

A *configuration* is a (memory set, world) pair; for dialects without memory
operators the memory component never changes and the configuration space
collapses to plain world pairs.  The defining conditions of a dialect's
(bi)simulation are represented explicitly as a SimConditions record derived
from the LogicSpec:

  - agree      : related points satisfy the same propositions (one-directional
                 for negation-free dialects);
  - kagree     : related points agree on membership in their memories;
  - nagree     : related points name the same nominals;
  - forth/back : the relational zig and zag for the plain modality;
  - mforth/mback: the zig/zag for the double modality (successors taken after
                 memorizing the current points);
  - remember/forget/erase: closure under the corresponding simultaneous memory
                 update of both sides;
  - nom        : closure under jumping both sides to a nominal's worlds.

The engine starts from every materialized pair satisfying the static
conditions and deletes violating pairs in synchronous rounds until stable;
the survivors are the largest relation closed under the conditions, so the
returned witness contains every valid hand-built relation over the same
space.  For memory dialects the configuration space is materialized lazily
from the initial pair's closure (with a hard cap); for the others the full
world-pair space is used.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import InvariantViolationError, StateSpaceExceededError
from .kripke import KripkeModel
from .syntax import (
    At,
    Box,
    DBox,
    DDiamond,
    Diamond,
    Erase,
    Forget,
    Formula,
    Known,
    LogicSpec,
    Nom,
    Not,
    Prop,
    Remember,
    conjoin,
    disjoin,
)

DEFAULT_MAX_PAIRS = 2**20


@dataclass(frozen=True)
class SimConditions:
    """Which defining conditions are active (see module docstring)."""

    agree: bool = True
    kagree: bool = False
    remember: bool = False
    forget: bool = False
    erase: bool = False
    forth: bool = False
    back: bool = False
    mforth: bool = False
    mback: bool = False
    nagree: bool = False
    nom: bool = False
    atomic_one_directional: bool = False

    @property
    def memory_active(self) -> bool:
        """Do any active conditions move the memory component?"""
        return self.remember or self.forget or self.erase or self.mforth or self.mback


def conditions_for(spec: LogicSpec) -> SimConditions:
    """The dialect's canonical condition set.

    Negation forces symmetry (two-directional atomic agreement and the
    back-type clauses); the box alone forces the back clause even without
    negation, dually for the diamond and forth.
    """
    ops = spec.operators
    neg = spec.has_negation
    return SimConditions(
        agree=True,
        atomic_one_directional=not neg,
        kagree="known" in ops,
        remember="remember" in ops,
        forget="forget" in ops,
        erase="erase" in ops,
        forth="diamond" in ops or (neg and "box" in ops),
        back="box" in ops or (neg and "diamond" in ops),
        mforth="ddiamond" in ops or (neg and "dbox" in ops),
        mback="dbox" in ops or (neg and "ddiamond" in ops),
        nagree="nominal" in ops,
        nom="at" in ops,
    )


def directed_conditions(conds: SimConditions) -> SimConditions:
    """The one-directional (simulation) variant: drop back-type clauses and
    weaken the atomic conditions to left-to-right implications."""
    return replace(conds, back=False, mback=False, atomic_one_directional=True)


@dataclass(frozen=True)
class Config:
    """One side of a simulation pair: a memory state and a current world."""

    mem: frozenset[str]
    world: str

    def render(self) -> str:
        return f"({','.join(sorted(self.mem))}|{self.world})"


Pair = tuple[Config, Config]


@dataclass(frozen=True)
class SimulationOutcome:
    related: bool
    witness: frozenset[Pair] | None
    distinguisher: Formula | None


def serialize_witness(witness: frozenset[Pair]) -> str:
    """One '((mem1|w1),(mem2|w2))' line per pair, sorted; memory sets are
    comma-joined sorted world ids."""
    lines = sorted(f"({c1.render()},{c2.render()})" for c1, c2 in witness)
    return "\n".join(lines)


class _Engine:
    def __init__(
        self,
        conds: SimConditions,
        left: KripkeModel,
        right: KripkeModel,
        max_pairs: int,
    ):
        self.conds = conds
        self.left = left
        self.right = right
        self.max_pairs = max_pairs
        self.props = sorted(set(left.val) | set(right.val))
        self.rels = sorted(set(left.rels) | set(right.rels))
        if conds.nagree or conds.nom:
            if sorted(left.noms) != sorted(right.noms):
                raise InvariantViolationError(
                    "nominal comparison requires both models to assign the same nominals"
                )
        self.noms = sorted(set(left.noms) & set(right.noms))
        self.dead: dict[Pair, tuple[int, tuple]] = {}
        self.alive: set[Pair] = set()

    # -- condition primitives ------------------------------------------------

    def static_violation(self, pair: Pair) -> tuple | None:
        c1, c2 = pair
        one_way = self.conds.atomic_one_directional
        if self.conds.agree:
            for p in self.props:
                a = c1.world in self.left.val.get(p, frozenset())
                b = c2.world in self.right.val.get(p, frozenset())
                if a and not b:
                    return ("agree", p, "left")
                if b and not a and not one_way:
                    return ("agree", p, "right")
        if self.conds.kagree:
            a = c1.world in c1.mem
            b = c2.world in c2.mem
            if a and not b:
                return ("kagree", "left")
            if b and not a and not one_way:
                return ("kagree", "right")
        if self.conds.nagree:
            for i in self.noms:
                a = self.left.noms[i] == c1.world
                b = self.right.noms[i] == c2.world
                if a and not b:
                    return ("nagree", i, "left")
                if b and not a and not one_way:
                    return ("nagree", i, "right")
        return None

    def closure_images(self, pair: Pair) -> list[tuple[str, str | None, Pair]]:
        c1, c2 = pair
        images = []
        if self.conds.remember:
            images.append(
                (
                    "remember",
                    None,
                    (Config(c1.mem | {c1.world}, c1.world), Config(c2.mem | {c2.world}, c2.world)),
                )
            )
        if self.conds.forget:
            images.append(
                (
                    "forget",
                    None,
                    (Config(c1.mem - {c1.world}, c1.world), Config(c2.mem - {c2.world}, c2.world)),
                )
            )
        if self.conds.erase:
            images.append(
                ("erase", None, (Config(frozenset(), c1.world), Config(frozenset(), c2.world)))
            )
        if self.conds.nom:
            for i in self.noms:
                images.append(
                    ("nom", i, (Config(c1.mem, self.left.noms[i]), Config(c2.mem, self.right.noms[i])))
                )
        return images

    def move_pairs(self, pair: Pair, rel: str, traced: bool) -> tuple[tuple, tuple, list[Pair]]:
        """Successor worlds on both sides and the full candidate cross product."""
        c1, c2 = pair
        succ1 = self.left.successors(rel, c1.world)
        succ2 = self.right.successors(rel, c2.world)
        if traced:
            mem1, mem2 = c1.mem | {c1.world}, c2.mem | {c2.world}
        else:
            mem1, mem2 = c1.mem, c2.mem
        cross = [
            (Config(mem1, a), Config(mem2, b)) for a in succ1 for b in succ2
        ]
        return succ1, succ2, cross

    # -- materialization -----------------------------------------------------

    def materialize(self, initial: Pair) -> list[Pair]:
        if not self.conds.memory_active:
            mem1 = Config(frozenset(self.left.mem), "")
            pairs = [
                (Config(frozenset(self.left.mem), a), Config(frozenset(self.right.mem), b))
                for a in self.left.worlds
                for b in self.right.worlds
            ]
            if len(pairs) > self.max_pairs:
                raise StateSpaceExceededError(self.max_pairs)
            return pairs
        seen = {initial}
        queue = [initial]
        while queue:
            pair = queue.pop()
            neighbours: list[Pair] = [img for _, _, img in self.closure_images(pair)]
            for rel in self.rels:
                if self.conds.forth or self.conds.back:
                    neighbours.extend(self.move_pairs(pair, rel, traced=False)[2])
                if self.conds.mforth or self.conds.mback:
                    neighbours.extend(self.move_pairs(pair, rel, traced=True)[2])
            for nxt in neighbours:
                if nxt not in seen:
                    if len(seen) >= self.max_pairs:
                        raise StateSpaceExceededError(self.max_pairs)
                    seen.add(nxt)
                    queue.append(nxt)
        return sorted(seen, key=_pair_key)

    # -- the fixpoint --------------------------------------------------------

    def run(self, initial: Pair) -> None:
        space = self.materialize(initial)
        for pair in space:
            reason = self.static_violation(pair)
            if reason is None:
                self.alive.add(pair)
            else:
                self.dead[pair] = (0, reason)
        rnd = 0
        while True:
            rnd += 1
            doomed = []
            for pair in sorted(self.alive, key=_pair_key):
                reason = self.violation(pair)
                if reason is not None:
                    doomed.append((pair, reason))
            if not doomed:
                break
            for pair, reason in doomed:
                self.alive.discard(pair)
                self.dead[pair] = (rnd, reason)

    def violation(self, pair: Pair) -> tuple | None:
        for kind, info, image in self.closure_images(pair):
            if image not in self.alive:
                return (kind, info, image)
        for rel in self.rels:
            if self.conds.forth or self.conds.back:
                succ1, succ2, _ = self.move_pairs(pair, rel, traced=False)
                mem1, mem2 = pair[0].mem, pair[1].mem
                if self.conds.forth:
                    for a in succ1:
                        if not any(
                            (Config(mem1, a), Config(mem2, b)) in self.alive for b in succ2
                        ):
                            return ("forth", rel, a)
                if self.conds.back:
                    for b in succ2:
                        if not any(
                            (Config(mem1, a), Config(mem2, b)) in self.alive for a in succ1
                        ):
                            return ("back", rel, b)
            if self.conds.mforth or self.conds.mback:
                succ1, succ2, _ = self.move_pairs(pair, rel, traced=True)
                mem1 = pair[0].mem | {pair[0].world}
                mem2 = pair[1].mem | {pair[1].world}
                if self.conds.mforth:
                    for a in succ1:
                        if not any(
                            (Config(mem1, a), Config(mem2, b)) in self.alive for b in succ2
                        ):
                            return ("mforth", rel, a)
                if self.conds.mback:
                    for b in succ2:
                        if not any(
                            (Config(mem1, a), Config(mem2, b)) in self.alive for a in succ1
                        ):
                            return ("mback", rel, b)
        return None


def _pair_key(pair: Pair) -> tuple:
    c1, c2 = pair
    return (c1.world, tuple(sorted(c1.mem)), c2.world, tuple(sorted(c2.mem)))


# ---------------------------------------------------------------------------
# Distinguisher extraction by refinement tracing (non-memory dialects)


def _mk_box(spec: LogicSpec, rel: str, sub: Formula) -> Formula:
    if spec.allows("box"):
        return Box(rel, sub)
    return Not(Diamond(rel, Not(sub)))


def _mk_dbox(spec: LogicSpec, rel: str, sub: Formula) -> Formula:
    if spec.allows("dbox"):
        return DBox(rel, sub)
    return Not(DDiamond(rel, Not(sub)))


class _Tracer:
    """Rebuild a distinguishing formula (true on the left, false on the
    right) from the fixpoint's deletion reasons."""

    def __init__(self, spec: LogicSpec, engine: _Engine):
        self.spec = spec
        self.engine = engine
        self.memo: dict[Pair, Formula] = {}

    def trace(self, pair: Pair) -> Formula:
        if pair in self.memo:
            return self.memo[pair]
        _, reason = self.engine.dead[pair]
        phi = self._build(pair, reason)
        self.memo[pair] = phi
        return phi

    def _build(self, pair: Pair, reason: tuple) -> Formula:
        match reason:
            case ("agree", p, "left"):
                return Prop(p)
            case ("agree", p, "right"):
                return Not(Prop(p))
            case ("kagree", "left"):
                return Known()
            case ("kagree", "right"):
                return Not(Known())
            case ("nagree", i, "left"):
                return Nom(i)
            case ("nagree", i, "right"):
                return Not(Nom(i))
            case ("remember", None, image):
                return Remember(self.trace(image))
            case ("forget", None, image):
                return Forget(self.trace(image))
            case ("erase", None, image):
                return Erase(self.trace(image))
            case ("nom", i, image):
                return At(i, self.trace(image))
            case ("forth", rel, a):
                c1, c2 = pair
                parts = [
                    self.trace((Config(c1.mem, a), Config(c2.mem, b)))
                    for b in self.engine.right.successors(rel, c2.world)
                ]
                return Diamond(rel, conjoin(parts))
            case ("back", rel, b):
                c1, c2 = pair
                parts = [
                    self.trace((Config(c1.mem, a), Config(c2.mem, b)))
                    for a in self.engine.left.successors(rel, c1.world)
                ]
                return _mk_box(self.spec, rel, disjoin(parts))
            case ("mforth", rel, a):
                c1, c2 = pair
                mem1, mem2 = c1.mem | {c1.world}, c2.mem | {c2.world}
                parts = [
                    self.trace((Config(mem1, a), Config(mem2, b)))
                    for b in self.engine.right.successors(rel, c2.world)
                ]
                return DDiamond(rel, conjoin(parts))
            case ("mback", rel, b):
                c1, c2 = pair
                mem1, mem2 = c1.mem | {c1.world}, c2.mem | {c2.world}
                parts = [
                    self.trace((Config(mem1, a), Config(mem2, b)))
                    for a in self.engine.left.successors(rel, c1.world)
                ]
                return _mk_dbox(self.spec, rel, disjoin(parts))
        raise AssertionError(f"unknown deletion reason {reason!r}")


# ---------------------------------------------------------------------------
# Public API


def _solve(
    spec: LogicSpec,
    conds: SimConditions,
    left: KripkeModel,
    w: str,
    right: KripkeModel,
    v: str,
    max_pairs: int,
    distinguisher_depth: int,
) -> SimulationOutcome:
    left.require_world(w)
    right.require_world(v)
    engine = _Engine(conds, left, right, max_pairs)
    initial: Pair = (Config(frozenset(left.mem), w), Config(frozenset(right.mem), v))
    engine.run(initial)
    if initial in engine.alive:
        return SimulationOutcome(True, frozenset(engine.alive), None)
    if conds.memory_active:
        if distinguisher_depth <= 0:
            return SimulationOutcome(False, None, None)
        from .enumeration import separating_formula

        phi = separating_formula(spec, left, w, right, v, depth=distinguisher_depth)
        return SimulationOutcome(False, None, phi)
    return SimulationOutcome(False, None, _Tracer(spec, engine).trace(initial))


def bisimilar(
    spec: LogicSpec,
    left: KripkeModel,
    w: str,
    right: KripkeModel,
    v: str,
    *,
    conditions: SimConditions | None = None,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    distinguisher_depth: int = 4,
) -> SimulationOutcome:
    """Are the pointed models related by the dialect's canonical notion?

    For dialects with negation this is a bisimulation-style symmetric notion;
    for negation-free dialects the canonical notion is already directed.
    ``distinguisher_depth`` caps the bounded search used to synthesize a
    separating formula for memory dialects; pass 0 to skip that search.
    """
    conds = conditions if conditions is not None else conditions_for(spec)
    return _solve(spec, conds, left, w, right, v, max_pairs, distinguisher_depth)


def simulated_by(
    spec: LogicSpec,
    left: KripkeModel,
    w: str,
    right: KripkeModel,
    v: str,
    *,
    conditions: SimConditions | None = None,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    distinguisher_depth: int = 4,
) -> SimulationOutcome:
    """Is the left pointed model simulated by the right one (directed
    conditions: no back-type clauses, one-directional atomic agreement)?"""
    conds = directed_conditions(
        conditions if conditions is not None else conditions_for(spec)
    )
    return _solve(spec, conds, left, w, right, v, max_pairs, distinguisher_depth)


def verify_relation(
    conds: SimConditions,
    left: KripkeModel,
    right: KripkeModel,
    relation: frozenset[Pair] | set[Pair],
) -> tuple[Pair | None, str] | None:
    """Check a purported (bi)simulation directly against the defining
    conditions; None if it passes, otherwise (offending pair, reason)."""
    if not relation:
        return (None, "a simulation must be non-empty")
    engine = _Engine(conds, left, right, max_pairs=DEFAULT_MAX_PAIRS)
    pairs = set(relation)
    for pair in sorted(pairs, key=_pair_key):
        reason = engine.static_violation(pair)
        if reason is not None:
            return (pair, f"static condition fails: {reason}")
        for kind, info, image in engine.closure_images(pair):
            if image not in pairs:
                label = f"{kind} {info}" if info else kind
                return (pair, f"closure condition {label} leads outside the relation")
        for rel in engine.rels:
            c1, c2 = pair
            if conds.forth:
                succ2 = right.successors(rel, c2.world)
                for a in left.successors(rel, c1.world):
                    if not any((Config(c1.mem, a), Config(c2.mem, b)) in pairs for b in succ2):
                        return (pair, f"forth fails for {rel}:{a}")
            if conds.back:
                succ1 = left.successors(rel, c1.world)
                for b in right.successors(rel, c2.world):
                    if not any((Config(c1.mem, a), Config(c2.mem, b)) in pairs for a in succ1):
                        return (pair, f"back fails for {rel}:{b}")
            if conds.mforth:
                mem1, mem2 = c1.mem | {c1.world}, c2.mem | {c2.world}
                succ2 = right.successors(rel, c2.world)
                for a in left.successors(rel, c1.world):
                    if not any((Config(mem1, a), Config(mem2, b)) in pairs for b in succ2):
                        return (pair, f"mforth fails for {rel}:{a}")
            if conds.mback:
                mem1, mem2 = c1.mem | {c1.world}, c2.mem | {c2.world}
                succ1 = left.successors(rel, c1.world)
                for b in right.successors(rel, c2.world):
                    if not any((Config(mem1, a), Config(mem2, b)) in pairs for a in succ1):
                        return (pair, f"mback fails for {rel}:{b}")
    return None


# ---------------------------------------------------------------------------
# Partition refinement (plain modal fragment)


def bml_partition_refinement(model: KripkeModel) -> tuple[frozenset[str], ...]:
    """Coarsest partition of the worlds stable under propositional agreement
    and block-successor signatures, by iterated splitting.  Memory and
    nominals are outside this fragment and are ignored."""
    rels = sorted(model.rels)
    props = sorted(model.val)

    def initial_key(w: str):
        return tuple(w in model.val[p] for p in props)

    block_of = _normalize({w: initial_key(w) for w in model.worlds}, model.worlds)
    while True:
        def signature(w: str):
            succ_sig = tuple(
                frozenset(block_of[b] for b in model.successors(rel, w)) for rel in rels
            )
            return (block_of[w], succ_sig)

        refined = _normalize({w: signature(w) for w in model.worlds}, model.worlds)
        if len(set(refined.values())) == len(set(block_of.values())):
            break
        block_of = refined
    blocks: dict[int, set[str]] = {}
    for w, b in block_of.items():
        blocks.setdefault(b, set()).add(w)
    return tuple(sorted((frozenset(b) for b in blocks.values()), key=min))


def _normalize(keyed: dict[str, tuple], worlds) -> dict[str, int]:
    ids: dict[tuple, int] = {}
    out = {}
    for w in sorted(worlds):
        key = keyed[w]
        if key not in ids:
            ids[key] = len(ids)
        out[w] = ids[key]
    return out
