"""Canonical formula streams and algebraic theory comparison.

Everything here works over a *joint evaluation context*: the configurations
(memory set, world) of one or more models laid out as bit positions, so that
the meaning of a formula in the context is a single integer bitmask.  Two
formulas with the same bitmask are indistinguishable by any of the context's
models, which makes deduplication exact rather than heuristic.

Two engines share the context:

- ``enumerate_formulas`` produces the canonical stream: formulas grouped by
  modal depth, within a depth stratum ordered by node count and rendered
  text, each yielded formula having a meaning not seen before.  The stream
  is conjunction-free; it is a sound basis for theory comparison (related
  points agree on all of it) and a practical basis for small-definition
  synthesis, but it does not enumerate every boolean combination.

- ``JointPartition`` refines the configuration space into meaning classes
  wave by wave (one wave per unit of modal depth) and is *complete* for
  dialects with full boolean connectives: two configurations land in the
  same class after wave d exactly when no formula of modal depth at most d
  tells them apart.  The key facts are that the diamonds distribute over
  unions (so refining by the image of each partition class captures every
  refinement any formula could make) and that the memory and jump operators
  are preimage maps on configurations that add no modal depth (so each wave
  closes under them before the next wave of diamonds).

``separating_formula`` and ``equivalent_up_to`` route to the partition for
dialects with memory or jump operators and to the relational fixpoint (whose
deletion rounds count exactly modal depth when no such operators exist) for
the rest.
"""

from __future__ import annotations

import heapq
from collections import deque
from itertools import combinations

from .errors import (
    BudgetExceededError,
    InvariantViolationError,
    OperatorNotInDialectError,
    StateSpaceExceededError,
    UnsupportedFeaturesError,
)
from .kripke import KripkeModel, PointedModel
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
    Top,
    conjoin,
    formula_size,
    print_formula,
)

MEMORY_CHANGING = frozenset({"remember", "forget", "erase", "ddiamond", "dbox"})

MAX_CONFIGS = 2**20


def _needs_memory_table(spec: LogicSpec) -> bool:
    return bool(spec.operators & MEMORY_CHANGING)


def _mem_subsets(worlds: tuple[str, ...]) -> list[frozenset[str]]:
    out = [frozenset()]
    for k in range(1, len(worlds) + 1):
        out.extend(frozenset(c) for c in combinations(worlds, k))
    return out


class EvalContext:
    """Configuration tables and bitmask semantics over a tuple of models.

    For dialects with memory-changing operators the table holds every
    (memory subset, world) configuration of each model; otherwise each model
    contributes only its own fixed memory.  Nominal-aware dialects require
    all models to assign exactly the same nominal names.
    """

    def __init__(self, spec: LogicSpec, models: list[KripkeModel] | tuple[KripkeModel, ...]):
        self.spec = spec
        self.models = tuple(models)
        self.props = sorted(set().union(*(m.val.keys() for m in self.models)) if self.models else [])
        self.rels = sorted(set().union(*(m.rels.keys() for m in self.models)) if self.models else [])
        if spec.allows("nominal") or spec.allows("at"):
            nom_sets = {tuple(sorted(m.noms)) for m in self.models}
            if len(nom_sets) > 1:
                raise InvariantViolationError(
                    "nominal comparison requires all models to assign the same nominals"
                )
        self.noms = sorted(self.models[0].noms) if self.models else []
        self.memory_table = _needs_memory_table(spec)

        self.configs: list[tuple[int, frozenset[str], str]] = []
        self.index: dict[tuple[int, frozenset[str], str], int] = {}
        for k, m in enumerate(self.models):
            mems = _mem_subsets(m.worlds) if self.memory_table else [frozenset(m.mem)]
            for mem in mems:
                for w in m.worlds:
                    if len(self.configs) >= MAX_CONFIGS:
                        raise StateSpaceExceededError(MAX_CONFIGS)
                    self.index[(k, mem, w)] = len(self.configs)
                    self.configs.append((k, mem, w))
        n = len(self.configs)
        self.full = (1 << n) - 1

        self.prop_mask = {
            p: self._mask_of(lambda k, mem, w, p=p: w in self.models[k].val.get(p, frozenset()))
            for p in self.props
        }
        self.known_mask = self._mask_of(lambda k, mem, w: w in mem)
        self.nom_mask = {
            i: self._mask_of(lambda k, mem, w, i=i: self.models[k].noms.get(i) == w)
            for i in self.noms
        }
        self.succ_mask: dict[str, list[int]] = {}
        self.traced_succ_mask: dict[str, list[int]] = {}
        for r in self.rels:
            plain, traced = [], []
            for k, mem, w in self.configs:
                pm = tm = 0
                for w2 in self.models[k].successors(r, w):
                    pm |= 1 << self.index[(k, mem, w2)]
                    if self.memory_table:
                        tm |= 1 << self.index[(k, mem | {w}, w2)]
                plain.append(pm)
                traced.append(tm)
            self.succ_mask[r] = plain
            self.traced_succ_mask[r] = traced
        if self.memory_table:
            self.rem_map = [self.index[(k, mem | {w}, w)] for k, mem, w in self.configs]
            self.forg_map = [self.index[(k, mem - {w}, w)] for k, mem, w in self.configs]
            self.erase_map = [self.index[(k, frozenset(), w)] for k, mem, w in self.configs]
        self.at_map = {
            i: [self.index[(k, mem, self.models[k].noms[i])] for k, mem, w in self.configs]
            for i in self.noms
        }

    def _mask_of(self, pred) -> int:
        out = 0
        for b, (k, mem, w) in enumerate(self.configs):
            if pred(k, mem, w):
                out |= 1 << b
        return out

    def bit_of(self, model_index: int, mem: frozenset[str], world: str) -> int:
        return self.index[(model_index, frozenset(mem), world)]

    def start_bit(self, model_index: int, world: str) -> int:
        """The bit of (the model's own memory, world)."""
        m = self.models[model_index]
        return self.index[(model_index, frozenset(m.mem), world)]

    # -- mask transforms ------------------------------------------------------

    def not_t(self, m: int) -> int:
        return self.full & ~m

    def diamond_t(self, rel: str, m: int) -> int:
        masks = self.succ_mask[rel]
        out = 0
        for b in range(len(self.configs)):
            if masks[b] & m:
                out |= 1 << b
        return out

    def box_t(self, rel: str, m: int) -> int:
        masks = self.succ_mask[rel]
        out = 0
        for b in range(len(self.configs)):
            if masks[b] & ~m == 0:
                out |= 1 << b
        return out

    def ddiamond_t(self, rel: str, m: int) -> int:
        masks = self.traced_succ_mask[rel]
        out = 0
        for b in range(len(self.configs)):
            if masks[b] & m:
                out |= 1 << b
        return out

    def dbox_t(self, rel: str, m: int) -> int:
        masks = self.traced_succ_mask[rel]
        out = 0
        for b in range(len(self.configs)):
            if masks[b] & ~m == 0:
                out |= 1 << b
        return out

    def _pullback(self, mapping: list[int], m: int) -> int:
        out = 0
        for b, img in enumerate(mapping):
            if (m >> img) & 1:
                out |= 1 << b
        return out

    def rem_t(self, m: int) -> int:
        return self._pullback(self.rem_map, m)

    def forg_t(self, m: int) -> int:
        return self._pullback(self.forg_map, m)

    def erase_t(self, m: int) -> int:
        return self._pullback(self.erase_map, m)

    def at_t(self, nom: str, m: int) -> int:
        return self._pullback(self.at_map[nom], m)

    # -- full evaluator --------------------------------------------------------

    def meaning(self, phi: Formula) -> int:
        """The formula's bitmask over the whole configuration table."""
        match phi:
            case Top():
                return self.full
            case Bottom():
                return 0
            case Prop(name):
                return self.prop_mask.get(name, 0)
            case Nom(name):
                return self.nom_mask[name]
            case Known():
                return self.known_mask
            case Not(sub):
                return self.not_t(self.meaning(sub))
            case And(a, b):
                return self.meaning(a) & self.meaning(b)
            case Or(a, b):
                return self.meaning(a) | self.meaning(b)
            case Implies(a, b):
                return self.not_t(self.meaning(a)) | self.meaning(b)
            case Iff(a, b):
                return self.not_t(self.meaning(a) ^ self.meaning(b))
            case Diamond(rel, sub):
                return self.diamond_t(rel, self.meaning(sub)) if rel in self.succ_mask else 0
            case Box(rel, sub):
                return self.box_t(rel, self.meaning(sub)) if rel in self.succ_mask else self.full
            case DDiamond(rel, sub):
                self._require_memory_table(phi)
                return self.ddiamond_t(rel, self.meaning(sub)) if rel in self.succ_mask else 0
            case DBox(rel, sub):
                self._require_memory_table(phi)
                return self.dbox_t(rel, self.meaning(sub)) if rel in self.succ_mask else self.full
            case Remember(sub):
                self._require_memory_table(phi)
                return self.rem_t(self.meaning(sub))
            case Forget(sub):
                self._require_memory_table(phi)
                return self.forg_t(self.meaning(sub))
            case Erase(sub):
                self._require_memory_table(phi)
                return self.erase_t(self.meaning(sub))
            case At(nom, sub):
                return self.at_t(nom, self.meaning(sub))
        raise TypeError(f"not a formula: {phi!r}")

    def _require_memory_table(self, phi: Formula) -> None:
        if not self.memory_table:
            raise OperatorNotInDialectError(type(phi).__name__.lower(), self.spec.name)


# ---------------------------------------------------------------------------
# The canonical stream


def _silent_wraps(ctx: EvalContext) -> list:
    spec = ctx.spec
    wraps = []
    if spec.has_negation:
        wraps.append((Not, ctx.not_t))
    if spec.allows("remember"):
        wraps.append((Remember, ctx.rem_t))
    if spec.allows("forget"):
        wraps.append((Forget, ctx.forg_t))
    if spec.allows("erase"):
        wraps.append((Erase, ctx.erase_t))
    if spec.allows("at"):
        for i in ctx.noms:
            wraps.append((lambda sub, i=i: At(i, sub), lambda m, i=i: ctx.at_t(i, m)))
    return wraps


def _modal_wraps(ctx: EvalContext) -> list:
    spec = ctx.spec
    wraps = []
    for r in ctx.rels:
        if spec.allows("diamond"):
            wraps.append((lambda sub, r=r: Diamond(r, sub), lambda m, r=r: ctx.diamond_t(r, m)))
        if spec.allows("box"):
            wraps.append((lambda sub, r=r: Box(r, sub), lambda m, r=r: ctx.box_t(r, m)))
        if spec.allows("ddiamond"):
            wraps.append((lambda sub, r=r: DDiamond(r, sub), lambda m, r=r: ctx.ddiamond_t(r, m)))
        if spec.allows("dbox"):
            wraps.append((lambda sub, r=r: DBox(r, sub), lambda m, r=r: ctx.dbox_t(r, m)))
    return wraps


def stream_with_meanings(ctx: EvalContext, max_depth: int, budget: int):
    """Yield (formula, meaning mask) pairs of the canonical stream; raise
    BudgetExceededError when more than ``budget`` distinct meanings would be
    produced before the depth bound is exhausted."""
    spec = ctx.spec
    silent = _silent_wraps(ctx)
    modal = _modal_wraps(ctx)
    seen: set[int] = set()
    tick = iter(range(10**12))

    seeds: list[tuple[Formula, int]] = [(Top(), ctx.full), (Bottom(), 0)]
    seeds.extend((Prop(p), ctx.prop_mask[p]) for p in ctx.props)
    if spec.allows("known"):
        seeds.append((Known(), ctx.known_mask))
    if spec.allows("nominal"):
        seeds.extend((Nom(i), ctx.nom_mask[i]) for i in ctx.noms)

    for depth in range(max_depth + 1):
        heap = [
            (formula_size(phi), print_formula(phi), next(tick), phi, mask) for phi, mask in seeds
        ]
        heapq.heapify(heap)
        accepted: list[tuple[Formula, int]] = []
        while heap:
            _, _, _, phi, mask = heapq.heappop(heap)
            if mask in seen:
                continue
            if len(seen) >= budget:
                raise BudgetExceededError(budget)
            seen.add(mask)
            accepted.append((phi, mask))
            yield phi, mask
            for build, transform in silent:
                psi = build(phi)
                heapq.heappush(
                    heap,
                    (formula_size(psi), print_formula(psi), next(tick), psi, transform(mask)),
                )
        if not accepted:
            return
        seeds = [(build(phi), transform(mask)) for phi, mask in accepted for build, transform in modal]


def enumerate_formulas(
    spec: LogicSpec,
    models: list[KripkeModel] | tuple[KripkeModel, ...],
    *,
    max_depth: int,
    budget: int = 6000,
):
    """The canonical stream of meaning-distinct formulas over the models (see
    module docstring for the ordering guarantees)."""
    ctx = EvalContext(spec, models)
    for phi, _ in stream_with_meanings(ctx, max_depth, budget):
        yield phi


def joint_theories(
    spec: LogicSpec,
    pointed: list[PointedModel] | tuple[PointedModel, ...],
    *,
    depth: int,
    budget: int = 6000,
) -> list[frozenset[str]]:
    """For each pointed model, the set of canonical-stream formulas (rendered)
    true at its point.  One stream is built over all the models jointly, so
    the returned sets are directly comparable."""
    ctx = EvalContext(spec, [pm.model for pm in pointed])
    bits = [ctx.start_bit(k, pm.world) for k, pm in enumerate(pointed)]
    out: list[set[str]] = [set() for _ in pointed]
    for phi, mask in stream_with_meanings(ctx, depth, budget):
        text = print_formula(phi)
        for k, b in enumerate(bits):
            if (mask >> b) & 1:
                out[k].add(text)
    return [frozenset(s) for s in out]


# ---------------------------------------------------------------------------
# Meaning partition (complete engine for boolean dialects)


class JointPartition:
    """Partition of the joint configuration space into meaning classes,
    refined in modal-depth waves until saturation or ``max_depth``.

    Requires a dialect with negation: completeness rests on the meanings of
    bounded-depth formulas forming a boolean algebra, generated at each
    depth by the diamond images of the previous partition's classes (plus
    the depth-zero operators, which close within a wave).
    """

    def __init__(
        self,
        spec: LogicSpec,
        models: list[KripkeModel] | tuple[KripkeModel, ...],
        *,
        max_depth: int | None = None,
        max_tests: int = 500_000,
    ):
        if not spec.has_negation:
            raise UnsupportedFeaturesError(
                f"the meaning partition needs a boolean dialect; {spec.name!r} has no negation"
            )
        self.spec = spec
        self.ctx = EvalContext(spec, models)
        self.tests: list[tuple[Formula, int]] = []
        self.cells: list[int] = [self.ctx.full] if self.ctx.full else []
        self.depth = 0
        self.saturated = False
        self._chi_cache: dict[int, Formula] = {}
        self._run(max_depth, max_tests)

    # -- construction ----------------------------------------------------------

    def _run(self, max_depth: int | None, max_tests: int) -> None:
        ctx = self.ctx
        seen: set[int] = set()

        def wave(batch: list[tuple[Formula, int]]) -> bool:
            split_any = False
            queue = deque(batch)
            silent = _silent_wraps(ctx)
            while queue:
                phi, mask = queue.popleft()
                if mask in seen:
                    continue
                if len(seen) >= max_tests:
                    raise BudgetExceededError(max_tests)
                seen.add(mask)
                if self._apply(phi, mask):
                    split_any = True
                for build, transform in silent:
                    queue.append((build(phi), transform(mask)))
            return split_any

        atoms: list[tuple[Formula, int]] = [(Prop(p), ctx.prop_mask[p]) for p in ctx.props]
        if self.spec.allows("known"):
            atoms.append((Known(), ctx.known_mask))
        if self.spec.allows("nominal"):
            atoms.extend((Nom(i), ctx.nom_mask[i]) for i in ctx.noms)
        changed = wave(atoms)
        while True:
            if max_depth is not None and self.depth >= max_depth:
                self.saturated = not changed
                return
            if not changed and self.depth > 0:
                self.saturated = True
                return
            self.depth += 1
            self._chi_cache.clear()
            seeds = []
            for cell in list(self.cells):
                chi = self._chi_for(cell)
                for r in ctx.rels:
                    if self.spec.allows("diamond") or self.spec.allows("box"):
                        seeds.append((self._mk_diamond(r, chi), ctx.diamond_t(r, cell)))
                    if self.spec.allows("ddiamond") or self.spec.allows("dbox"):
                        seeds.append((self._mk_ddiamond(r, chi), ctx.ddiamond_t(r, cell)))
            changed = wave(seeds)
            if not changed:
                self.saturated = True
                return

    def _mk_diamond(self, rel: str, sub: Formula) -> Formula:
        if self.spec.allows("diamond"):
            return Diamond(rel, sub)
        return Not(Box(rel, Not(sub)))

    def _mk_ddiamond(self, rel: str, sub: Formula) -> Formula:
        if self.spec.allows("ddiamond"):
            return DDiamond(rel, sub)
        return Not(DBox(rel, Not(sub)))

    def _apply(self, phi: Formula, mask: int) -> bool:
        split_any = False
        new_cells = []
        for cell in self.cells:
            inside = cell & mask
            outside = cell & ~mask
            if inside and outside:
                new_cells.extend((inside, outside))
                split_any = True
            else:
                new_cells.append(cell)
        if split_any:
            self.cells = sorted(new_cells, key=lambda c: c & -c)
            self.tests.append((phi, mask))
            self._chi_cache.clear()
        return split_any

    # -- queries ---------------------------------------------------------------

    def cell_index_of(self, bit: int) -> int:
        for idx, cell in enumerate(self.cells):
            if (cell >> bit) & 1:
                return idx
        raise ValueError(f"bit {bit} outside the configuration space")

    def _chi_for(self, cell: int) -> Formula:
        if cell in self._chi_cache:
            return self._chi_cache[cell]
        parts = []
        for other in self.cells:
            if other == cell:
                continue
            for phi, mask in self.tests:
                mine = bool(cell & mask)
                if mine != bool(other & mask):
                    parts.append(phi if mine else Not(phi))
                    break
        out = conjoin(parts)
        self._chi_cache[cell] = out
        return out

    def characteristic(self, bit: int) -> Formula:
        """A formula true exactly on the bit's meaning class."""
        return self._chi_for(self.cells[self.cell_index_of(bit)])

    def separator_between(self, bit_true: int, bit_false: int) -> Formula | None:
        """A minimal-wave formula true at the first configuration and false
        at the second, or None if they share a class."""
        for phi, mask in self.tests:
            a = (mask >> bit_true) & 1
            b = (mask >> bit_false) & 1
            if a != b:
                return phi if a else Not(phi)
        return None


# ---------------------------------------------------------------------------
# Dialect-routed entry points


def _relational_route(spec: LogicSpec) -> bool:
    return not (_needs_memory_table(spec) or spec.allows("at"))


def separating_formula(
    spec: LogicSpec,
    left: KripkeModel,
    w: str,
    right: KripkeModel,
    v: str,
    *,
    depth: int = 4,
    max_tests: int = 500_000,
) -> Formula | None:
    """A formula of modal depth <= depth true at (left, w) and false at
    (right, v), or None when no such formula exists within the bound.

    For negation-free dialects the question is inherently one-directional:
    None only says nothing separates in this direction at this depth.
    """
    left.require_world(w)
    right.require_world(v)
    if _relational_route(spec):
        return _relational_separator(spec, left, w, right, v, depth)
    if not spec.has_negation:
        raise UnsupportedFeaturesError(
            "bounded search for memory or jump dialects needs negation in the dialect"
        )
    part = JointPartition(spec, [left, right], max_depth=depth, max_tests=max_tests)
    return part.separator_between(part.ctx.start_bit(0, w), part.ctx.start_bit(1, v))


def _relational_separator(spec, left, w, right, v, depth):
    from .equivalence import Config, _Engine, _Tracer, conditions_for

    engine = _Engine(conditions_for(spec), left, right, MAX_CONFIGS)
    initial = (Config(frozenset(left.mem), w), Config(frozenset(right.mem), v))
    engine.run(initial)
    if initial in engine.alive:
        return None
    rnd, _ = engine.dead[initial]
    if rnd > depth:
        return None
    return _Tracer(spec, engine).trace(initial)


def equivalent_up_to(
    spec: LogicSpec,
    left: KripkeModel,
    w: str,
    right: KripkeModel,
    v: str,
    depth: int,
    *,
    max_tests: int = 500_000,
) -> bool:
    """Do the two points satisfy exactly the same formulas of the dialect up
    to the given modal depth?  Always the symmetric question, including for
    negation-free dialects (both directed inclusions are checked)."""
    left.require_world(w)
    right.require_world(v)
    if not _relational_route(spec):
        if not spec.has_negation:
            raise UnsupportedFeaturesError(
                "bounded comparison for memory or jump dialects needs negation in the dialect"
            )
        part = JointPartition(spec, [left, right], max_depth=depth, max_tests=max_tests)
        a = part.cell_index_of(part.ctx.start_bit(0, w))
        b = part.cell_index_of(part.ctx.start_bit(1, v))
        return a == b
    if spec.has_negation:
        return _survives_to(spec, left, w, right, v, depth)
    return _survives_to(spec, left, w, right, v, depth) and _survives_to(
        spec, right, v, left, w, depth
    )


def _survives_to(spec, left, w, right, v, depth) -> bool:
    from .equivalence import Config, _Engine, conditions_for

    engine = _Engine(conditions_for(spec), left, right, MAX_CONFIGS)
    initial = (Config(frozenset(left.mem), w), Config(frozenset(right.mem), v))
    engine.run(initial)
    if initial in engine.alive:
        return True
    rnd, _ = engine.dead[initial]
    return rnd > depth
