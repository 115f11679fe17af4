"""First-order structures over unary/binary vocabularies with constants,
Tarskian evaluation, quantifier rank, and the bounded back-and-forth game.

Formulas print in a Lisp-like normal form, e.g.
``(exists y (and (R x y) (P y)))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    InvariantViolationError,
    UnboundVariableError,
    UnknownSymbolError,
)

# ---------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class FOFormula:
    def __str__(self) -> str:
        return fo_print(self)


@dataclass(frozen=True)
class Top(FOFormula):
    pass


@dataclass(frozen=True)
class Bottom(FOFormula):
    pass


@dataclass(frozen=True)
class Pred(FOFormula):
    name: str
    arg: Term


@dataclass(frozen=True)
class Rel(FOFormula):
    name: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq(FOFormula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(FOFormula):
    sub: FOFormula


@dataclass(frozen=True)
class And(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Or(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Implies(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Exists(FOFormula):
    var: str
    sub: FOFormula


@dataclass(frozen=True)
class Forall(FOFormula):
    var: str
    sub: FOFormula


# An x-assignment (or any variable assignment): variable name -> element.
XAssignment = dict


@dataclass(frozen=True)
class FOStructure:
    """A finite relational structure with unary and binary predicates,
    constants, and built-in equality."""

    domain: tuple[str, ...]
    unary: dict[str, frozenset[str]] = field(default_factory=dict)
    binary: dict[str, frozenset[tuple[str, str]]] = field(default_factory=dict)
    consts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        domain = tuple(sorted(self.domain))
        if not domain or len(set(domain)) != len(domain):
            raise InvariantViolationError("domain must be nonempty and duplicate-free")
        dom = set(domain)
        unary = {name: frozenset(xs) for name, xs in self.unary.items()}
        binary = {name: frozenset(tuple(p) for p in ps) for name, ps in self.binary.items()}
        consts = dict(self.consts)
        for name, xs in unary.items():
            if not xs <= dom:
                raise InvariantViolationError(f"predicate {name!r} leaves the domain")
        for name, ps in binary.items():
            for a, b in ps:
                if a not in dom or b not in dom:
                    raise InvariantViolationError(f"relation {name!r} leaves the domain")
        for name, x in consts.items():
            if x not in dom:
                raise InvariantViolationError(f"constant {name!r} leaves the domain")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "unary", unary)
        object.__setattr__(self, "binary", binary)
        object.__setattr__(self, "consts", consts)

    def __hash__(self):
        return hash(
            (
                self.domain,
                tuple((n, tuple(sorted(self.unary[n]))) for n in sorted(self.unary)),
                tuple((n, tuple(sorted(self.binary[n]))) for n in sorted(self.binary)),
                tuple(sorted(self.consts.items())),
            )
        )


# ---------------------------------------------------------------------------
# Evaluation


def _term_value(structure: FOStructure, env: dict, term: Term) -> str:
    match term:
        case Var(name):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariableError(name) from None
        case Const(name):
            try:
                return structure.consts[name]
            except KeyError:
                raise UnknownSymbolError(name) from None
    raise TypeError(f"not a term: {term!r}")


def fo_check(structure: FOStructure, assignment: XAssignment, phi: FOFormula) -> bool:
    """Tarskian truth of phi in the structure under the assignment."""
    return _eval(structure, dict(assignment), phi)


def _eval(s: FOStructure, env: dict, phi: FOFormula) -> bool:
    match phi:
        case Top():
            return True
        case Bottom():
            return False
        case Pred(name, arg):
            if name not in s.unary:
                raise UnknownSymbolError(name)
            return _term_value(s, env, arg) in s.unary[name]
        case Rel(name, left, right):
            if name not in s.binary:
                raise UnknownSymbolError(name)
            return (_term_value(s, env, left), _term_value(s, env, right)) in s.binary[name]
        case Eq(left, right):
            return _term_value(s, env, left) == _term_value(s, env, right)
        case Not(sub):
            return not _eval(s, env, sub)
        case And(a, b):
            return _eval(s, env, a) and _eval(s, env, b)
        case Or(a, b):
            return _eval(s, env, a) or _eval(s, env, b)
        case Implies(a, b):
            return (not _eval(s, env, a)) or _eval(s, env, b)
        case Exists(var, sub):
            return any(_eval(s, {**env, var: d}, sub) for d in s.domain)
        case Forall(var, sub):
            return all(_eval(s, {**env, var: d}, sub) for d in s.domain)
    raise TypeError(f"not a first-order formula: {phi!r}")


def quantifier_rank(phi: FOFormula) -> int:
    """Maximum nesting depth of quantifiers."""
    match phi:
        case Top() | Bottom() | Pred() | Rel() | Eq():
            return 0
        case Not(sub):
            return quantifier_rank(sub)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return max(quantifier_rank(a), quantifier_rank(b))
        case Exists(_, sub) | Forall(_, sub):
            return 1 + quantifier_rank(sub)
    raise TypeError(f"not a first-order formula: {phi!r}")


# ---------------------------------------------------------------------------
# Printing


def _term_str(term: Term) -> str:
    match term:
        case Var(name) | Const(name):
            return name
    raise TypeError(f"not a term: {term!r}")


def fo_print(phi: FOFormula) -> str:
    match phi:
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Pred(name, arg):
            return f"({name} {_term_str(arg)})"
        case Rel(name, left, right):
            return f"({name} {_term_str(left)} {_term_str(right)})"
        case Eq(left, right):
            return f"(= {_term_str(left)} {_term_str(right)})"
        case Not(sub):
            return f"(not {fo_print(sub)})"
        case And(a, b):
            return f"(and {fo_print(a)} {fo_print(b)})"
        case Or(a, b):
            return f"(or {fo_print(a)} {fo_print(b)})"
        case Implies(a, b):
            return f"(implies {fo_print(a)} {fo_print(b)})"
        case Exists(var, sub):
            return f"(exists {var} {fo_print(sub)})"
        case Forall(var, sub):
            return f"(forall {var} {fo_print(sub)})"
    raise TypeError(f"not a first-order formula: {phi!r}")


# ---------------------------------------------------------------------------
# Bounded back-and-forth games


def _sole_element(assignment: XAssignment) -> str:
    if len(assignment) != 1:
        raise InvariantViolationError("the game starts from a one-variable assignment")
    return next(iter(assignment.values()))


def back_and_forth(
    a: FOStructure,
    g: XAssignment,
    b: FOStructure,
    h: XAssignment,
    rounds: int | None = None,
) -> bool:
    """Can Duplicator survive ``rounds`` rounds of the back-and-forth game
    between (a, g) and (b, h)?

    True iff the two pointed structures agree on all first-order formulas of
    quantifier rank <= rounds in one free variable.  The default round count
    |a| * |b| is a heuristic cap that is always enough for structures this
    size (the distinguishing rank of non-equivalent finite structures is
    bounded well below it).
    """
    if set(a.unary) != set(b.unary) or set(a.binary) != set(b.binary) or set(a.consts) != set(
        b.consts
    ):
        raise UnknownSymbolError("structures must share a vocabulary")
    if rounds is None:
        rounds = len(a.domain) * len(b.domain)
    unary_names = tuple(sorted(a.unary))
    binary_names = tuple(sorted(a.binary))

    def atoms_agree(pairs: frozenset[tuple[str, str]]) -> bool:
        for ta, tb in pairs:
            for p in unary_names:
                if (ta in a.unary[p]) != (tb in b.unary[p]):
                    return False
            for ua, ub in pairs:
                if (ta == ua) != (tb == ub):
                    return False
                for r in binary_names:
                    if ((ta, ua) in a.binary[r]) != ((tb, ub) in b.binary[r]):
                        return False
        return True

    # A game position is just the set of chosen correspondences (with the
    # constant correspondences mixed in); order and repetition are irrelevant
    # to atomic agreement, which keeps the memo small for large round counts.
    @lru_cache(maxsize=None)
    def survive(pairs: frozenset[tuple[str, str]], k: int) -> bool:
        if not atoms_agree(pairs):
            return False
        if k == 0:
            return True
        for x in a.domain:
            if not any(survive(pairs | {(x, y)}, k - 1) for y in b.domain):
                return False
        for y in b.domain:
            if not any(survive(pairs | {(x, y)}, k - 1) for x in a.domain):
                return False
        return True

    start = frozenset({(_sole_element(g), _sole_element(h))}) | frozenset(
        (a.consts[c], b.consts[c]) for c in sorted(a.consts)
    )
    return survive(start, rounds)
