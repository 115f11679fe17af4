"""Formula syntax: signatures, dialects, the AST, parsing and printing.

The surface grammar (ASCII) is:

    formula  := iff
    iff      := impl ('<->' iff)?                  # right-associative
    impl     := or ('->' impl)?                    # right-associative
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '~' unary | '<'IDENT'>' unary | '['IDENT']' unary
              | '<<'IDENT'>>' unary | '[['IDENT']]' unary
              | '@'IDENT unary | 'rem' unary | 'forg' unary | 'erase' unary
              | atom
    atom     := 'true' | 'false' | 'known' | IDENT | "'"IDENT | '(' formula ')'

IDENT is [a-zA-Z][a-zA-Z0-9_]*; a bare IDENT is a proposition, 'IDENT is a
nominal.  '#' starts a comment that runs to end of line.  Unary operators bind
tightest, then '&', '|', '->', '<->'.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InvariantViolationError,
    OperatorNotInDialectError,
    ParseError,
    UnknownNameError,
)

# Operators a dialect may enable.  The propositional connectives are always
# available (negation gated by LogicSpec.has_negation).
OPERATORS = frozenset(
    {
        "diamond",
        "box",
        "ddiamond",
        "dbox",
        "known",
        "remember",
        "forget",
        "erase",
        "nominal",
        "at",
    }
)

# Operators whose presence makes a dialect a memory logic; every memory logic
# must provide at least remember and known.
MEMORY_OPERATORS = frozenset({"known", "remember", "forget", "erase", "ddiamond", "dbox"})

RESERVED_WORDS = frozenset({"true", "false", "rem", "forg", "erase", "known"})

_IDENT_HEAD = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_IDENT_TAIL = _IDENT_HEAD | set("0123456789_")


def _check_names(names, kind: str) -> None:
    seen = set()
    for name in names:
        if not name or name[0] not in _IDENT_HEAD or any(c not in _IDENT_TAIL for c in name[1:]):
            raise InvariantViolationError(f"{kind} name {name!r} is not a valid identifier")
        if name in RESERVED_WORDS:
            raise InvariantViolationError(f"{kind} name {name!r} is a reserved word")
        if name in seen:
            raise InvariantViolationError(f"duplicate {kind} name {name!r}")
        seen.add(name)


@dataclass(frozen=True)
class Signature:
    """The vocabulary a formula may draw from: propositions, relations, nominals.

    The three name lists must be pairwise disjoint and free of duplicates.
    """

    props: tuple[str, ...] = ()
    rels: tuple[str, ...] = ()
    noms: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "props", tuple(self.props))
        object.__setattr__(self, "rels", tuple(self.rels))
        object.__setattr__(self, "noms", tuple(self.noms))
        _check_names(self.props, "proposition")
        _check_names(self.rels, "relation")
        _check_names(self.noms, "nominal")
        overlap = (set(self.props) & set(self.rels)) | (set(self.props) & set(self.noms)) | (
            set(self.rels) & set(self.noms)
        )
        if overlap:
            raise InvariantViolationError(
                f"signature name(s) used in more than one role: {sorted(overlap)}"
            )


@dataclass(frozen=True)
class LogicSpec:
    """A dialect: which operators are enabled, and whether negation is available.

    Invariants: enabling any memory operator requires both 'remember' and
    'known'; enabling 'at' requires 'nominal'.
    """

    name: str
    operators: frozenset[str] = frozenset()
    has_negation: bool = True

    def __post_init__(self):
        object.__setattr__(self, "operators", frozenset(self.operators))
        unknown = self.operators - OPERATORS
        if unknown:
            raise InvariantViolationError(f"unknown operator(s) {sorted(unknown)}")
        if self.operators & MEMORY_OPERATORS and not (
            {"remember", "known"} <= self.operators
        ):
            raise InvariantViolationError(
                f"dialect {self.name!r} enables memory operators but not both "
                "'remember' and 'known'"
            )
        if "at" in self.operators and "nominal" not in self.operators:
            raise InvariantViolationError(
                f"dialect {self.name!r} enables 'at' without 'nominal'"
            )

    def allows(self, operator: str) -> bool:
        return operator in self.operators


# The named dialects the CLI and tests speak about.
DIALECTS: dict[str, LogicSpec] = {
    "bml": LogicSpec("bml", frozenset({"diamond", "box"}), True),
    "bml-minus": LogicSpec("bml-minus", frozenset({"diamond"}), False),
    "hl": LogicSpec("hl", frozenset({"diamond", "box", "nominal"}), True),
    "hl-at": LogicSpec("hl-at", frozenset({"diamond", "box", "nominal", "at"}), True),
    "ml-diamond": LogicSpec("ml-diamond", frozenset({"remember", "known", "diamond"}), True),
    "ml-ddiamond": LogicSpec("ml-ddiamond", frozenset({"remember", "known", "ddiamond"}), True),
    "ml-forget": LogicSpec(
        "ml-forget", frozenset({"remember", "known", "forget", "diamond"}), True
    ),
    "ml-erase": LogicSpec(
        "ml-erase", frozenset({"remember", "known", "erase", "diamond"}), True
    ),
    "ml-full": LogicSpec(
        "ml-full",
        frozenset(
            {"remember", "known", "forget", "erase", "diamond", "box", "ddiamond", "dbox"}
        ),
        True,
    ),
}


def get_dialect(name: str) -> LogicSpec:
    try:
        return DIALECTS[name]
    except KeyError:
        raise UnknownNameError(name, "dialect") from None


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Formula:
    """Base class for formula nodes."""

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Nom(Formula):
    name: str


@dataclass(frozen=True)
class Known(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    rel: str
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    rel: str
    sub: Formula


@dataclass(frozen=True)
class DDiamond(Formula):
    """Double diamond: move to a successor after memorizing the current world."""

    rel: str
    sub: Formula


@dataclass(frozen=True)
class DBox(Formula):
    rel: str
    sub: Formula


@dataclass(frozen=True)
class Remember(Formula):
    sub: Formula


@dataclass(frozen=True)
class Forget(Formula):
    sub: Formula


@dataclass(frozen=True)
class Erase(Formula):
    sub: Formula


@dataclass(frozen=True)
class At(Formula):
    nom: str
    sub: Formula


# ---------------------------------------------------------------------------
# Depth and validation


def modal_depth(phi: Formula) -> int:
    """Maximum nesting of relation-traversing modalities.

    Remember/Forget/Erase/At and the boolean connectives contribute 0;
    Diamond/Box/DDiamond/DBox contribute 1.
    """
    match phi:
        case Top() | Bottom() | Prop() | Nom() | Known():
            return 0
        case Not(sub) | Remember(sub) | Forget(sub) | Erase(sub) | At(_, sub):
            return modal_depth(sub)
        case And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b):
            return max(modal_depth(a), modal_depth(b))
        case Diamond(_, sub) | Box(_, sub) | DDiamond(_, sub) | DBox(_, sub):
            return 1 + modal_depth(sub)
    raise TypeError(f"not a formula: {phi!r}")


def validate_formula(phi: Formula, sig: Signature, spec: LogicSpec) -> None:
    """Raise UnknownNameError/OperatorNotInDialectError if phi is not a
    well-formed formula of the dialect over the signature."""

    def need(op: str) -> None:
        if not spec.allows(op):
            raise OperatorNotInDialectError(op, spec.name)

    match phi:
        case Top() | Bottom():
            pass
        case Prop(name):
            if name not in sig.props:
                raise UnknownNameError(name, "proposition")
        case Nom(name):
            need("nominal")
            if name not in sig.noms:
                raise UnknownNameError(name, "nominal")
        case Known():
            need("known")
        case Not(sub):
            if not spec.has_negation:
                raise OperatorNotInDialectError("negation", spec.name)
            validate_formula(sub, sig, spec)
        case Implies(a, b) | Iff(a, b):
            # material implication smuggles in negation
            if not spec.has_negation:
                raise OperatorNotInDialectError("negation", spec.name)
            validate_formula(a, sig, spec)
            validate_formula(b, sig, spec)
        case And(a, b) | Or(a, b):
            validate_formula(a, sig, spec)
            validate_formula(b, sig, spec)
        case Diamond(rel, sub) | Box(rel, sub) | DDiamond(rel, sub) | DBox(rel, sub):
            need({Diamond: "diamond", Box: "box", DDiamond: "ddiamond", DBox: "dbox"}[type(phi)])
            if rel not in sig.rels:
                raise UnknownNameError(rel, "relation")
            validate_formula(sub, sig, spec)
        case Remember(sub):
            need("remember")
            validate_formula(sub, sig, spec)
        case Forget(sub):
            need("forget")
            validate_formula(sub, sig, spec)
        case Erase(sub):
            need("erase")
            validate_formula(sub, sig, spec)
        case At(nom, sub):
            need("at")
            if nom not in sig.noms:
                raise UnknownNameError(nom, "nominal")
            validate_formula(sub, sig, spec)
        case _:
            raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Lexer

_SYMBOLS = ("<->", "<<", ">>", "[[", "]]", "->", "<", ">", "[", "]", "(", ")", "&", "|", "~", "@", "'")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident', 'sym', 'eof'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _IDENT_HEAD:
            j = i + 1
            while j < n and text[j] in _IDENT_TAIL:
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token("sym", sym, i))
                i += len(sym)
                break
        else:
            raise ParseError(i, f"a token (got {c!r})")
    tokens.append(_Token("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], sig: Signature, spec: LogicSpec):
        self.tokens = tokens
        self.pos = 0
        self.sig = sig
        self.spec = spec

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_sym(self, sym: str) -> _Token:
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            raise ParseError(tok.pos, repr(sym))
        return self.take()

    def expect_ident(self, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(tok.pos, what)
        return self.take()

    def parse(self) -> Formula:
        phi = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(tok.pos, "end of input")
        return phi

    def iff(self) -> Formula:
        left = self.impl()
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def impl(self) -> Formula:
        left = self.or_()
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "->":
            self.take()
            return Implies(left, self.impl())
        return left

    def or_(self) -> Formula:
        phi = self.and_()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text == "|":
                self.take()
                phi = Or(phi, self.and_())
            else:
                return phi

    def and_(self) -> Formula:
        phi = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text == "&":
                self.take()
                phi = And(phi, self.unary())
            else:
                return phi

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "sym":
            if tok.text == "~":
                self.take()
                return Not(self.unary())
            if tok.text == "<":
                self.take()
                rel = self.expect_ident("a relation name").text
                self.expect_sym(">")
                return Diamond(rel, self.unary())
            if tok.text == "[":
                self.take()
                rel = self.expect_ident("a relation name").text
                self.expect_sym("]")
                return Box(rel, self.unary())
            if tok.text == "<<":
                self.take()
                rel = self.expect_ident("a relation name").text
                self.expect_sym(">>")
                return DDiamond(rel, self.unary())
            if tok.text == "[[":
                self.take()
                rel = self.expect_ident("a relation name").text
                self.expect_sym("]]")
                return DBox(rel, self.unary())
            if tok.text == "@":
                self.take()
                nom = self.expect_ident("a nominal name").text
                return At(nom, self.unary())
        if tok.kind == "ident" and tok.text in ("rem", "forg", "erase"):
            self.take()
            cls = {"rem": Remember, "forg": Forget, "erase": Erase}[tok.text]
            return cls(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "(":
            self.take()
            phi = self.iff()
            self.expect_sym(")")
            return phi
        if tok.kind == "sym" and tok.text == "'":
            self.take()
            name = self.expect_ident("a nominal name").text
            return Nom(name)
        if tok.kind == "ident":
            self.take()
            if tok.text == "true":
                return Top()
            if tok.text == "false":
                return Bottom()
            if tok.text == "known":
                return Known()
            return Prop(tok.text)
        raise ParseError(tok.pos, "a formula")


def parse_formula(text: str, sig: Signature, spec: LogicSpec) -> Formula:
    """Parse and validate a formula against the signature and dialect."""
    phi = _Parser(_tokenize(text), sig, spec).parse()
    validate_formula(phi, sig, spec)
    return phi


# ---------------------------------------------------------------------------
# Printer

# precedence: <-> 0, -> 1, | 2, & 3, unary/atoms 4
_PREC = {Iff: 0, Implies: 1, Or: 2, And: 3}


def print_formula(phi: Formula) -> str:
    """Render with minimal parentheses; parse_formula round-trips the result."""
    return _render(phi, 0)


def _render(phi: Formula, ctx: int) -> str:
    match phi:
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Known():
            return "known"
        case Prop(name):
            return name
        case Nom(name):
            return f"'{name}"
        case Not(sub):
            return f"~{_render(sub, 4)}"
        case Diamond(rel, sub):
            return f"<{rel}>{_render(sub, 4)}"
        case Box(rel, sub):
            return f"[{rel}]{_render(sub, 4)}"
        case DDiamond(rel, sub):
            return f"<<{rel}>>{_render(sub, 4)}"
        case DBox(rel, sub):
            return f"[[{rel}]]{_render(sub, 4)}"
        case At(nom, sub):
            return f"@{nom} {_render(sub, 4)}"
        case Remember(sub):
            return f"rem {_render(sub, 4)}"
        case Forget(sub):
            return f"forg {_render(sub, 4)}"
        case Erase(sub):
            return f"erase {_render(sub, 4)}"
        case And(a, b):
            out = f"{_render(a, 3)} & {_render(b, 4)}"
            return f"({out})" if ctx > 3 else out
        case Or(a, b):
            out = f"{_render(a, 2)} | {_render(b, 3)}"
            return f"({out})" if ctx > 2 else out
        case Implies(a, b):
            out = f"{_render(a, 2)} -> {_render(b, 1)}"
            return f"({out})" if ctx > 1 else out
        case Iff(a, b):
            out = f"{_render(a, 1)} <-> {_render(b, 0)}"
            return f"({out})" if ctx > 0 else out
    raise TypeError(f"not a formula: {phi!r}")


def formula_size(phi: Formula) -> int:
    """Node count of the syntax tree."""
    match phi:
        case Top() | Bottom() | Prop(_) | Nom(_) | Known():
            return 1
        case Not(sub) | Diamond(_, sub) | Box(_, sub) | DDiamond(_, sub) | DBox(_, sub):
            return 1 + formula_size(sub)
        case Remember(sub) | Forget(sub) | Erase(sub) | At(_, sub):
            return 1 + formula_size(sub)
        case And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b):
            return 1 + formula_size(a) + formula_size(b)
    raise TypeError(f"not a formula: {phi!r}")


def conjoin(parts) -> Formula:
    """Left fold of And over the parts, deduplicated and sorted by rendered
    text; the empty conjunction is true."""
    uniq = sorted({print_formula(p): p for p in parts}.items())
    if not uniq:
        return Top()
    out = uniq[0][1]
    for _, p in uniq[1:]:
        out = And(out, p)
    return out


def disjoin(parts) -> Formula:
    """Left fold of Or, deduplicated and sorted by rendered text; the empty
    disjunction is false."""
    uniq = sorted({print_formula(p): p for p in parts}.items())
    if not uniq:
        return Bottom()
    out = uniq[0][1]
    for _, p in uniq[1:]:
        out = Or(out, p)
    return out
