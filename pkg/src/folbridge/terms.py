"""Core language syntax: de Bruijn terms, declarations, environments.

Terms double as types and Prop-level formulas (CIC style). Variables are
de Bruijn indices; index 0 is the innermost binder. Binder name fields are
printing hints only and are ignored by alpha_eq.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator


class FolbridgeError(Exception):
    """Base class for all package errors."""


class ScopeError(FolbridgeError):
    pass


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    """Bound variable, de Bruijn index (0 = innermost binder)."""
    index: int


@dataclass(frozen=True)
class Const(Term):
    """Reference to a global definition or builtin function."""
    name: str


@dataclass(frozen=True)
class Ctor(Term):
    """Constructor of an inductive type, by declaration position."""
    inductive: str
    ctor_index: int


@dataclass(frozen=True)
class Ind(Term):
    """An inductive type constructor itself (e.g. list)."""
    inductive: str


@dataclass(frozen=True)
class TVar(Term):
    """Rigid type symbol: a section-style type variable fixed by the goal.

    Introduced by the pipeline when stripping the goal's leading type
    binders; closed (no de Bruijn index) and never bound.
    """
    name: str


@dataclass(frozen=True)
class IntT(Term):
    """The builtin integer type."""


@dataclass(frozen=True)
class SortType(Term):
    pass


@dataclass(frozen=True)
class SortProp(Term):
    pass


@dataclass(frozen=True)
class Pi(Term):
    """Dependent product; houses both forall and -> (non-dependent)."""
    binder: str
    domain: Term
    codomain: Term


@dataclass(frozen=True)
class Lam(Term):
    binder: str
    domain: Term
    body: Term


@dataclass(frozen=True)
class App(Term):
    head: Term
    arg: Term


@dataclass(frozen=True)
class Branch:
    """Match branch: body lives under len(binders) extra binders.

    Constructor argument i (0-based, in declaration order) has de Bruijn
    index len(binders)-1-i inside the body.
    """
    binders: tuple[str, ...]
    body: Term

    @property
    def arity(self) -> int:
        return len(self.binders)


@dataclass(frozen=True)
class Match(Term):
    """Non-dependent pattern matching, one branch per constructor in
    declaration order. scrutinee_type/return_type are explicit; the parser
    fills scrutinee_type by synthesis."""
    scrutinee: Term
    scrutinee_type: Term
    return_type: Term
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class Fix(Term):
    """Structural fixpoint. body lives under one extra binder (the
    recursive self-reference); decreasing indexes the Pi-chain argument
    that must be constructor-headed before unfolding."""
    binder: str
    decreasing: int
    full_type: Term
    body: Term


@dataclass(frozen=True)
class Eq(Term):
    """Prop-level equality at an explicit type."""
    at_type: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class TrueP(Term):
    pass


@dataclass(frozen=True)
class FalseP(Term):
    pass


@dataclass(frozen=True)
class And(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Or(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not(Term):
    body: Term


@dataclass(frozen=True)
class Exists(Term):
    """Existential quantifier; only produced by the exhaustiveness axiom
    generator (off by default) and rejected by FOL extraction."""
    binder: str
    domain: Term
    body: Term


@dataclass(frozen=True)
class IntLit(Term):
    value: int


TYPE = SortType()
PROP = SortProp()
INT = IntT()
BOOL = Ind("Bool")
TRUE = Ctor("Bool", 0)
FALSE = Ctor("Bool", 1)


# ---------------------------------------------------------------------------
# Declarations and environments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CtorDecl:
    """Constructor declaration. arg_types are de Bruijn terms over the
    inductive's type parameters (for params (A, B): Var 1 = A, Var 0 = B)
    and may reference this or earlier inductives; no Pi inside."""
    name: str
    arg_types: tuple[Term, ...]


@dataclass(frozen=True)
class InductiveDecl:
    name: str
    params: tuple[str, ...]
    ctors: tuple[CtorDecl, ...]


@dataclass(frozen=True)
class Definition:
    name: str
    type: Term
    body: Term


BOOL_DECL = InductiveDecl("Bool", (), (CtorDecl("true", ()), CtorDecl("false", ())))


def _pi(*steps: Term) -> Term:
    ty = steps[-1]
    for dom in reversed(steps[:-1]):
        ty = Pi("_", dom, ty)
    return ty


# Builtin function table: opaque constants with fixed types. Delta never
# unfolds them; normalize/eval interpret them on literal arguments.
BUILTIN_FUNCTIONS: dict[str, Term] = {
    "add": _pi(INT, INT, INT),
    "sub": _pi(INT, INT, INT),
    "mul": _pi(INT, INT, INT),
    "le": _pi(INT, INT, BOOL),
    "lt": _pi(INT, INT, BOOL),
    "orb": _pi(BOOL, BOOL, BOOL),
    "andb": _pi(BOOL, BOOL, BOOL),
    "negb": _pi(BOOL, BOOL),
    "eqb": Pi("A", TYPE, _pi(Var(0), Var(1), BOOL)),
}

# Type names the SMT back-end interprets natively; no datatype axioms and
# no definition fetching for these (§4.1-style exclusion list).
INTERPRETED_TYPES = ("Int", "Bool")


@dataclass
class GlobalEnv:
    """Named declarations. Insertion order is declaration order; names are
    unique across inductives, constructors, definitions and builtins."""
    inductives: dict[str, InductiveDecl] = field(default_factory=dict)
    definitions: dict[str, Definition] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if "Bool" not in self.inductives:
            self.inductives = {"Bool": BOOL_DECL, **self.inductives}

    # -- lookup ------------------------------------------------------------

    def inductive(self, name: str) -> InductiveDecl:
        try:
            return self.inductives[name]
        except KeyError:
            raise ScopeError(f"unknown inductive type: {name}") from None

    def definition(self, name: str) -> Definition:
        try:
            return self.definitions[name]
        except KeyError:
            raise ScopeError(f"unknown constant: {name}") from None

    def ctor_decl(self, ind: str, index: int) -> CtorDecl:
        decl = self.inductive(ind)
        if not 0 <= index < len(decl.ctors):
            raise ScopeError(f"{ind} has no constructor #{index}")
        return decl.ctors[index]

    def find_ctor(self, name: str) -> tuple[str, int] | None:
        for decl in self.inductives.values():
            for i, c in enumerate(decl.ctors):
                if c.name == name:
                    return decl.name, i
        return None

    def names(self) -> set[str]:
        out = set(self.inductives) | set(self.definitions) | set(BUILTIN_FUNCTIONS)
        for decl in self.inductives.values():
            out.update(c.name for c in decl.ctors)
        return out

    # -- declaration (parser-facing) ----------------------------------------

    def declare_inductive(self, decl: InductiveDecl) -> None:
        if not decl.ctors:
            raise ScopeError(f"inductive {decl.name} needs at least one constructor")
        taken = self.names()
        for n in [decl.name] + [c.name for c in decl.ctors]:
            if n in taken:
                raise ScopeError(f"name already declared: {n}")
        for c in decl.ctors:
            for t in c.arg_types:
                if any(isinstance(s, (Pi, Lam, Match, Fix)) for s in subterms(t)):
                    raise ScopeError(
                        f"constructor {c.name}: argument types must be first-order")
        self.inductives[decl.name] = decl

    def declare_definition(self, d: Definition) -> None:
        if d.name in self.names():
            raise ScopeError(f"name already declared: {d.name}")
        self.definitions[d.name] = d


def builtin_type(name: str) -> Term | None:
    return BUILTIN_FUNCTIONS.get(name)


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------

@dataclass
class Problem:
    env: GlobalEnv
    hypotheses: list[tuple[str, Term]]
    goal: Term
    lemma_params: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Traversal helpers
# ---------------------------------------------------------------------------

def children(t: Term) -> tuple[tuple[Term, int], ...]:
    """Immediate subterms with the number of binders crossed to reach each."""
    if isinstance(t, Pi):
        return ((t.domain, 0), (t.codomain, 1))
    if isinstance(t, Lam):
        return ((t.domain, 0), (t.body, 1))
    if isinstance(t, App):
        return ((t.head, 0), (t.arg, 0))
    if isinstance(t, Match):
        # scrutinee_type is None on unelaborated parser output.
        out = [(t.scrutinee, 0)]
        if t.scrutinee_type is not None:
            out.append((t.scrutinee_type, 0))
        out.append((t.return_type, 0))
        out.extend((b.body, b.arity) for b in t.branches)
        return tuple(out)
    if isinstance(t, Fix):
        return ((t.full_type, 0), (t.body, 1))
    if isinstance(t, Eq):
        if t.at_type is None:
            return ((t.lhs, 0), (t.rhs, 0))
        return ((t.at_type, 0), (t.lhs, 0), (t.rhs, 0))
    if isinstance(t, (And, Or)):
        return ((t.lhs, 0), (t.rhs, 0))
    if isinstance(t, Not):
        return ((t.body, 0),)
    if isinstance(t, Exists):
        return ((t.domain, 0), (t.body, 1))
    return ()


def subterms(t: Term) -> Iterator[Term]:
    """Preorder walk including t itself."""
    yield t
    for child, _ in children(t):
        yield from subterms(child)


def map_subterms(t: Term, f, depth: int = 0) -> Term:
    """Rebuild t with f applied to every immediate child; f(child, depth)
    receives the binder depth of the child."""
    if isinstance(t, Pi):
        return Pi(t.binder, f(t.domain, depth), f(t.codomain, depth + 1))
    if isinstance(t, Lam):
        return Lam(t.binder, f(t.domain, depth), f(t.body, depth + 1))
    if isinstance(t, App):
        return App(f(t.head, depth), f(t.arg, depth))
    if isinstance(t, Match):
        return Match(
            f(t.scrutinee, depth),
            None if t.scrutinee_type is None else f(t.scrutinee_type, depth),
            f(t.return_type, depth),
            tuple(Branch(b.binders, f(b.body, depth + b.arity)) for b in t.branches),
        )
    if isinstance(t, Fix):
        return Fix(t.binder, t.decreasing, f(t.full_type, depth), f(t.body, depth + 1))
    if isinstance(t, Eq):
        return Eq(None if t.at_type is None else f(t.at_type, depth),
                  f(t.lhs, depth), f(t.rhs, depth))
    if isinstance(t, And):
        return And(f(t.lhs, depth), f(t.rhs, depth))
    if isinstance(t, Or):
        return Or(f(t.lhs, depth), f(t.rhs, depth))
    if isinstance(t, Not):
        return Not(f(t.body, depth))
    if isinstance(t, Exists):
        return Exists(t.binder, f(t.domain, depth), f(t.body, depth + 1))
    return t


# ---------------------------------------------------------------------------
# Lifting and substitution
# ---------------------------------------------------------------------------

def lift(t: Term, amount: int, cutoff: int = 0) -> Term:
    """Raise every free Var index >= cutoff by amount."""
    if amount == 0:
        return t
    if isinstance(t, Var):
        return Var(t.index + amount) if t.index >= cutoff else t
    return map_subterms(t, lambda s, extra: lift(s, amount, cutoff + extra))


def subst(t: Term, index: int, replacement: Term) -> Term:
    """Capture-avoiding substitution of Var(index) by replacement; free
    variables above index are decremented."""
    if isinstance(t, Var):
        if t.index == index:
            return lift(replacement, index)
        if t.index > index:
            return Var(t.index - 1)
        return t
    return map_subterms(t, lambda s, extra: subst(s, index + extra, replacement))


def subst_list(t: Term, values: list[Term]) -> Term:
    """Simultaneous substitution Var(i) := values[i] for i < len(values);
    higher frees drop by len(values). values are in the outer context."""
    n = len(values)

    def go(s: Term, depth: int) -> Term:
        if isinstance(s, Var):
            if s.index < depth:
                return s
            k = s.index - depth
            if k < n:
                return lift(values[k], depth)
            return Var(s.index - n)
        return map_subterms(s, lambda c, extra: go(c, depth + extra))

    return go(t, 0)


def well_scoped(t: Term, depth: int = 0) -> bool:
    """Check every Var is bound by an enclosing binder or below depth."""
    if isinstance(t, Var):
        return 0 <= t.index < depth
    return all(well_scoped(c, depth + extra) for c, extra in children(t))


def is_closed(t: Term) -> bool:
    return well_scoped(t, 0)


def alpha_eq(t: Term, u: Term) -> bool:
    """Structural equality ignoring binder name hints."""
    if type(t) is not type(u):
        return False
    if isinstance(t, Var):
        return t.index == u.index
    if isinstance(t, Const):
        return t.name == u.name
    if isinstance(t, Ctor):
        return t.inductive == u.inductive and t.ctor_index == u.ctor_index
    if isinstance(t, Ind):
        return t.inductive == u.inductive
    if isinstance(t, TVar):
        return t.name == u.name
    if isinstance(t, IntLit):
        return t.value == u.value
    if isinstance(t, Fix) and t.decreasing != u.decreasing:
        return False
    if isinstance(t, Match):
        if len(t.branches) != len(u.branches):
            return False
        if any(a.arity != b.arity for a, b in zip(t.branches, u.branches)):
            return False
    tc, uc = children(t), children(u)
    if len(tc) != len(uc):
        return False
    return all(alpha_eq(a, b) for (a, _), (b, _) in zip(tc, uc))


# ---------------------------------------------------------------------------
# Spines and telescopes
# ---------------------------------------------------------------------------

def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into (head, [args])."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.head
    args.reverse()
    return t, args


def make_app(head: Term, args: list[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def strip_pis(t: Term) -> tuple[list[tuple[str, Term]], Term]:
    """Unfold a Pi chain into ([(name, domain), ...], codomain); each
    domain is in the context extended by the previous binders."""
    binders: list[tuple[str, Term]] = []
    while isinstance(t, Pi):
        binders.append((t.binder, t.domain))
        t = t.codomain
    return binders, t


def make_pis(binders: list[tuple[str, Term]], body: Term) -> Term:
    for name, dom in reversed(binders):
        body = Pi(name, dom, body)
    return body


def strip_lams(t: Term) -> tuple[list[tuple[str, Term]], Term]:
    binders: list[tuple[str, Term]] = []
    while isinstance(t, Lam):
        binders.append((t.binder, t.domain))
        t = t.body
    return binders, t


def make_lams(binders: list[tuple[str, Term]], body: Term) -> Term:
    for name, dom in reversed(binders):
        body = Lam(name, dom, body)
    return body


# ---------------------------------------------------------------------------
# Inductive type helpers
# ---------------------------------------------------------------------------

def ind_type(decl: InductiveDecl) -> Term:
    """Type of the inductive's type constructor: Type -> ... -> Type."""
    ty: Term = TYPE
    for _ in decl.params:
        ty = Pi("_", TYPE, ty)
    return ty


def ctor_type(env: GlobalEnv, ind: str, index: int) -> Term:
    """Closed type of a constructor: forall params, args -> I params."""
    decl = env.inductive(ind)
    c = decl.ctors[index]
    p = len(decl.params)
    n = len(c.arg_types)
    # Result type under params and value binders: params are Var(n+p-1-i).
    result = make_app(Ind(ind), [Var(n + p - 1 - i) for i in range(p)])
    ty = result
    # Value binders, innermost last; arg_types[j] lives under the params
    # only, so lift it past the j earlier value binders.
    for j in reversed(range(n)):
        ty = Pi("_", lift(c.arg_types[j], j), ty)
    for name in reversed(decl.params):
        ty = Pi(name, TYPE, ty)
    return ty


def ctor_arg_types(env: GlobalEnv, ind: str, index: int, type_args: list[Term]) -> list[Term]:
    """Constructor argument types instantiated at the given type args
    (which must not be captured: they are in the caller's context and the
    results reference nothing else)."""
    decl = env.inductive(ind)
    c = decl.ctors[index]
    if len(type_args) != len(decl.params):
        raise ScopeError(f"{ind} expects {len(decl.params)} type argument(s)")
    values = list(reversed(type_args))  # Var(0) is the last param
    return [subst_list(t, values) for t in c.arg_types]


def as_inductive_instance(t: Term) -> tuple[str, list[Term]] | None:
    """Recognize `I T1 ... Tn` with an Ind head; returns (name, args)."""
    head, args = spine(t)
    if isinstance(head, Ind):
        return head.inductive, args
    return None
