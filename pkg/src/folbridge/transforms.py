"""The six context-extending transformations.

Each consumes a ProofState and returns new named hypotheses paired with
Justifications; none of them modifies existing hypotheses or the goal.
The certify module replays every justification before a pipeline commits
the hypothesis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .conversion import Fuel, beta_reduce, typecheck
from .terms import (
    And, App, Const, Ctor, Eq, Exists, FolbridgeError, GlobalEnv, Ind,
    IntT, Match, Not, Or, Pi, SortProp, SortType, TVar, Term, Var,
    alpha_eq, as_inductive_instance, children, ctor_arg_types, is_closed,
    lift, make_app, make_pis, map_subterms, spine, strip_lams, strip_pis,
    subst, subst_list, subterms, INTERPRETED_TYPES,
)


class TransformError(FolbridgeError):
    pass


class UnknownConstant(TransformError):
    pass


class AlreadyPresent(TransformError):
    pass


class NotAnEquation(TransformError):
    pass


class NoFixpointFound(TransformError):
    pass


class NoMatchOnBoundVar(TransformError):
    pass


class NotAlgebraic(TransformError):
    pass


# ---------------------------------------------------------------------------
# Justifications and proof states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    pass


@dataclass(frozen=True)
class Given(Justification):
    """User-supplied hypothesis or lemma; taken on trust."""


@dataclass(frozen=True)
class ByDefinition(Justification):
    const_name: str


@dataclass(frozen=True)
class ByConversion(Justification):
    """Closes by `rewrite source; reflexivity`: plain convertibility after
    an optional oriented rewrite with the cited source hypothesis."""
    source: str | None = None


@dataclass(frozen=True)
class ByCaseConversion(Justification):
    """Conversion after case-splitting the listed telescope binders
    (positions from the outside) to the given depth; the destruct-then-
    reflexivity pattern required by guarded fix unfolding."""
    source: str | None
    split_vars: tuple[int, ...]
    depth: int = 1


@dataclass(frozen=True)
class ByInstantiation(Justification):
    source: str
    type_args: tuple[Term, ...]


@dataclass(frozen=True)
class Injectivity:
    ctor_index: int


@dataclass(frozen=True)
class Disjointness:
    first: int
    second: int


@dataclass(frozen=True)
class Exhaustiveness:
    pass


@dataclass(frozen=True)
class DatatypeAxiom(Justification):
    instance: Term
    kind: Injectivity | Disjointness | Exhaustiveness


@dataclass(frozen=True)
class Hypothesis:
    name: str
    statement: Term
    justification: Justification


@dataclass
class ProofState:
    """Named hypotheses plus goal; extended but never rewritten."""
    env: GlobalEnv
    hypotheses: list[Hypothesis] = field(default_factory=list)
    goal: Term = None

    def find(self, name: str) -> Hypothesis:
        for h in self.hypotheses:
            if h.name == name:
                return h
        raise TransformError(f"no hypothesis named {name!r}")

    def has_alpha(self, statement: Term) -> bool:
        return any(alpha_eq(h.statement, statement) for h in self.hypotheses)

    def fresh_name(self, base: str) -> str:
        used = {h.name for h in self.hypotheses} | self.env.names()
        if base not in used:
            return base
        i = 2
        while f"{base}_{i}" in used:
            i += 1
        return f"{base}_{i}"

    def add(self, hyp: Hypothesis) -> None:
        self.hypotheses.append(hyp)


# ---------------------------------------------------------------------------
# Definitions (get_def)
# ---------------------------------------------------------------------------

def get_def(state: ProofState, const_name: str) -> Hypothesis:
    """Add the verbatim environment definition as a proven equation."""
    if const_name not in state.env.definitions:
        raise UnknownConstant(f"no definition for {const_name!r}")
    d = state.env.definitions[const_name]
    stmt = Eq(d.type, Const(const_name), d.body)
    if state.has_alpha(stmt):
        raise AlreadyPresent(f"{const_name} is already unfolded in the context")
    return Hypothesis(state.fresh_name(f"{const_name}_def"), stmt,
                      ByDefinition(const_name))


# ---------------------------------------------------------------------------
# Expansion (arrow_split / gen_eq / expand)
# ---------------------------------------------------------------------------

def arrow_split(ty: Term) -> tuple[list[Term], Term]:
    """Pi chain to ([A0..An], B); each piece keeps the de Bruijn references
    into the previous binders."""
    binders, codomain = strip_pis(ty)
    return [d for _, d in binders], codomain


def gen_eq(domains: list[Term], codomain: Term, t: Term, u: Term,
           names: list[str] | None = None) -> Term:
    """forall x0..xn, t x0..xn = u x0..xn; t and u are lifted at every
    recursive step, the domain/codomain pieces already live in the
    extended contexts."""
    if not domains:
        return Eq(codomain, t, u)
    name = names[0] if names else "x"
    rest_names = names[1:] if names else None
    inner = gen_eq(domains[1:], codomain,
                   App(lift(t, 1), Var(0)), App(lift(u, 1), Var(0)),
                   rest_names)
    return Pi(name, domains[0], inner)


def _base_name(hyp_name: str) -> str:
    for suffix in ("_def", "_eq", "_unfix"):
        if hyp_name.endswith(suffix):
            return hyp_name[: -len(suffix)]
    return hyp_name


def expand(state: ProofState, hyp_name: str) -> Hypothesis:
    """t = (fun xs => b)  ~>  forall xs, t xs = b. Identity for
    equations at zero-arrow types."""
    h = state.find(hyp_name)
    if not isinstance(h.statement, Eq):
        raise NotAnEquation(f"{hyp_name} is not an equation")
    eq = h.statement
    binders, codomain = strip_pis(eq.at_type)
    if not binders:
        return Hypothesis(state.fresh_name(f"{_base_name(hyp_name)}_eq"),
                          eq, ByConversion(source=hyp_name))
    stmt = gen_eq([d for _, d in binders], codomain, eq.lhs, eq.rhs,
                  names=[n for n, _ in binders])
    stmt = beta_reduce(stmt)
    return Hypothesis(state.fresh_name(f"{_base_name(hyp_name)}_eq"),
                      stmt, ByConversion(source=hyp_name))


# ---------------------------------------------------------------------------
# Elimination of fixpoints
# ---------------------------------------------------------------------------

def eliminate_fix(state: ProofState, hyp_name: str) -> Hypothesis:
    """Replace the anonymous fix with the constant it defines:
    forall xs, f xs = (fix F ys := b) zs  ~>  forall xs, f xs = b' with the
    recursive self-calls rewritten to f."""
    h = state.find(hyp_name)
    binders, body = strip_pis(h.statement)
    if not isinstance(body, Eq):
        raise NoFixpointFound(f"{hyp_name} is not a universally quantified equation")
    n = len(binders)
    rhead, rargs = spine(body.rhs)
    from .terms import Fix as FixNode
    if not isinstance(rhead, FixNode):
        raise NoFixpointFound(f"{hyp_name}: right-hand side is not a fix application")
    k = len(rargs)
    if rargs != [Var(k - 1 - i) for i in range(k)]:
        raise NoFixpointFound(f"{hyp_name}: fix is not applied to the bound variables")
    lhead, largs = spine(body.lhs)
    if not isinstance(lhead, Const):
        raise NoFixpointFound(f"{hyp_name}: left-hand side head is not a constant")
    if largs != [Var(n - 1 - i) for i in range(n)]:
        raise NoFixpointFound(f"{hyp_name}: constant is not applied to all bound variables")
    lam_binders, fix_inner = strip_lams(rhead.body)
    if len(lam_binders) != k:
        raise NoFixpointFound(f"{hyp_name}: fix binder list does not match its arguments")
    m = n - k
    if m < 0:
        raise NoFixpointFound(f"{hyp_name}: fix consumes more arguments than are bound")
    # Replace the self-reference (index k under the lam chain) by the
    # constant applied to the leading binders, then substitute the lam
    # binders by the trailing bound variables.
    repl = make_app(lhead, [Var(n - 1 - j) for j in range(m)])
    body2 = subst(fix_inner, k, repl)
    new_rhs = subst_list(body2, [Var(j) for j in range(k)])
    stmt = make_pis(binders, Eq(body.at_type, body.lhs, new_rhs))
    dec_position = m + rhead.decreasing
    return Hypothesis(state.fresh_name(f"{_base_name(hyp_name)}_unfix"),
                      stmt,
                      ByCaseConversion(source=hyp_name,
                                       split_vars=(dec_position,), depth=1))


# ---------------------------------------------------------------------------
# Elimination of pattern matching
# ---------------------------------------------------------------------------

def _match_candidates(body: Term, n: int) -> list[int]:
    """Telescope positions (outside-based) of bound variables that are
    scrutinees of a match in the body."""
    found: list[int] = []

    def walk(t: Term, depth: int) -> None:
        if isinstance(t, Match) and isinstance(t.scrutinee, Var):
            idx = t.scrutinee.index - depth
            if idx >= 0:
                pos = n - 1 - idx
                if pos not in found:
                    found.append(pos)
        for child, extra in children(t):
            walk(child, depth + extra)

    walk(body, 0)
    return sorted(found)


def _shift_above(t: Term, at: int, by: int) -> Term:
    """Lift indices strictly greater than `at` by `by`; index == at must
    not occur."""
    def go(s: Term, depth: int) -> Term:
        if isinstance(s, Var):
            if s.index < at + depth:
                return s
            if s.index == at + depth:
                raise TransformError("dependency on the substituted binder")
            return Var(s.index + by)
        return map_subterms(s, lambda c, extra: go(c, depth + extra))
    return go(t, 0)


def iota_reduce(env: GlobalEnv, t: Term, rounds: int = 64) -> Term:
    """Select branches of matches whose scrutinee is constructor-headed;
    no delta or fix unfolding."""
    for _ in range(rounds):
        t2 = _iota_once(env, t)
        if t2 == t:
            return t
        t = t2
    raise TransformError("iota reduction did not converge")


def _iota_once(env: GlobalEnv, t: Term) -> Term:
    t = map_subterms(t, lambda s, _e: _iota_once(env, s))
    if isinstance(t, Match):
        head, cargs = spine(t.scrutinee)
        if isinstance(head, Ctor):
            decl = env.inductive(head.inductive)
            value_args = cargs[len(decl.params):]
            br = t.branches[head.ctor_index]
            if len(value_args) == br.arity:
                return subst_list(br.body, list(reversed(value_args)))
    return t


def eliminate_pattern_matching(state: ProofState, hyp_name: str) -> list[Hypothesis]:
    """One statement per constructor: substitute the matched bound variable
    by each constructor applied to fresh binders and iota-reduce."""
    h = state.find(hyp_name)
    binders, body = strip_pis(h.statement)
    n = len(binders)
    candidates = _match_candidates(body, n)
    if not candidates:
        raise NoMatchOnBoundVar(f"{hyp_name} has no match on a bound variable")
    i = candidates[0]
    sty = binders[i][1]  # in the context of binders[:i]
    inst = as_inductive_instance(sty)
    if inst is None:
        raise NotAlgebraic(f"{hyp_name}: matched variable is not of an algebraic type")
    ind_name, type_args = inst
    decl = state.env.inductive(ind_name)
    out: list[Hypothesis] = []
    base = _base_name(hyp_name)
    for k, cd in enumerate(decl.ctors):
        arg_tys = ctor_arg_types(state.env, ind_name, k, type_args)
        r = len(arg_tys)
        new_binders = list(binders[:i])
        for j, at in enumerate(arg_tys):
            hint = cd.name[0] if cd.name else "a"
            new_binders.append((f"{hint}{j}" if r > 1 else hint, lift(at, j)))
        for j, (bn, bd) in enumerate(binders[i + 1:]):
            # bd lives under binders[:i+1+j]; the slot of binder i becomes
            # r slots, so references past it move up by r-1.
            new_binders.append((bn, _shift_above(bd, j, r - 1)))
        trailing = n - 1 - i
        ctor_app = make_app(
            Ctor(ind_name, k),
            [lift(a, r + trailing) for a in type_args]
            + [Var(trailing + (r - 1 - j)) for j in range(r)])
        new_body = _replace_binder(body, n - 1 - i, r - 1, ctor_app)
        new_body = iota_reduce(state.env, new_body)
        stmt = make_pis(new_binders, new_body)
        out.append(Hypothesis(state.fresh_name(f"{base}_{cd.name}"),
                              stmt, ByConversion(source=hyp_name)))
    return out


def _replace_binder(t: Term, at: int, widen: int, replacement: Term) -> Term:
    """Replace Var(at) by `replacement` (expressed at the root of t's new
    context) and shift references above `at` by `widen`."""
    def go(s: Term, depth: int) -> Term:
        if isinstance(s, Var):
            if s.index < at + depth:
                return s
            if s.index == at + depth:
                return lift(replacement, depth)
            return Var(s.index + widen)
        return map_subterms(s, lambda c, extra: go(c, depth + extra))
    return go(t, 0)


# ---------------------------------------------------------------------------
# Monomorphization
# ---------------------------------------------------------------------------

def collect_type_instances(env: GlobalEnv, t: Term) -> list[Term]:
    """Closed subterms of sort Type, nested instances included, in first
    occurrence order."""
    out: list[Term] = []
    for s in subterms(t):
        if isinstance(s, (SortType, SortProp)):
            continue
        if not is_closed(s):
            continue
        if any(c is None for c, _ in children(s)):
            continue
        try:
            ty = typecheck(env, [], s)
        except FolbridgeError:
            continue
        if not isinstance(ty, SortType):
            continue
        if not any(alpha_eq(s, seen) for seen in out):
            out.append(s)
    return out


def _leading_type_binders(stmt: Term) -> int:
    k = 0
    while isinstance(stmt, Pi) and isinstance(stmt.domain, SortType):
        k += 1
        stmt = stmt.codomain
    return k


def _has_interior_type_binder(stmt: Term) -> bool:
    """True when a type quantifier remains after the leading prefix
    anywhere in the proposition structure."""
    while isinstance(stmt, Pi) and isinstance(stmt.domain, SortType):
        stmt = stmt.codomain

    def bad(t: Term) -> bool:
        if isinstance(t, Pi):
            if isinstance(t.domain, SortType):
                return True
            return bad(t.codomain) or (isinstance(t.domain, (Pi, And, Or, Not)) and bad(t.domain))
        if isinstance(t, (And, Or)):
            return bad(t.lhs) or bad(t.rhs)
        if isinstance(t, Not):
            return bad(t.body)
        if isinstance(t, Exists):
            return bad(t.body)
        return False

    return bad(stmt)


def type_slug(t: Term) -> str:
    """Readable tag for a ground type, used in generated hypothesis names."""
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, TVar):
        return t.name
    head, args = spine(t)
    if isinstance(head, Ind):
        return "_".join([head.inductive] + [type_slug(a) for a in args])
    if isinstance(t, Pi):
        return "arrow"
    return "ty"


def monomorphize(state: ProofState, extra_lemmas: list[tuple[str, Term]] | None = None,
                 from_context: bool = False) -> list[Hypothesis]:
    """Instantiate every prenex-polymorphic hypothesis (and extra lemma) at
    all ground type instances of the goal (Cartesian product for multiple
    leading binders); instances already present are skipped."""
    insts = collect_type_instances(state.env, state.goal)
    if from_context:
        for h in state.hypotheses:
            for cand in collect_type_instances(state.env, h.statement):
                if not any(alpha_eq(cand, s) for s in insts):
                    insts.append(cand)
    if not insts:
        return []
    sources = [(h.name, h.statement) for h in state.hypotheses]
    for name, stmt in (extra_lemmas or []):
        if not any(n == name for n, _ in sources):
            sources.append((name, stmt))
    existing = [h.statement for h in state.hypotheses]
    out: list[Hypothesis] = []
    used_names = {h.name for h in state.hypotheses} | state.env.names()
    for src_name, stmt in sources:
        k = _leading_type_binders(stmt)
        if k == 0 or _has_interior_type_binder(stmt):
            continue
        for combo in itertools.product(insts, repeat=k):
            inst_stmt = stmt
            for ty in combo:
                assert isinstance(inst_stmt, Pi)
                inst_stmt = subst(inst_stmt.codomain, 0, ty)
            if any(alpha_eq(inst_stmt, e) for e in existing):
                continue
            existing.append(inst_stmt)
            base = f"{src_name}_{'_'.join(type_slug(ty) for ty in combo)}"
            name = base
            i = 2
            while name in used_names:
                name = f"{base}_{i}"
                i += 1
            used_names.add(name)
            out.append(Hypothesis(name, inst_stmt,
                                  ByInstantiation(src_name, tuple(combo))))
    return out


# ---------------------------------------------------------------------------
# Interpreting algebraic types
# ---------------------------------------------------------------------------

def _algebraic_instances(state: ProofState) -> list[Term]:
    """Ground algebraic instances in goal and context, minus the types the
    back-end interprets natively."""
    terms = [state.goal] + [h.statement for h in state.hypotheses]
    insts: list[Term] = []
    for t in terms:
        for cand in collect_type_instances(state.env, t):
            head, args = spine(cand)
            if not isinstance(head, Ind):
                continue
            if head.inductive in INTERPRETED_TYPES:
                continue
            decl = state.env.inductive(head.inductive)
            if len(args) != len(decl.params):
                continue
            if not any(alpha_eq(cand, s) for s in insts):
                insts.append(cand)
    return insts


def injectivity_statement(env: GlobalEnv, instance: Term, ctor_index: int) -> Term:
    """forall (x1 y1 : A1) .. (xn yn : An),
       C x1..xn = C y1..yn -> x1 = y1 /\\ .. /\\ xn = yn"""
    ind_name, targs = as_inductive_instance(instance)
    arg_tys = ctor_arg_types(env, ind_name, ctor_index, targs)
    n = len(arg_tys)
    binders: list[tuple[str, Term]] = []
    for j, at in enumerate(arg_tys):
        binders.append((f"x{j + 1}", lift(at, 2 * j)))
        binders.append((f"y{j + 1}", lift(at, 2 * j + 1)))
    xs = [Var(2 * n - 1 - 2 * j) for j in range(n)]
    ys = [Var(2 * n - 2 - 2 * j) for j in range(n)]
    ctor = Ctor(ind_name, ctor_index)
    lifted_targs = [lift(a, 2 * n) for a in targs]
    premise = Eq(lift(instance, 2 * n),
                 make_app(ctor, lifted_targs + xs),
                 make_app(ctor, lifted_targs + ys))
    eqs = [Eq(lift(arg_tys[j], 2 * n), xs[j], ys[j]) for j in range(n)]
    conj = eqs[-1]
    for e in reversed(eqs[:-1]):
        conj = And(e, conj)
    return make_pis(binders, Pi("_", premise, lift(conj, 1)))


def disjointness_statement(env: GlobalEnv, instance: Term, first: int, second: int) -> Term:
    """forall (x1 : A1)..(xn : An)(x1' : A1')..(xp' : Ap'),
       C x1..xn <> C' x1'..xp'"""
    ind_name, targs = as_inductive_instance(instance)
    a_tys = ctor_arg_types(env, ind_name, first, targs)
    b_tys = ctor_arg_types(env, ind_name, second, targs)
    n, p = len(a_tys), len(b_tys)
    binders: list[tuple[str, Term]] = []
    for j, at in enumerate(a_tys):
        binders.append((f"x{j + 1}", lift(at, j)))
    for j, bt in enumerate(b_tys):
        binders.append((f"y{j + 1}", lift(bt, n + j)))
    xs = [Var(n + p - 1 - j) for j in range(n)]
    ys = [Var(p - 1 - j) for j in range(p)]
    lifted_targs = [lift(a, n + p) for a in targs]
    body = Not(Eq(lift(instance, n + p),
                  make_app(Ctor(ind_name, first), lifted_targs + xs),
                  make_app(Ctor(ind_name, second), lifted_targs + ys)))
    return make_pis(binders, body)


def exhaustiveness_statement(env: GlobalEnv, instance: Term) -> Term:
    """forall (x : I), (exists ..., x = C1 ...) \\/ .. \\/ (exists ..., x = Cn ...)"""
    ind_name, targs = as_inductive_instance(instance)
    decl = env.inductive(ind_name)
    disjuncts: list[Term] = []
    for k, cd in enumerate(decl.ctors):
        arg_tys = ctor_arg_types(env, ind_name, k, targs)
        r = len(arg_tys)
        # under the x binder (depth 1) plus r existential binders
        ctor_app = make_app(Ctor(ind_name, k),
                            [lift(a, 1 + r) for a in targs]
                            + [Var(r - 1 - j) for j in range(r)])
        body = Eq(lift(instance, 1 + r), Var(r), ctor_app)
        for j in reversed(range(r)):
            body = Exists(f"e{j + 1}", lift(arg_tys[j], 1 + j), body)
        disjuncts.append(body)
    disj = disjuncts[-1]
    for d in reversed(disjuncts[:-1]):
        disj = Or(d, disj)
    return Pi("x", instance, disj)


def interp_alg_types(state: ProofState, include_exhaustiveness: bool = False) -> list[Hypothesis]:
    """Injectivity and disjointness axioms (and, behind the flag, the
    exhaustiveness disjunction) for every algebraic instance in the goal
    and context, excluding solver-interpreted types."""
    out: list[Hypothesis] = []
    existing = [h.statement for h in state.hypotheses]

    def emit(name: str, stmt: Term, just: Justification) -> None:
        if any(alpha_eq(stmt, e) for e in existing):
            return
        existing.append(stmt)
        used = {h.name for h in state.hypotheses} | {h.name for h in out} | state.env.names()
        final = name
        i = 2
        while final in used:
            final = f"{name}_{i}"
            i += 1
        out.append(Hypothesis(final, stmt, just))

    for inst in _algebraic_instances(state):
        ind_name, _targs = as_inductive_instance(inst)
        decl = state.env.inductive(ind_name)
        slug = type_slug(inst)
        for k, cd in enumerate(decl.ctors):
            if not cd.arg_types:
                continue  # nullary constructors are trivially injective
            stmt = injectivity_statement(state.env, inst, k)
            emit(f"{slug}_{cd.name}_inj", stmt, DatatypeAxiom(inst, Injectivity(k)))
        for a in range(len(decl.ctors)):
            for b in range(a + 1, len(decl.ctors)):
                stmt = disjointness_statement(state.env, inst, a, b)
                emit(f"{slug}_{decl.ctors[a].name}_{decl.ctors[b].name}_disj",
                     stmt, DatatypeAxiom(inst, Disjointness(a, b)))
        if include_exhaustiveness:
            stmt = exhaustiveness_statement(state.env, inst)
            emit(f"{slug}_exhaust", stmt, DatatypeAxiom(inst, Exhaustiveness()))
    return out
