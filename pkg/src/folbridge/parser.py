"""Line-oriented parser for .fol problem files.

Declarations end with `.`; the statement language separates props
(forall/connectives/equations) from object expressions. All type
applications are explicit; there is no implicit-argument inference.
Parsed statements are elaborated immediately (filling Match scrutinee
types and Eq annotations) and rejected unless they typecheck at Prop.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .conversion import Fuel, TypingError, _types_equal, infer
from .terms import (
    And, App, Branch, Const, Ctor, CtorDecl, Definition, Eq, Exists,
    FalseP, Fix, FolbridgeError, GlobalEnv, Ind, InductiveDecl, IntLit,
    IntT, Match, Not, Or, Pi, Problem, ScopeError, SortProp, SortType,
    TYPE, Term, TrueP, Var, builtin_type, lift, make_lams, make_pis,
    map_subterms,
)


class ParseError(FolbridgeError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class ArityError(FolbridgeError):
    pass


class PrenexError(FolbridgeError):
    pass


KEYWORDS = {
    "data", "def", "hyp", "lemma", "goal", "forall", "exists", "fun",
    "match", "return", "with", "end", "fix", "Type", "true_p", "false_p",
}

_PUNCT = [
    ":=", "=>", "->", "/\\", "\\/", "<>", "<=", "||", "&&",
    "(", ")", ",", ".", ":", "=", "|", "~", "<", "+", "-", "*", "/",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT_RE = re.compile(r"[0-9]+")


@dataclass
class Token:
    kind: str  # 'ident' | 'int' | 'punct' | 'kw' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            col += len(word)
            i = m.end()
            continue
        m = _INT_RE.match(text, i)
        if m:
            tokens.append(Token("int", m.group(0), line, col))
            col += len(m.group(0))
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.env = GlobalEnv()
        self.pending_inductive: str | None = None

    # -- token plumbing ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("punct", "kw")

    def eat(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind not in ("punct", "kw"):
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return self.next()

    def eat_ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"expected identifier, found {tok.text!r}", tok.line, tok.col)
        self.next()
        return tok.text

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # -- name resolution -----------------------------------------------------

    def resolve(self, name: str, bound: list[str]) -> Term:
        if name in bound:
            return Var(bound.index(name))
        if name == "Int":
            return IntT()
        if name in self.env.definitions:
            return Const(name)
        if builtin_type(name) is not None:
            return Const(name)
        hit = self.env.find_ctor(name)
        if hit is not None:
            return Ctor(hit[0], hit[1])
        if name in self.env.inductives:
            return Ind(name)
        if self.pending_inductive == name:
            return Ind(name)
        tok = self.peek()
        raise ScopeError(f"{tok.line}:{tok.col}: unknown identifier {name!r}")

    # -- expressions (terms and types share the atom level) -------------------

    def parse_expr(self, bound: list[str]) -> Term:
        if self.at("forall"):
            self.next()
            binders, bound2 = self.parse_binders(bound)
            self.eat(",")
            return make_pis(binders, self.parse_expr(bound2))
        lhs = self.parse_orb(bound)
        if self.at("->"):
            self.next()
            rhs = self.parse_expr(bound)
            return Pi("_", lhs, lift(rhs, 1))
        return lhs

    def parse_orb(self, bound: list[str]) -> Term:
        lhs = self.parse_andb(bound)
        if self.at("||"):
            self.next()
            rhs = self.parse_orb(bound)
            return App(App(Const("orb"), lhs), rhs)
        return lhs

    def parse_andb(self, bound: list[str]) -> Term:
        lhs = self.parse_cmp(bound)
        if self.at("&&"):
            self.next()
            rhs = self.parse_andb(bound)
            return App(App(Const("andb"), lhs), rhs)
        return lhs

    def parse_cmp(self, bound: list[str]) -> Term:
        lhs = self.parse_add(bound)
        for op, name in (("<=", "le"), ("<", "lt")):
            if self.at(op):
                self.next()
                rhs = self.parse_add(bound)
                return App(App(Const(name), lhs), rhs)
        return lhs

    def parse_add(self, bound: list[str]) -> Term:
        lhs = self.parse_mul(bound)
        while self.at("+") or self.at("-"):
            name = "add" if self.next().text == "+" else "sub"
            rhs = self.parse_mul(bound)
            lhs = App(App(Const(name), lhs), rhs)
        return lhs

    def parse_mul(self, bound: list[str]) -> Term:
        lhs = self.parse_app(bound)
        while self.at("*"):
            self.next()
            rhs = self.parse_app(bound)
            lhs = App(App(Const("mul"), lhs), rhs)
        return lhs

    def _at_atom_start(self) -> bool:
        tok = self.peek()
        if tok.kind in ("ident", "int"):
            return True
        if tok.kind == "kw" and tok.text in ("fun", "match", "fix", "Type"):
            return True
        return tok.kind == "punct" and tok.text == "("

    def parse_app(self, bound: list[str]) -> Term:
        # A leading minus immediately before a literal is a negative literal.
        if self.at("-") and self.peek(1).kind == "int":
            self.next()
            return IntLit(-int(self.next().text))
        head = self.parse_atom(bound)
        while self._at_atom_start():
            head = App(head, self.parse_atom(bound))
        return head

    def parse_atom(self, bound: list[str]) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return IntLit(int(tok.text))
        if tok.kind == "ident":
            self.next()
            return self.resolve(tok.text, bound)
        if tok.kind == "kw":
            if tok.text == "Type":
                self.next()
                return TYPE
            if tok.text == "fun":
                return self.parse_fun(bound)
            if tok.text == "match":
                return self.parse_match(bound)
            if tok.text == "fix":
                return self.parse_fix(bound)
        if self.at("("):
            self.next()
            t = self.parse_expr(bound)
            self.eat(")")
            return t
        self.fail(f"expected a term, found {tok.text!r}")

    def parse_binders(self, bound: list[str]) -> tuple[list[tuple[str, Term]], list[str]]:
        """One or more `(x y : T)` groups; returns binders in binding order
        and the extended bound-name list."""
        binders: list[tuple[str, Term]] = []
        while self.at("("):
            save = self.pos
            self.next()
            names: list[str] = []
            while self.peek().kind == "ident":
                names.append(self.next().text)
            if not names or not self.at(":"):
                self.pos = save
                break
            self.eat(":")
            ty = self.parse_expr(bound)
            self.eat(")")
            for nm in names:
                binders.append((nm, ty))
                ty = lift(ty, 1)
                bound = [nm] + bound
        if not binders:
            self.fail("expected at least one (name : type) binder")
        return binders, bound

    def parse_fun(self, bound: list[str]) -> Term:
        self.eat("fun")
        binders, bound2 = self.parse_binders(bound)
        self.eat("=>")
        body = self.parse_expr(bound2)
        return make_lams(binders, body)

    def parse_match(self, bound: list[str]) -> Term:
        self.eat("match")
        scrut = self.parse_expr(bound)
        self.eat("return")
        rty = self.parse_expr(bound)
        self.eat("with")
        arms: list[tuple[str, list[str], Term, Token]] = []
        while self.at("|"):
            self.next()
            ctok = self.peek()
            cname = self.eat_ident()
            binder_names: list[str] = []
            while self.peek().kind == "ident":
                binder_names.append(self.next().text)
            self.eat("=>")
            body_bound = list(reversed(binder_names)) + bound
            body = self.parse_expr(body_bound)
            arms.append((cname, binder_names, body, ctok))
        self.eat("end")
        if not arms:
            self.fail("match needs at least one branch")
        hit = self.env.find_ctor(arms[0][0])
        if hit is None:
            raise ScopeError(f"unknown constructor {arms[0][0]!r}")
        ind_name = hit[0]
        decl = self.env.inductive(ind_name)
        by_name = {c.name: i for i, c in enumerate(decl.ctors)}
        slots: list[Branch | None] = [None] * len(decl.ctors)
        for cname, binder_names, body, ctok in arms:
            if cname not in by_name:
                raise ArityError(
                    f"{ctok.line}:{ctok.col}: {cname!r} is not a constructor of {ind_name}")
            k = by_name[cname]
            if slots[k] is not None:
                raise ArityError(f"duplicate branch for constructor {cname}")
            want = len(decl.ctors[k].arg_types)
            if len(binder_names) != want:
                raise ArityError(
                    f"{ctok.line}:{ctok.col}: constructor {cname} takes {want} "
                    f"argument(s), pattern binds {len(binder_names)}")
            slots[k] = Branch(tuple(binder_names), body)
        missing = [decl.ctors[i].name for i, b in enumerate(slots) if b is None]
        if missing:
            raise ArityError(f"match on {ind_name} is missing branches for: {', '.join(missing)}")
        return Match(scrut, None, rty, tuple(slots))  # scrutinee_type filled by elaboration

    def parse_fix(self, bound: list[str]) -> Term:
        self.eat("fix")
        name = self.eat_ident()
        self.eat("/")
        dtok = self.peek()
        if dtok.kind != "int":
            self.fail("expected the decreasing-argument index after '/'")
        dec = int(self.next().text)
        binders, bound2 = self.parse_binders([name] + bound)
        self.eat(":")
        rty = self.parse_expr(bound2)
        self.eat(":=")
        body = self.parse_expr(bound2)
        full_type = make_pis(binders, rty)
        # full_type must not mention the fix self-binder.
        full_type_outer = _unshift(full_type, 1)
        if full_type_outer is None:
            self.fail("fixpoint annotation may not mention the fixpoint itself")
        return Fix(name, dec, full_type_outer, make_lams(binders, body))

    # -- propositions ----------------------------------------------------------

    def parse_prop(self, bound: list[str]) -> Term:
        if self.at("forall"):
            self.next()
            binders, bound2 = self.parse_binders(bound)
            self.eat(",")
            return make_pis(binders, self.parse_prop(bound2))
        if self.at("exists"):
            self.next()
            binders, bound2 = self.parse_binders(bound)
            self.eat(",")
            body = self.parse_prop(bound2)
            for nm, dom in reversed(binders):
                body = Exists(nm, dom, body)
            return body
        return self.parse_prop_imp(bound)

    def parse_prop_imp(self, bound: list[str]) -> Term:
        lhs = self.parse_prop_or(bound)
        if self.at("->"):
            self.next()
            rhs = self.parse_prop_imp(bound)
            return Pi("_", lhs, lift(rhs, 1))
        return lhs

    def parse_prop_or(self, bound: list[str]) -> Term:
        lhs = self.parse_prop_and(bound)
        if self.at("\\/"):
            self.next()
            return Or(lhs, self.parse_prop_or(bound))
        return lhs

    def parse_prop_and(self, bound: list[str]) -> Term:
        lhs = self.parse_prop_not(bound)
        if self.at("/\\"):
            self.next()
            return And(lhs, self.parse_prop_and(bound))
        return lhs

    def parse_prop_not(self, bound: list[str]) -> Term:
        if self.at("~"):
            self.next()
            return Not(self.parse_prop_not(bound))
        return self.parse_prop_atom(bound)

    def parse_prop_atom(self, bound: list[str]) -> Term:
        if self.at("true_p"):
            self.next()
            return TrueP()
        if self.at("false_p"):
            self.next()
            return FalseP()
        if self.at("forall") or self.at("exists"):
            return self.parse_prop(bound)
        if self.at("("):
            save = self.pos
            self.next()
            try:
                inner = self.parse_prop(bound)
                self.eat(")")
                if self.at("=") or self.at("<>"):
                    self.fail("propositions cannot appear inside equations")
                return inner
            except (ParseError, ScopeError, ArityError):
                self.pos = save
        # Equation sides use the arrow-free expression level so that `->`
        # binds as implication: `t = u -> P` is `(t = u) -> P`.
        lhs = self.parse_orb(bound)
        if self.at("="):
            self.next()
            return Eq(None, lhs, self.parse_orb(bound))
        if self.at("<>"):
            self.next()
            return Not(Eq(None, lhs, self.parse_orb(bound)))
        self.fail("expected '=' or '<>' to form an atomic proposition")

    # -- declarations ------------------------------------------------------------

    def parse_data(self) -> None:
        self.eat("data")
        name = self.eat_ident()
        params: list[str] = []
        if self.at("("):
            self.next()
            while self.peek().kind == "ident":
                params.append(self.next().text)
            self.eat(")")
        self.eat("=")
        self.pending_inductive = name
        param_bound = list(reversed(params))
        ctors: list[CtorDecl] = []
        while True:
            cname = self.eat_ident()
            arg_types: list[Term] = []
            while self.at("("):
                self.next()
                arg_types.append(self.parse_expr(param_bound))
                self.eat(")")
            ctors.append(CtorDecl(cname, tuple(arg_types)))
            if self.at("|"):
                self.next()
                continue
            break
        self.eat(".")
        self.pending_inductive = None
        self.env.declare_inductive(InductiveDecl(name, tuple(params), tuple(ctors)))

    def parse_def(self) -> None:
        self.eat("def")
        name = self.eat_ident()
        binders: list[tuple[str, Term]] = []
        bound: list[str] = []
        if self.at("(") :
            binders, bound = self.parse_binders([])
        self.eat(":")
        rty = self.parse_expr(bound)
        self.eat("=")
        body = self.parse_expr(bound)
        self.eat(".")
        full_type = make_pis(binders, rty)
        full_body = make_lams(binders, body)
        try:
            ety, _sort = infer(self.env, [], full_type)
            ebody, bty = infer(self.env, [], full_body)
        except TypingError as e:
            raise TypingError(f"in definition {name}: {e}") from None
        if not _types_equal(self.env, bty, ety, Fuel()):
            raise TypingError(f"definition {name}: body has type {bty}, declared {ety}")
        check_prenex(ety, what=f"definition {name}")
        self.env.declare_definition(Definition(name, ety, ebody))

    def parse_statement(self, what: str) -> Term:
        raw = self.parse_prop([])
        self.eat(".")
        try:
            stmt, sort = infer(self.env, [], raw)
        except TypingError as e:
            raise TypingError(f"in {what}: {e}") from None
        if not isinstance(sort, SortProp):
            raise TypingError(f"{what} is not a proposition")
        check_prenex(stmt, what=what)
        return stmt

    def parse_problem(self) -> Problem:
        hyps: list[tuple[str, Term]] = []
        lemma_params: list[str] = []
        goal: Term | None = None
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            if self.at("data"):
                self.parse_data()
            elif self.at("def"):
                self.parse_def()
            elif self.at("hyp") or self.at("lemma"):
                is_lemma = self.next().text == "lemma"
                name = self.eat_ident()
                if name in {n for n, _ in hyps} or name in self.env.names():
                    raise ScopeError(f"hypothesis name already used: {name}")
                self.eat(":")
                stmt = self.parse_statement(f"hypothesis {name}")
                hyps.append((name, stmt))
                if is_lemma:
                    lemma_params.append(name)
            elif self.at("goal"):
                self.next()
                goal = self.parse_statement("goal")
                tok = self.peek()
                if tok.kind != "eof":
                    raise ParseError("goal must be the final declaration", tok.line, tok.col)
                break
            else:
                self.fail("expected a declaration (data/def/hyp/lemma/goal)")
        if goal is None:
            self.fail("problem has no goal")
        return Problem(self.env, hyps, goal, lemma_params)


def _unshift(t: Term, amount: int) -> Term | None:
    """Inverse of lift when the lowest `amount` indices are unused."""
    def go(s: Term, depth: int):
        if isinstance(s, Var):
            if s.index < depth:
                return s
            if s.index < depth + amount:
                raise _UnshiftHit()
            return Var(s.index - amount)
        return map_subterms(s, lambda c, extra: go(c, depth + extra))
    try:
        return go(t, 0)
    except _UnshiftHit:
        return None


class _UnshiftHit(Exception):
    pass


def check_prenex(stmt: Term, what: str = "statement") -> None:
    """Type binders (forall A : Type) must form a leading prefix of the
    statement / definition type; none may occur deeper in the proposition
    structure or after an object binder."""
    t = stmt
    while isinstance(t, Pi) and isinstance(t.domain, SortType):
        t = t.codomain
    _no_type_binders_in_prop(t, what)


def _no_type_binders_in_prop(t: Term, what: str) -> None:
    if isinstance(t, Pi):
        if isinstance(t.domain, SortType):
            raise PrenexError(
                f"{what}: type quantifier is not in prenex position")
        _no_type_binders_in_prop(t.codomain, what)
        if isinstance(t.domain, (And, Or, Not, Eq, TrueP, FalseP, Pi, Exists)):
            _no_type_binders_in_prop(t.domain, what)
        return
    if isinstance(t, (And, Or)):
        _no_type_binders_in_prop(t.lhs, what)
        _no_type_binders_in_prop(t.rhs, what)
        return
    if isinstance(t, Not):
        _no_type_binders_in_prop(t.body, what)
        return
    if isinstance(t, Exists):
        _no_type_binders_in_prop(t.body, what)
        return
    # Equations and deeper object terms: type binders may legitimately
    # occur inside types (e.g. an equality at a polymorphic type).


def parse_problem(text: str) -> Problem:
    """Parse, scope-check and typecheck a problem file."""
    return Parser(text).parse_problem()


def parse_term(text: str, env: GlobalEnv | None = None,
               bound: list[str] | None = None) -> Term:
    """Parse a standalone proposition or expression. Closed inputs are
    elaborated (annotations filled); open inputs are returned raw."""
    p = Parser(text)
    p.env = env if env is not None else GlobalEnv()
    bound = bound or []
    save = p.pos
    try:
        t = p.parse_prop(bound)
        if p.peek().kind != "eof":
            raise ParseError("trailing input")
    except (ParseError, ScopeError, ArityError):
        p.pos = save
        t = p.parse_expr(bound)
        if p.peek().kind != "eof":
            p.fail("trailing input")
    if not bound:
        t, _ = infer(p.env, [], t)
    return t
