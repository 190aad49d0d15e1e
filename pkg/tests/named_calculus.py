"""Independent named-variable term representation used as an oracle.

Converts de Bruijn terms to named terms and back; substitution is the
textbook capture-avoiding version with explicit renaming. Deliberately
shares no traversal code with folbridge.terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from folbridge import terms as T


@dataclass(frozen=True)
class NVar:
    name: str


@dataclass(frozen=True)
class NLam:
    name: str
    domain: object
    body: object


@dataclass(frozen=True)
class NPi:
    name: str
    domain: object
    codomain: object


@dataclass(frozen=True)
class NApp:
    head: object
    arg: object


@dataclass(frozen=True)
class NLeaf:
    """Any non-binding leaf, kept opaque."""
    payload: object


_counter = itertools.count()


def fresh(base: str) -> str:
    return f"{base}!{next(_counter)}"


def to_named(t: T.Term, ctx: list[str]) -> object:
    """ctx[0] is the innermost binder's chosen name."""
    if isinstance(t, T.Var):
        return NVar(ctx[t.index])
    if isinstance(t, T.Lam):
        n = fresh(t.binder or "x")
        return NLam(n, to_named(t.domain, ctx), to_named(t.body, [n] + ctx))
    if isinstance(t, T.Pi):
        n = fresh(t.binder or "x")
        return NPi(n, to_named(t.domain, ctx), to_named(t.codomain, [n] + ctx))
    if isinstance(t, T.App):
        return NApp(to_named(t.head, ctx), to_named(t.arg, ctx))
    return NLeaf(t)


def from_named(n: object, ctx: list[str]) -> T.Term:
    if isinstance(n, NVar):
        return T.Var(ctx.index(n.name))
    if isinstance(n, NLam):
        return T.Lam("x", from_named(n.domain, ctx), from_named(n.body, [n.name] + ctx))
    if isinstance(n, NPi):
        return T.Pi("x", from_named(n.domain, ctx), from_named(n.codomain, [n.name] + ctx))
    if isinstance(n, NApp):
        return T.App(from_named(n.head, ctx), from_named(n.arg, ctx))
    assert isinstance(n, NLeaf)
    return n.payload


def free_names(n: object) -> set[str]:
    if isinstance(n, NVar):
        return {n.name}
    if isinstance(n, NLam):
        return free_names(n.domain) | (free_names(n.body) - {n.name})
    if isinstance(n, NPi):
        return free_names(n.domain) | (free_names(n.codomain) - {n.name})
    if isinstance(n, NApp):
        return free_names(n.head) | free_names(n.arg)
    return set()


def rename(n: object, old: str, new: str) -> object:
    if isinstance(n, NVar):
        return NVar(new) if n.name == old else n
    if isinstance(n, NLam):
        if n.name == old:
            return NLam(n.name, rename(n.domain, old, new), n.body)
        return NLam(n.name, rename(n.domain, old, new), rename(n.body, old, new))
    if isinstance(n, NPi):
        if n.name == old:
            return NPi(n.name, rename(n.domain, old, new), n.codomain)
        return NPi(n.name, rename(n.domain, old, new), rename(n.codomain, old, new))
    if isinstance(n, NApp):
        return NApp(rename(n.head, old, new), rename(n.arg, old, new))
    return n


def named_subst(n: object, name: str, value: object) -> object:
    if isinstance(n, NVar):
        return value if n.name == name else n
    if isinstance(n, NLam):
        if n.name == name:
            return NLam(n.name, named_subst(n.domain, name, value), n.body)
        if n.name in free_names(value):
            n2 = fresh(n.name)
            n = NLam(n2, n.domain, rename(n.body, n.name, n2))
        return NLam(n.name, named_subst(n.domain, name, value),
                    named_subst(n.body, name, value))
    if isinstance(n, NPi):
        if n.name == name:
            return NPi(n.name, named_subst(n.domain, name, value), n.codomain)
        if n.name in free_names(value):
            n2 = fresh(n.name)
            n = NPi(n2, n.domain, rename(n.codomain, n.name, n2))
        return NPi(n.name, named_subst(n.domain, name, value),
                   named_subst(n.codomain, name, value))
    if isinstance(n, NApp):
        return NApp(named_subst(n.head, name, value), named_subst(n.arg, name, value))
    return n
