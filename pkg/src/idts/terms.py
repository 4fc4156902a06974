"""Simply-typed terms with fully applied function symbols.

Terms are immutable and compare modulo alpha-conversion: ``==`` and
``hash`` go through a nameless key in which bound variables are replaced
by de Bruijn indices.  Typing is enforced at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

from .errors import PositionError, TermTypeError
from .types import Arrow, Ind, Type, arrow

Position = tuple  # Dewey address, 1-based; () is the root


@dataclass(frozen=True)
class Symbol:
    """A function symbol of fixed arity.  Constructors are symbols too."""

    name: str
    arg_types: tuple
    result: Type
    constructor: bool = False

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    @cached_property
    def type(self) -> Type:
        return arrow(*self.arg_types, self.result)

    def __str__(self) -> str:
        return self.name


class Term:
    """Common behaviour; see the four concrete variants below."""

    type: Type

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self._akey == other._akey

    def __hash__(self):
        return hash(self._akey)

    @cached_property
    def _akey(self):
        return _alpha_key(self, {}, 0)

    @cached_property
    def free_vars(self) -> frozenset:
        return frozenset(_free_vars(self))

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children())

    def children(self) -> tuple:
        return ()

    def __str__(self) -> str:
        return show(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {show(self)} : {self.type}>"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    name: str
    type: Type


@dataclass(frozen=True, eq=False, repr=False)
class Abs(Term):
    var: Var
    body: Term
    type: Type = field(init=False)

    def __post_init__(self):
        if not isinstance(self.var, Var):
            raise TermTypeError(f"abstraction must bind a variable, got {self.var!r}")
        object.__setattr__(self, "type", Arrow(self.var.type, self.body.type))

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    fun: Term
    arg: Term
    type: Type = field(init=False)

    def __post_init__(self):
        ft = self.fun.type
        if not isinstance(ft, Arrow):
            raise TermTypeError(
                f"cannot apply {show(self.fun)} of non-functional type {ft} "
                f"to {show(self.arg)}")
        if ft.domain != self.arg.type:
            raise TermTypeError(
                f"in ({show(self.fun)} {show(self.arg)}): expected argument of "
                f"type {ft.domain}, got {self.arg.type}")
        object.__setattr__(self, "type", ft.codomain)

    def children(self):
        return (self.fun, self.arg)


@dataclass(frozen=True, eq=False, repr=False)
class FunApp(Term):
    symbol: Symbol
    args: tuple = ()
    type: Type = field(init=False)

    def __post_init__(self):
        args = tuple(self.args)
        object.__setattr__(self, "args", args)
        sym = self.symbol
        if len(args) != sym.arity:
            raise TermTypeError(
                f"{sym.name} expects {sym.arity} argument(s), got {len(args)}")
        for i, (a, t) in enumerate(zip(args, sym.arg_types), 1):
            if a.type != t:
                raise TermTypeError(
                    f"argument {i} of {sym.name}: expected {t}, got "
                    f"{show(a)} : {a.type}")
        object.__setattr__(self, "type", sym.result)

    def children(self):
        return self.args

    @property
    def is_constructor_headed(self) -> bool:
        return self.symbol.constructor


class _Key(tuple):
    """An alpha-equivalence key whose hash is computed once."""

    def __hash__(self):
        h = self.__dict__.get("h")
        if h is None:
            h = self.__dict__["h"] = tuple.__hash__(self)
        return h


def _alpha_key(t: Term, env: dict, depth: int):
    if isinstance(t, Var):
        level = env.get((t.name, t.type))
        if level is not None:
            return _Key(("b", depth - level))
        return _Key(("v", t.name, t.type))
    if not env or not any((x.name, x.type) in env for x in t.free_vars):
        cached = t.__dict__.get("_akey")
        if cached is not None:
            return cached
        if env:
            return t._akey
    if isinstance(t, Abs):
        inner = dict(env)
        inner[(t.var.name, t.var.type)] = depth + 1
        return _Key(("l", t.var.type, _alpha_key(t.body, inner, depth + 1)))
    if isinstance(t, App):
        return _Key(("a", _alpha_key(t.fun, env, depth), _alpha_key(t.arg, env, depth)))
    return _Key(("f", t.symbol.name, t.symbol.type,
                 _Key(_alpha_key(a, env, depth) for a in t.args)))


def _free_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Abs):
        return set(t.body.free_vars) - {t.var}
    out = set()
    for c in t.children():
        out |= c.free_vars
    return out


def alpha_equal(u: Term, v: Term) -> bool:
    return u == v


def free_vars(u: Term) -> frozenset:
    return u.free_vars


def type_of(u: Term) -> Type:
    return u.type


# -- building helpers --------------------------------------------------------

def app(head: Term, *args: Term) -> Term:
    """Left-nested application ``(head a1 ... an)``."""
    for a in args:
        head = App(head, a)
    return head


def lam(variables, body: Term) -> Term:
    if isinstance(variables, Var):
        variables = [variables]
    for v in reversed(list(variables)):
        body = Abs(v, body)
    return body


def spine(t: Term) -> tuple[Term, tuple]:
    """Split ``(h a1 ... an)`` into ``(h, (a1, ..., an))``; h is not an App."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, tuple(reversed(args))


# -- positions ----------------------------------------------------------------

def positions(u: Term) -> Iterator[Position]:
    """All positions of ``u`` in pre-order (root first, then left to right)."""
    yield ()
    for i, c in enumerate(u.children(), 1):
        for p in positions(c):
            yield (i,) + p


def subterms(u: Term) -> Iterator[tuple[Position, Term]]:
    yield (), u
    for i, c in enumerate(u.children(), 1):
        for p, s in subterms(c):
            yield (i,) + p, s


def subterm_at(u: Term, p: Position) -> Term:
    for i in p:
        kids = u.children()
        if not 1 <= i <= len(kids):
            raise PositionError(f"position {'.'.join(map(str, p)) or 'ε'} not in term {show(u)}")
        u = kids[i - 1]
    return u


def replace_at(u: Term, p: Position, v: Term) -> Term:
    """``u[v]_p``.  Free variables of ``v`` may be captured by binders of ``u``."""
    target = subterm_at(u, p)
    if target.type != v.type:
        raise TermTypeError(
            f"cannot replace {show(target)} : {target.type} by {show(v)} : {v.type}")
    return _replace(u, p, v)


def _replace(u: Term, p: Position, v: Term) -> Term:
    if not p:
        return v
    i, rest = p[0], p[1:]
    if isinstance(u, Abs):
        return Abs(u.var, _replace(u.body, rest, v))
    if isinstance(u, App):
        if i == 1:
            return App(_replace(u.fun, rest, v), u.arg)
        return App(u.fun, _replace(u.arg, rest, v))
    args = list(u.args)
    args[i - 1] = _replace(args[i - 1], rest, v)
    return FunApp(u.symbol, tuple(args))


def is_prefix(q: Position, p: Position) -> bool:
    return len(q) <= len(p) and p[:len(q)] == q


# -- substitution -------------------------------------------------------------

def fresh_name(base: str, avoid) -> str:
    stem = base.rstrip("0123456789'")
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand


def var_names(*terms: Term) -> set:
    """Every variable name occurring in the terms, free or bound."""
    names = set()
    for t in terms:
        for _, s in subterms(t):
            if isinstance(s, Var):
                names.add(s.name)
            elif isinstance(s, Abs):
                names.add(s.var.name)
    return names


def substitute(u: Term, theta: Mapping) -> Term:
    """Capture-avoiding simultaneous substitution."""
    sub = {}
    for x, t in theta.items():
        if x.type != t.type:
            raise TermTypeError(
                f"substitution maps {x.name} : {x.type} to {show(t)} : {t.type}")
        if t != x:
            sub[x] = t
    if not sub:
        return u
    return _subst(u, sub)


def _subst(u: Term, sub: dict) -> Term:
    if isinstance(u, Var):
        return sub.get(u, u)
    fv = u.free_vars
    if not any(x in fv for x in sub):
        return u
    if isinstance(u, App):
        return App(_subst(u.fun, sub), _subst(u.arg, sub))
    if isinstance(u, FunApp):
        return FunApp(u.symbol, tuple(_subst(a, sub) for a in u.args))
    x = u.var
    inner = {k: v for k, v in sub.items() if k != x and k in u.body.free_vars}
    if not inner:
        return u
    captured = set()
    for v in inner.values():
        captured |= v.free_vars
    if any(c.name == x.name for c in captured):
        avoid = {c.name for c in captured} | {y.name for y in u.body.free_vars}
        avoid |= {k.name for k in inner}
        x2 = Var(fresh_name(x.name, avoid), x.type)
        inner[x] = x2
        return Abs(x2, _subst(u.body, inner))
    return Abs(x, _subst(u.body, inner))


def rename_bound(u: Term, avoid) -> Term:
    """Alpha-rename every binder of ``u`` so no bound name is in ``avoid``
    and bound names are pairwise distinct."""
    used = set(avoid) | {x.name for x in u.free_vars}

    def go(t):
        if isinstance(t, Var):
            return t
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        if isinstance(t, FunApp):
            return FunApp(t.symbol, tuple(go(a) for a in t.args))
        name = t.var.name
        if name in used:
            name = fresh_name(name, used)
        used.add(name)
        x2 = Var(name, t.var.type)
        body = t.body if x2 == t.var else _subst(t.body, {t.var: x2})
        return Abs(x2, go(body))

    return go(u)


# -- printing -----------------------------------------------------------------

def show(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, FunApp):
        if not t.args:
            return t.symbol.name
        return f"{t.symbol.name}({', '.join(show(a) for a in t.args)})"
    if isinstance(t, Abs):
        return f"\\{t.var.name}:{t.var.type}. {show(t.body)}"
    head, args = spine(t)
    parts = [head, *args]
    return "(" + " ".join(
        f"({show(p)})" if isinstance(p, Abs) else show(p) for p in parts) + ")"


def is_ground_inductive(t: Term) -> bool:
    return isinstance(t.type, Ind) and not t.free_vars
