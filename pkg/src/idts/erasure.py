"""Positive subterms, positive and co-positive rewriting, reduct sets and erasure.

For a focus inductive type ``s``, a term is s-positive when ``s`` occurs
positively in its type.  An occurrence is s-positive when the subterm and all
of its ancestors are.  Erasure replaces every maximal non-positive subterm by
a bottom constant ``bot_<type>`` of the same type.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import FuelExhausted
from .rewriting import RuleSystem, iter_candidates, root_reducts
from .syntax import RESERVED_PREFIX
from .terms import Abs, App, FunApp, Symbol, Term, Var, replace_at, subterm_at
from .transforms import mangle
from .types import Type, occurs_positively


def bottom_name(t: Type) -> str:
    return f"{RESERVED_PREFIX}{mangle(t)}"


@dataclass
class ErasureContext:
    focus: str
    bottoms: dict = field(default_factory=dict)   # type -> Symbol
    memo: dict = field(default_factory=dict)      # term -> erased term

    def bottom(self, t: Type) -> Term:
        sym = self.bottoms.get(t)
        if sym is None:
            sym = self.bottoms[t] = Symbol(bottom_name(t), (), t)
        return FunApp(sym, ())


def s_positive(u: Term, s: str) -> bool:
    return occurs_positively(s, u.type)


def s_positive_subterms(u: Term, s: str) -> list:
    """(position, subterm) pairs whose whole ancestor chain is s-positive, pre-order."""
    out = []

    def go(p, t):
        if not s_positive(t, s):
            return
        out.append((p, t))
        for i, c in enumerate(t.children(), 1):
            go(p + (i,), c)

    go((), u)
    return out


def is_s_positive_position(u: Term, p: tuple, s: str) -> bool:
    return all(s_positive(subterm_at(u, p[:k]), s) for k in range(len(p) + 1))


def erase(u: Term, s: str, ctx: ErasureContext = None) -> Term:
    """The s-erasing function."""
    ctx = ctx or ErasureContext(s)
    if ctx.focus != s:
        raise ValueError(f"context is for {ctx.focus}, not {s}")
    hit = ctx.memo.get(u)      # alpha-equivalent terms have alpha-equivalent images
    if hit is not None:
        return hit
    if not s_positive(u, s):
        out = ctx.bottom(u.type)
    elif isinstance(u, Var):
        out = u
    elif isinstance(u, FunApp):
        out = FunApp(u.symbol, tuple(erase(a, s, ctx) for a in u.args))
    elif isinstance(u, Abs):
        out = Abs(u.var, erase(u.body, s, ctx))
    else:
        out = App(erase(u.fun, s, ctx), erase(u.arg, s, ctx))
    ctx.memo[u] = out
    return out


def s_steps(rs: RuleSystem, u: Term, s: str) -> list:
    """One-step reducts at s-positive occurrences: (position, result)."""
    positive = {p for p, _ in s_positive_subterms(u, s)}
    return [(c.position, c.result) for c in iter_candidates(rs, u)
            if c.applicable and c.position in positive]


def co_s_step(rs: RuleSystem, u: Term, s: str) -> list:
    """One-step reducts at occurrences that are not s-positive: (position, result)."""
    positive = {p for p, _ in s_positive_subterms(u, s)}
    return [(c.position, c.result) for c in iter_candidates(rs, u)
            if c.applicable and c.position not in positive]


def _rebuild(t: Term, i: int, child: Term) -> Term:
    if isinstance(t, FunApp):
        args = list(t.args)
        args[i - 1] = child
        return FunApp(t.symbol, tuple(args))
    if isinstance(t, Abs):
        return Abs(t.var, child)
    return App(child, t.arg) if i == 1 else App(t.fun, child)


def s_successors(rs: RuleSystem, u: Term, s: str, memo: Optional[dict] = None) -> tuple:
    """The one-step s-reducts of ``u`` (empty unless ``u`` itself is s-positive).

    Computed bottom-up: reducts at the root plus, for every s-positive child,
    the child's reducts put back in place.  ``memo`` may be shared between calls
    with the same rule system and focus type.
    """
    memo = {} if memo is None else memo

    def go(t):
        hit = memo.get(t)
        if hit is not None:
            return hit
        out = list(root_reducts(rs, t))
        for i, c in enumerate(t.children(), 1):
            if s_positive(c, s):
                out.extend(_rebuild(t, i, c2) for c2 in go(c))
        memo[t] = result = tuple(out)
        return result

    return go(u) if s_positive(u, s) else ()


def s_reducts(rs: RuleSystem, u: Term, s: str, fuel: int = 10_000,
              memo: Optional[dict] = None) -> frozenset:
    """The least set containing ``u`` and closed under s-rewriting (modulo alpha)."""
    memo = {} if memo is None else memo
    seen = {u}
    queue = deque([u])
    while queue:
        t = queue.popleft()
        for v in s_successors(rs, t, s, memo):
            if v not in seen:
                if len(seen) >= fuel:
                    raise FuelExhausted(f"more than {fuel} s-reducts", None, v)
                seen.add(v)
                queue.append(v)
    return frozenset(seen)


# -- lemma checks ---------------------------------------------------------------------

class _Overlay(dict):
    """A memo that reads through to ``base`` but writes only to itself."""

    def __init__(self, base: dict):
        super().__init__()
        self.base = base

    def get(self, key, default=None):
        hit = dict.get(self, key)
        return self.base.get(key, default) if hit is None else hit


@dataclass
class LemmaTally:
    """Counts of checked instances and any violations, per lemma.

    ``explicit`` counts s-steps whose reduct sets were enumerated and compared;
    ``by_membership`` counts those whose sets exceeded the enumeration budget.
    """

    terms: int = 0
    erasures: int = 0
    co_steps: int = 0
    s_steps: int = 0
    explicit: int = 0
    by_membership: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class LemmaChecker:
    """Checks, term by term, that

    * erasure preserves the type,
    * a co-s-step does not change the erasure,
    * an s-step does not enlarge the set of s-reducts.

    For the last one, R_s(u) is the closure of ``u`` under s-steps, so
    R_s(v) is a subset of R_s(u) exactly when v belongs to R_s(u).  Every
    s-step found by the positional enumeration must therefore appear among
    the bottom-up successors of ``u``.  When both reduct sets have at most
    ``fuel`` elements they are also enumerated and compared directly.

    Results for subterms are shared between checks.  Terms of size
    ``share_below`` or more are checked against throwaway overlays instead,
    so an exhaustive run keeps only the smaller cells in memory.
    """

    def __init__(self, rs: RuleSystem, focus, fuel: int = 10_000,
                 share_below: Optional[int] = None):
        self.rs = rs
        self.focus = tuple(focus)
        self.fuel = fuel
        self.share_below = share_below
        self.tally = LemmaTally()
        self._reducts = {}
        self._succ = {s: {} for s in self.focus}
        self._too_big = set()
        self._local = {}
        self._erase = {s: ErasureContext(s) for s in self.focus}

    def _redexes(self, u: Term, keep: bool = True) -> tuple:
        """(position, contractum) for every redex of ``u``, shared between terms."""
        hit = self._local.get(u)
        if hit is None:
            out = [((), c) for c in root_reducts(self.rs, u)]
            for i, child in enumerate(u.children(), 1):
                out.extend(((i,) + p, c) for p, c in self._redexes(child))
            hit = tuple(out)
            if keep:
                self._local[u] = hit
        return hit

    def reducts(self, u: Term, s: str, keep: bool = True) -> frozenset:
        key = (u, s)
        if key in self._too_big:
            raise FuelExhausted(f"more than {self.fuel} s-reducts", None, u)
        hit = self._reducts.get(key)
        if hit is None:
            memo = self._succ[s] if keep else _Overlay(self._succ[s])
            try:
                hit = s_reducts(self.rs, u, s, self.fuel, memo)
            except FuelExhausted:
                if keep:
                    self._too_big.add(key)
                raise
            if keep:
                self._reducts[key] = hit
        return hit

    def check(self, u: Term) -> None:
        t = self.tally
        t.terms += 1
        keep = self.share_below is None or u.size < self.share_below
        steps = [(p, replace_at(u, p, c)) for p, c in self._redexes(u, keep)]
        for s in self.focus:
            ctx = self._erase[s]
            if not keep:
                ctx = ErasureContext(s, ctx.bottoms, _Overlay(ctx.memo))
            succ_memo = self._succ[s] if keep else _Overlay(self._succ[s])
            image = erase(u, s, ctx)
            t.erasures += 1
            if image.type != u.type:
                t.violations.append(("type", s, u, image))
            if not steps:
                continue
            positive = {p for p, _ in s_positive_subterms(u, s)}
            succ = None
            for p, v in steps:
                if p in positive:
                    t.s_steps += 1
                    if succ is None:
                        succ = set(s_successors(self.rs, u, s, succ_memo))
                    if v not in succ:
                        t.violations.append(("reducts", s, u, v))
                        continue
                    try:
                        grown = not self.reducts(v, s, keep) <= self.reducts(u, s, keep)
                    except FuelExhausted:
                        t.by_membership += 1
                        continue
                    t.explicit += 1
                    if grown:
                        t.violations.append(("reducts", s, u, v))
                else:
                    t.co_steps += 1
                    if erase(v, s, ctx) != image:
                        t.violations.append(("co-step", s, u, v))
