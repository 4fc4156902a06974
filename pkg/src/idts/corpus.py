"""Well-typed term corpora over a signature: exhaustive enumeration and sampling.

Size counts every node (variable, abstraction, application, symbol
application).  The type universe is the set of types reachable from the
symbol declarations; each type gets one free variable and one bound-variable
name, so enumeration is finite.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator, Optional

from .errors import FuelExhausted
from .rewriting import RuleSystem, root_step
from .signature import Signature
from .terms import Abs, App, FunApp, Term, Var
from .transforms import mangle
from .types import Arrow, Ind, Type


def type_universe(sig: Signature, extra=()) -> tuple:
    seen = []

    def add(t):
        if t in seen:
            return
        seen.append(t)
        if isinstance(t, Arrow):
            add(t.domain)
            add(t.codomain)

    for name in sig.inductive_names:
        add(Ind(name))
    for sym in sig.symbols:
        for a in sym.arg_types:
            add(a)
        add(sym.result)
    for t in extra:
        add(t)
    return tuple(seen)


class TermSpace:
    """All well-typed terms up to a size bound, grouped by type and exact size."""

    def __init__(self, sig: Signature, *, free_vars: bool = True, lambdas: bool = True,
                 symbols: Optional[list] = None, extra_types=()):
        self.sig = sig
        self.types = type_universe(sig, extra_types)
        self.symbols = [s for s in sig.symbols
                        if symbols is None or s.name in symbols]
        self.free = {t: Var(f"V_{mangle(t)}", t) for t in self.types} if free_vars else {}
        self.bound = {t: Var(f"b_{mangle(t)}", t) for t in self.types}
        self.lambdas = lambdas
        self._count = lru_cache(maxsize=None)(self._count_impl)
        self._terms = {}

    # counting --------------------------------------------------------------------

    def count(self, t: Type, n: int, scope: frozenset = frozenset()) -> int:
        return self._count(t, n, scope)

    def _count_impl(self, t, n, scope):
        total = 0
        if n == 1:
            total += (t in self.free) + (t in scope)
        for sym in self.symbols:
            if sym.result == t:
                total += self._count_args(sym.arg_types, n - 1, scope)
        if n >= 2 and self.lambdas and isinstance(t, Arrow) and t.domain in self.types:
            total += self._count(t.codomain, n - 1, scope | {t.domain})
        for a in self.types:
            f = Arrow(a, t)
            if f in self.types:
                for k in range(1, n - 1):
                    cf = self._count(f, k, scope)
                    if cf:
                        total += cf * self._count(a, n - 1 - k, scope)
        return total

    def _count_args(self, types, n, scope):
        if not types:
            return 1 if n == 0 else 0
        head, rest = types[0], types[1:]
        return sum(self._count(head, k, scope) * self._count_args(rest, n - k, scope)
                   for k in range(1, n - len(rest) + 1))

    def total(self, bound: int, types=None) -> int:
        return sum(self.count(t, n) for t in (types or self.types) for n in range(1, bound + 1))

    # enumeration ---------------------------------------------------------------------

    def terms(self, t: Type, n: int, scope: frozenset = frozenset()) -> list:
        key = (t, n, scope)
        cached = self._terms.get(key)
        if cached is None:
            cached = self._terms[key] = list(self._generate(t, n, scope))
        return cached

    def stream(self, t: Type, n: int, scope: frozenset = frozenset()) -> Iterator[Term]:
        """The terms of ``terms(t, n, scope)`` in the same order, without caching the cell."""
        cached = self._terms.get((t, n, scope))
        return iter(cached) if cached is not None else self._generate(t, n, scope)

    def _generate(self, t, n, scope) -> Iterator[Term]:
        if not self._count(t, n, scope):
            return
        if n == 1:
            if t in self.free:
                yield self.free[t]
            if t in scope:
                yield self.bound[t]
        for sym in self.symbols:
            if sym.result == t:
                for args in self._args(sym.arg_types, n - 1, scope):
                    yield FunApp(sym, args)
        if n >= 2 and self.lambdas and isinstance(t, Arrow) and t.domain in self.types:
            x = self.bound[t.domain]
            for body in self.terms(t.codomain, n - 1, scope | {t.domain}):
                yield Abs(x, body)
        for a in self.types:
            f = Arrow(a, t)
            if f in self.types:
                for k in range(1, n - 1):
                    fs = self.terms(f, k, scope)
                    if fs:
                        args = self.terms(a, n - 1 - k, scope)
                        yield from (App(u, v) for u in fs for v in args)

    def _args(self, types, n, scope) -> Iterator[tuple]:
        if not types:
            if n == 0:
                yield ()
            return
        head, rest = types[0], types[1:]
        for k in range(1, n - len(rest) + 1):
            if not self._count_args(rest, n - k, scope):
                continue
            for u in self.terms(head, k, scope):
                for tail in self._args(rest, n - k, scope):
                    yield (u,) + tail

    def iterate(self, bound: int, types=None) -> Iterator[Term]:
        """Every term of size at most ``bound``.

        Cells below the bound are cached (they supply subterms); the
        largest cells are generated on the fly and not kept.
        """
        for t in types or self.types:
            for n in range(1, bound):
                yield from self.terms(t, n)
            yield from self.stream(t, bound)

    # sampling -----------------------------------------------------------------------

    def sample(self, rng: random.Random, t: Type, n: int,
               scope: frozenset = frozenset()) -> Optional[Term]:
        """A uniformly random term of type ``t`` and size exactly ``n``."""
        total = self._count(t, n, scope)
        if not total:
            return None
        pick = rng.randrange(total)
        if n == 1:
            for cond, var in ((t in self.free, self.free.get(t)), (t in scope, self.bound.get(t))):
                if cond:
                    if pick == 0:
                        return var
                    pick -= 1
        for sym in self.symbols:
            if sym.result == t:
                c = self._count_args(sym.arg_types, n - 1, scope)
                if pick < c:
                    return FunApp(sym, self._sample_args(rng, sym.arg_types, n - 1, scope))
                pick -= c
        if n >= 2 and self.lambdas and isinstance(t, Arrow) and t.domain in self.types:
            inner = scope | {t.domain}
            c = self._count(t.codomain, n - 1, inner)
            if pick < c:
                return Abs(self.bound[t.domain], self.sample(rng, t.codomain, n - 1, inner))
            pick -= c
        for a in self.types:
            f = Arrow(a, t)
            if f in self.types:
                for k in range(1, n - 1):
                    c = self._count(f, k, scope) * self._count(a, n - 1 - k, scope)
                    if pick < c:
                        return App(self.sample(rng, f, k, scope),
                                   self.sample(rng, a, n - 1 - k, scope))
                    pick -= c
        raise AssertionError("sampling fell through")

    def _sample_args(self, rng, types, n, scope) -> tuple:
        if not types:
            return ()
        head, rest = types[0], types[1:]
        weights = [(k, self._count(head, k, scope) * self._count_args(rest, n - k, scope))
                   for k in range(1, n - len(rest) + 1)]
        pick = rng.randrange(sum(w for _, w in weights))
        for k, w in weights:
            if pick < w:
                return (self.sample(rng, head, k, scope),) + self._sample_args(rng, rest, n - k, scope)
            pick -= w
        raise AssertionError("sampling fell through")

    def random_term(self, rng: random.Random, bound: int) -> Term:
        """A random term of size at most ``bound``, uniform over the whole space."""
        cells = [(t, n, self.count(t, n)) for t in self.types for n in range(1, bound + 1)]
        pick = rng.randrange(sum(c for *_, c in cells))
        for t, n, c in cells:
            if pick < c:
                return self.sample(rng, t, n)
            pick -= c
        raise AssertionError("sampling fell through")


# -- exhaustive innermost normalization with sharing -----------------------------------

class InnermostNormalizer:
    """Leftmost-innermost normalization memoized per term.

    Innermost reduction normalizes every child before touching the root, so
    the normal form and step count of a node depend only on those of its
    children.  Results are exact step counts of the unshared strategy.
    """

    def __init__(self, rs: RuleSystem, fuel: int):
        self.rs = rs
        self.fuel = fuel
        self.cache = {}

    def root_step(self, t: Term) -> Optional[Term]:
        return root_step(self.rs, t)

    def rebuild(self, t: Term, fuel: int) -> tuple:
        """Normalize the children of ``t``; return (node with normal children, steps)."""
        if isinstance(t, Var):
            return t, 0
        if isinstance(t, FunApp):
            args, used = [], 0
            for a in t.args:
                na, k = self.normalize(a, fuel - used)
                args.append(na)
                used += k
            return FunApp(t.symbol, tuple(args)), used
        if isinstance(t, Abs):
            body, used = self.normalize(t.body, fuel)
            return Abs(t.var, body), used
        fun, used = self.normalize(t.fun, fuel)
        arg, k = self.normalize(t.arg, fuel - used)
        return App(fun, arg), used + k

    def normalize(self, t: Term, fuel: Optional[int] = None) -> tuple:
        """(normal form, number of innermost steps); FuelExhausted past ``fuel``."""
        fuel = self.fuel if fuel is None else fuel
        hit = self.cache.get(t)
        if hit is not None:
            if hit[1] > fuel:
                raise FuelExhausted(f"fuel {fuel} exhausted", None, t)
            return hit
        current, used = self.rebuild(t, fuel)
        while True:
            c = self.root_step(current)
            if c is None:
                break
            used += 1
            if used > fuel:
                raise FuelExhausted(f"fuel {fuel} exhausted", None, current)
            current, k = self.rebuild(c, fuel - used)
            used += k
        result = (current, used)
        self.cache[t] = result
        return result

    def finish_root(self, node: Term, fuel: int) -> tuple:
        """Normalize a node whose children are already normal: (nf, root-phase steps)."""
        hit = self.cache.get(node)
        if hit is not None:
            if hit[1] > fuel:
                raise FuelExhausted(f"fuel {fuel} exhausted", None, node)
            return hit
        c = self.root_step(node)
        if c is None:
            return node, 0
        if fuel < 1:
            raise FuelExhausted(f"fuel {fuel} exhausted", None, node)
        nf, k = self.normalize(c, fuel - 1)
        return nf, k + 1


class SNSurvey:
    """Innermost normalization of every term of the space, by normal-form classes.

    For each (type, size, scope) cell the survey keeps a table
    ``normal form -> [number of terms, maximal step count, an example term]``.
    A node's table is built from the product of its children's tables, which
    accounts for every term exactly once.
    """

    def __init__(self, space: TermSpace, rs, fuel: int):
        self.space = space
        self.norm = InnermostNormalizer(rs, fuel)
        self.fuel = fuel
        self.tables = {}
        self.failures = []       # (example term, number of terms, message)

    def _add(self, table, node_with_nf_children, count, steps, example):
        if steps > self.fuel:
            self.failures.append((example, count, f"more than {self.fuel} steps"))
            return
        try:
            nf, k = self.norm.finish_root(node_with_nf_children, self.fuel - steps)
        except FuelExhausted as exc:
            self.failures.append((example, count, str(exc)))
            return
        entry = table.get(nf)
        total = steps + k
        if entry is None:
            table[nf] = [count, total, example]
        else:
            entry[0] += count
            if total > entry[1]:
                entry[1], entry[2] = total, example

    def table(self, t: Type, n: int, scope: frozenset = frozenset()) -> dict:
        key = (t, n, scope)
        if key in self.tables:
            return self.tables[key]
        sp = self.space
        out = {}
        if sp.count(t, n, scope):
            if n == 1:
                for ok, var in ((t in sp.free, sp.free.get(t)), (t in scope, sp.bound.get(t))):
                    if ok:
                        self._add(out, var, 1, 0, var)
            for sym in sp.symbols:
                if sym.result == t:
                    for combo in self._arg_tables(sym.arg_types, n - 1, scope):
                        nfs = tuple(c[0] for c in combo)
                        count, steps = 1, 0
                        for _, (cnt, st, _ex) in combo:
                            count *= cnt
                            steps += st
                        example = FunApp(sym, tuple(ex for _, (_c, _s, ex) in combo))
                        self._add(out, FunApp(sym, nfs), count, steps, example)
            if n >= 2 and sp.lambdas and isinstance(t, Arrow) and t.domain in sp.types:
                x = sp.bound[t.domain]
                for nf, (cnt, st, ex) in self.table(t.codomain, n - 1, scope | {t.domain}).items():
                    self._add(out, Abs(x, nf), cnt, st, Abs(x, ex))
            for a in sp.types:
                f = Arrow(a, t)
                if f in sp.types:
                    for k in range(1, n - 1):
                        left = self.table(f, k, scope)
                        if not left:
                            continue
                        right = self.table(a, n - 1 - k, scope)
                        for nu, (cu, su, eu) in left.items():
                            for nv, (cv, sv, ev) in right.items():
                                self._add(out, App(nu, nv), cu * cv, su + sv, App(eu, ev))
        self.tables[key] = out
        return out

    def _arg_tables(self, types, n, scope):
        if not types:
            if n == 0:
                yield ()
            return
        head, rest = types[0], types[1:]
        for k in range(1, n - len(rest) + 1):
            if not self.space._count_args(rest, n - k, scope):
                continue
            for item in self.table(head, k, scope).items():
                for tail in self._arg_tables(rest, n - k, scope):
                    yield (item,) + tail

    def run(self, bound: int) -> dict:
        terms = classes = max_steps = 0
        for t in self.space.types:
            for n in range(1, bound + 1):
                tab = self.table(t, n)
                classes += len(tab)
                for cnt, st, _ in tab.values():
                    terms += cnt
                    max_steps = max(max_steps, st)
        failed = sum(c for _, c, _ in self.failures)
        return {"terms": terms + failed, "normalized": terms, "classes": classes,
                "max_steps": max_steps, "failed": failed}
