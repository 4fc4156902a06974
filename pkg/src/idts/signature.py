"""Inductive declarations, function symbols, statuses and the precedence.

A :class:`Signature` is an immutable bundle of declarations.  It becomes
usable by the rewriting and schema modules once :func:`seal` has accepted
its :class:`ValidationReport`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .errors import StatusError, ValidationError
from .terms import Symbol
from .types import Ind, Type, inductive_names, negative_positions, occurrences, split_arrow

ALLOW_CONSTRUCTOR_RULES = "allow-constructor-rules"
ALLOW_NON_POSITIVE = "allow-non-positive"
KNOWN_FLAGS = frozenset({ALLOW_CONSTRUCTOR_RULES, ALLOW_NON_POSITIVE})


@dataclass(frozen=True)
class Status:
    """``lex(mul i.., mul j.., ...)`` over 1-based argument indices."""

    groups: tuple

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(tuple(g) for g in self.groups))

    @classmethod
    def lexicographic(cls, n: int) -> "Status":
        return cls(tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def multiset(cls, n: int) -> "Status":
        return cls((tuple(range(1, n + 1)),))

    @property
    def arity(self) -> int:
        return max((i for g in self.groups for i in g), default=0)

    @property
    def lex_positions(self) -> frozenset:
        return frozenset(g[0] for g in self.groups if len(g) == 1)

    def __str__(self) -> str:
        return "lex(" + ", ".join(
            "mul " + " ".join(map(str, g)) for g in self.groups) + ")"


@dataclass(frozen=True)
class InductiveDecl:
    name: str
    constructors: tuple = ()


@dataclass(frozen=True)
class FunctionDecl:
    symbol: Symbol
    status: Optional[Status] = None

    @property
    def name(self) -> str:
        return self.symbol.name

    @property
    def arity(self) -> int:
        return self.symbol.arity


def check_status(fd: FunctionDecl, status: Optional[Status] = None) -> None:
    """Raise :class:`StatusError` unless the status is well formed for ``fd``."""
    stat = status if status is not None else fd.status
    if stat is None:
        return
    name = fd.symbol.name
    if not stat.groups or any(not g for g in stat.groups):
        raise StatusError(f"{name}: status needs at least one nonempty mul group")
    seen = set()
    for g in stat.groups:
        for i in g:
            if i < 1:
                raise StatusError(f"{name}: status index {i} must be positive")
            if i in seen:
                raise StatusError(f"{name}: status is not linear, index {i} repeated")
            seen.add(i)
    if not 1 <= stat.arity <= fd.arity:
        raise StatusError(
            f"{name}: status arity {stat.arity} exceeds symbol arity {fd.arity}")
    for g in stat.groups:
        kinds = {fd.symbol.arg_types[i - 1] for i in g}
        if len(kinds) > 1:
            raise StatusError(
                f"{name}: mul group ({' '.join(map(str, g))}) mixes argument types "
                + ", ".join(sorted(map(str, kinds))))


@dataclass(frozen=True)
class Signature:
    inductives: tuple = ()
    functions: tuple = ()
    strict: tuple = ()          # (bigger, smaller) symbol-name pairs
    equivalent: tuple = ()      # (a, b) symbol-name pairs
    flags: frozenset = frozenset()
    sealed: bool = False

    def __post_init__(self):
        for name in ("inductives", "functions", "strict", "equivalent"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "flags", frozenset(self.flags))

    # -- lookup ---------------------------------------------------------------

    @cached_property
    def _symbols(self) -> dict:
        table = {}
        for ind in self.inductives:
            for c in ind.constructors:
                table.setdefault(c.name, c)
        for fd in self.functions:
            table.setdefault(fd.name, fd.symbol)
        return table

    @cached_property
    def _decls(self) -> dict:
        return {fd.name: fd for fd in self.functions}

    @cached_property
    def _inductive_table(self) -> dict:
        return {ind.name: ind for ind in self.inductives}

    def symbol(self, name: str) -> Symbol:
        return self._symbols[name]

    def has_symbol(self, name: str) -> bool:
        return name in self._symbols

    @property
    def symbols(self) -> tuple:
        return tuple(self._symbols.values())

    def inductive(self, name: str) -> InductiveDecl:
        return self._inductive_table[name]

    def is_inductive(self, name: str) -> bool:
        return name in self._inductive_table

    @property
    def inductive_names(self) -> tuple:
        return tuple(ind.name for ind in self.inductives)

    def constructors_of(self, name: str) -> tuple:
        return self._inductive_table[name].constructors

    def is_constructor(self, name: str) -> bool:
        sym = self._symbols.get(name)
        return sym is not None and sym.constructor

    def status_of(self, name: str) -> Optional[Status]:
        """Declared status, or plain left-to-right lexicographic by default."""
        fd = self._decls.get(name)
        if fd is not None and fd.status is not None:
            return fd.status
        sym = self._symbols[name]
        if sym.arity == 0:
            return None
        return Status.lexicographic(sym.arity)

    # -- derived orders ---------------------------------------------------------

    @cached_property
    def dependency(self) -> "QuasiOrder":
        return dependency_order(self)

    @cached_property
    def precedence(self) -> "QuasiOrder":
        return _precedence(self)

    def compare(self, f: str, g: str) -> Optional[str]:
        """'>' , '<', '=' or None for the precedence on symbol names."""
        return self.precedence.compare(f, g)

    @cached_property
    def positivity(self) -> dict:
        return check_strict_positivity(self)

    def is_basic(self, name: str) -> bool:
        return self.positivity[name].basic

    def is_strictly_positive(self, name: str) -> bool:
        return self.positivity[name].strictly_positive

    # -- extension --------------------------------------------------------------

    def extend(self, *, inductives=(), functions=(), strict=(), equivalent=(),
               flags=()) -> "Signature":
        """A new unsealed signature with extra declarations."""
        return Signature(
            inductives=self.inductives + tuple(inductives),
            functions=self.functions + tuple(functions),
            strict=self.strict + tuple(strict),
            equivalent=self.equivalent + tuple(equivalent),
            flags=self.flags | frozenset(flags),
        )


@dataclass(frozen=True)
class QuasiOrder:
    """Equivalence classes plus the strict order between them."""

    classes: tuple                  # tuple of frozensets
    above: dict = field(repr=False)  # class index -> set of strictly smaller class indices
    cyclic: frozenset = frozenset()  # members of classes involved in a strict cycle

    @cached_property
    def class_of(self) -> dict:
        return {m: i for i, c in enumerate(self.classes) for m in c}

    def compare(self, a, b) -> Optional[str]:
        ca, cb = self.class_of.get(a), self.class_of.get(b)
        if ca is None or cb is None:
            return "=" if a == b else None
        if ca == cb:
            return "="
        if cb in self.above[ca]:
            return ">"
        if ca in self.above[cb]:
            return "<"
        return None

    def geq(self, a, b) -> bool:
        return self.compare(a, b) in (">", "=")

    def strict_pairs(self) -> set:
        out = set()
        for i, smaller in self.above.items():
            for j in smaller:
                for a in self.classes[i]:
                    for b in self.classes[j]:
                        out.add((a, b))
        return out


def _closure(nodes: list, edges: dict) -> dict:
    reach = {}
    for n in nodes:
        seen, stack = set(), list(edges.get(n, ()))
        while stack:
            m = stack.pop()
            if m in seen:
                continue
            seen.add(m)
            stack.extend(edges.get(m, ()))
        reach[n] = seen
    return reach


def _quasi_order(nodes: list, edges: dict, equal_pairs=()) -> QuasiOrder:
    """Build a quasi-order from ``a >= b`` edges (plus explicit equalities)."""
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for a, b in equal_pairs:
        parent[find(a)] = find(b)
    reach = _closure(nodes, edges)
    for a in nodes:
        for b in reach[a]:
            if a in reach[b]:
                parent[find(a)] = find(b)
    groups = {}
    for n in nodes:
        groups.setdefault(find(n), []).append(n)
    classes = tuple(frozenset(g) for g in groups.values())
    index = {m: i for i, c in enumerate(classes) for m in c}
    class_edges = {i: set() for i in range(len(classes))}
    for a in nodes:
        for b in edges.get(a, ()):
            if index[a] != index[b]:
                class_edges[index[a]].add(index[b])
    class_reach = _closure(list(class_edges), class_edges)
    above = {i: set(r) - {i} for i, r in class_reach.items()}
    return QuasiOrder(classes, above)


def dependency_order(sig: Signature) -> QuasiOrder:
    """``s >= t`` when ``t`` occurs in the type of a constructor of ``s``."""
    nodes = list(sig.inductive_names)
    edges = {}
    for ind in sig.inductives:
        deps = set()
        for c in ind.constructors:
            deps |= inductive_names(c.type)
        edges[ind.name] = deps & set(nodes)
    return _quasi_order(nodes, edges)


def _precedence(sig: Signature) -> QuasiOrder:
    nodes = [s.name for s in sig.symbols]
    known = set(nodes)
    parent_pairs = [(a, b) for a, b in sig.equivalent if a in known and b in known]
    edges = {n: set() for n in nodes}
    for a, b in sig.strict:
        if a in known and b in known:
            edges[a].add(b)
    # build classes from the declared equivalences first, then add the
    # implicit constructor floor between classes
    base = _quasi_order(nodes, {n: set() for n in nodes}, parent_pairs)
    ctor_only = {i for i, c in enumerate(base.classes)
                 if all(sig.is_constructor(m) for m in c)}
    for i, cls in enumerate(base.classes):
        if i in ctor_only:
            continue
        for j in ctor_only:
            for a in cls:
                edges[a].update(base.classes[j])
    reach = _closure(nodes, edges)
    # strict cycles: a > ... > b with a ~ b, or a reaches itself
    cyclic = set()
    for a in nodes:
        for b in reach[a]:
            if base.class_of[a] == base.class_of[b] or a in reach[b]:
                cyclic.add(a)
    class_index = base.class_of
    class_edges = {i: set() for i in range(len(base.classes))}
    for a in nodes:
        for b in edges[a]:
            class_edges[class_index[a]].add(class_index[b])
    class_reach = _closure(list(class_edges), class_edges)
    above = {i: set(r) - {i} for i, r in class_reach.items()}
    return QuasiOrder(base.classes, above, frozenset(cyclic))


# -- strict positivity ----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    constructor: str
    argument: int            # 1-based argument index of the constructor
    reason: str
    type_position: tuple = ()  # position inside the argument type, when relevant

    def __str__(self) -> str:
        where = "." .join(map(str, self.type_position)) or "ε"
        return f"{self.constructor} argument {self.argument} (at {where}): {self.reason}"


@dataclass(frozen=True)
class PositivityReport:
    strictly_positive: bool
    basic: bool
    violations: tuple = ()


def check_strict_positivity(sig: Signature) -> dict:
    """Per-inductive-type report of the strict positivity condition."""
    order = sig.dependency
    reports = {}
    for ind in sig.inductives:
        s = ind.name
        violations = []
        functional = False
        for c in ind.constructors:
            for j, arg in enumerate(c.arg_types, 1):
                inner_args, target = split_arrow(arg)
                if inner_args:
                    functional = True
                if not order.geq(s, target.name):
                    violations.append(Violation(
                        c.name, j, f"target {target.name} is not below {s}"))
                for k, a in enumerate(inner_args, 1):
                    for pos, name in occurrences(a):
                        if name == s:
                            violations.append(Violation(
                                c.name, j,
                                f"{s} occurs in argument {k} of the argument type {arg}",
                                (2,) * (k - 1) + (1,) + pos))
                negs = negative_positions(arg)
                for pos, name in occurrences(arg):
                    if pos in negs and order.compare(name, s) == "=":
                        violations.append(Violation(
                            c.name, j,
                            f"{name} (equivalent to {s}) occurs negatively in {arg}",
                            pos))
        ok = not violations
        reports[s] = PositivityReport(ok, ok and not functional, tuple(violations))
    return reports


# -- validation -----------------------------------------------------------------

@dataclass
class ValidationReport:
    dependency: QuasiOrder
    positivity: dict
    errors: list = field(default_factory=list)
    positivity_errors: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.errors and not self.positivity_errors

    def acceptable(self, flags) -> bool:
        if self.errors:
            return False
        return not self.positivity_errors or ALLOW_NON_POSITIVE in flags

    def lines(self) -> list:
        out = [f"error: {e}" for e in self.errors]
        out += [f"positivity: {e}" for e in self.positivity_errors]
        out += [f"note: {n}" for n in self.notes]
        return out


def _well_formed_type(sig: Signature, t: Type, where: str, errors: list) -> None:
    for name in inductive_names(t):
        if not sig.is_inductive(name):
            errors.append(f"{where}: undeclared inductive type {name}")


def validate(sig: Signature) -> ValidationReport:
    errors = []
    names = set()
    for ind in sig.inductives:
        if ind.name in names:
            errors.append(f"inductive type {ind.name} declared twice")
        names.add(ind.name)
    seen = set()
    for ind in sig.inductives:
        for c in ind.constructors:
            if c.name in seen:
                errors.append(f"symbol {c.name} declared twice")
            seen.add(c.name)
            if not c.constructor or c.result != Ind(ind.name):
                errors.append(f"constructor {c.name} must produce {ind.name}")
            _well_formed_type(sig, c.type, f"constructor {c.name}", errors)
    for fd in sig.functions:
        if fd.name in seen:
            errors.append(f"symbol {fd.name} declared twice")
        seen.add(fd.name)
        _well_formed_type(sig, fd.symbol.type, f"symbol {fd.name}", errors)
        if fd.status is not None:
            if fd.arity == 0:
                errors.append(f"{fd.name}: arity-0 symbols take no status")
            else:
                try:
                    check_status(fd)
                except StatusError as exc:
                    errors.append(str(exc))
    for a, b in sig.strict + sig.equivalent:
        for n in (a, b):
            if not sig.has_symbol(n):
                errors.append(f"precedence mentions unknown symbol {n}")
    for flag in sig.flags:
        if flag not in KNOWN_FLAGS:
            errors.append(f"unknown option {flag}")

    dep = sig.dependency
    positivity = check_strict_positivity(sig)
    pos_errors = [f"{s} is not strictly positive: {v}"
                  for s, rep in positivity.items() for v in rep.violations]

    prec = sig.precedence
    if prec.cyclic:
        errors.append("precedence is not well-founded: cycle through "
                      + ", ".join(sorted(prec.cyclic)))
    for cls in prec.classes:
        stats = {}
        for m in cls:
            if sig.symbol(m).arity >= 1:
                stats.setdefault(sig.status_of(m), []).append(m)
        if len(stats) > 1:
            errors.append("equivalent symbols with different statuses: " + "; ".join(
                f"{', '.join(sorted(ms))} have {st}" for st, ms in stats.items()))

    notes = ["dependency order >_I is well-founded (finite signature)"]
    return ValidationReport(dep, positivity, errors, pos_errors, notes)


def seal(sig: Signature) -> Signature:
    report = validate(sig)
    if not report.acceptable(sig.flags):
        raise ValidationError("invalid signature:\n  " + "\n  ".join(report.lines()),
                              report)
    return dataclasses.replace(sig, sealed=True)


# -- convenience constructors -------------------------------------------------

def inductive(name: str, *ctors) -> InductiveDecl:
    """``inductive('nat', ('zero', []), ('succ', [Ind('nat')]))``."""
    res = Ind(name)
    return InductiveDecl(name, tuple(
        Symbol(cname, tuple(args), res, constructor=True) for cname, args in ctors))


def function(name: str, arg_types: Iterable[Type], result: Type,
             status: Optional[Status] = None) -> FunctionDecl:
    return FunctionDecl(Symbol(name, tuple(arg_types), result), status)
