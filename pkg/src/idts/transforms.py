"""Source-to-source generators: recursors, curried wrappers, conditional encoding.

Generators never mutate their input; they return the new declarations and
rules together with a sealed, extended signature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ArityError, EncodingError, RecursorError
from .rewriting import Rule, RuleSystem
from .signature import FunctionDecl, Signature, seal
from .terms import FunApp, Symbol, Var, app, fresh_name, lam
from .types import Arrow, Ind, Type, arrow, split_arrow


def mangle(t: Type) -> str:
    """An identifier-safe spelling of a type, e.g. ``Lnat_to_ordR_to_ord``."""
    if isinstance(t, Ind):
        return t.name
    dom = mangle(t.domain)
    if isinstance(t.domain, Arrow):
        dom = f"L{dom}R"
    return f"{dom}_to_{mangle(t.codomain)}"


def _pick(name: str, taken) -> str:
    return name if name not in taken else fresh_name(name, taken)


def _fresh_symbol(name: str, sig: Signature) -> str:
    return _pick(name, {s.name for s in sig.symbols})


# -- recursors ---------------------------------------------------------------------

@dataclass
class RecursorBundle:
    members: tuple                  # inductive names of the class, declaration order
    target: Type
    symbols: dict                   # member -> FunctionDecl
    branch_types: tuple             # (constructor name, branch type), declaration order
    rules: list
    signature: Signature            # sealed, extended with the recursor symbols

    def hypotheses(self, constructor: str) -> int:
        for name, ty in self.branch_types:
            if name == constructor:
                ctor = self.signature.symbol(constructor)
                return len(split_arrow(ty)[0]) - ctor.arity
        raise KeyError(constructor)


def _hypothesis(arg: Type, members: set, target: Type) -> Optional[Type]:
    """For a constructor argument ``b -> ... -> s'`` with s' in the class: ``b -> ... -> t``."""
    bs, res = split_arrow(arg)
    if res.name in members:
        return arrow(*bs, target)
    return None


def generate_recursors(sig: Signature, cls: str, target: Type) -> RecursorBundle:
    """Recursor symbols and rules for the mutual class of inductive type ``cls``."""
    if not sig.is_inductive(cls):
        raise RecursorError(f"{cls} is not an inductive type")
    for leaf in _leaves(target):
        if not sig.is_inductive(leaf):
            raise RecursorError(f"target type mentions undeclared type {leaf}")
    dep = sig.dependency
    members = tuple(n for n in sig.inductive_names if dep.compare(n, cls) == "=")
    bad = [m for m in members if not sig.is_strictly_positive(m)]
    if bad:
        raise RecursorError(f"not strictly positive: {', '.join(bad)}")
    member_set = set(members)
    ctors = [c for m in members for c in sig.constructors_of(m)]

    branch_types = []
    for c in ctors:
        hyps = [h for h in (_hypothesis(a, member_set, target) for a in c.arg_types) if h]
        branch_types.append((c.name, arrow(*c.arg_types, *hyps, target)))

    names = {m: _fresh_symbol(f"rec_{m}_{mangle(target)}", sig) for m in members}
    symbols = {m: Symbol(names[m], tuple(t for _, t in branch_types) + (Ind(m),), target)
               for m in members}
    decls = {m: FunctionDecl(symbols[m]) for m in members}
    equivalent = [(names[members[0]], names[m]) for m in members[1:]]
    new_sig = seal(sig.extend(functions=decls.values(), equivalent=equivalent))

    taken = {s.name for s in new_sig.symbols}
    branch_vars = []
    for cname, ty in branch_types:
        x = _pick(f"X_{cname}", taken)
        taken.add(x)
        branch_vars.append(Var(x, ty))

    rules = []
    for m in members:
        for c in sig.constructors_of(m):
            used = set(taken)
            us = []
            for k, a in enumerate(c.arg_types, 1):
                n = _pick(f"U{k}", used)
                used.add(n)
                us.append(Var(n, a))
            hyps = []
            for u in us:
                bs, res = split_arrow(u.type)
                if res.name not in member_set:
                    continue
                ys = []
                for b in bs:
                    n = fresh_name("y", used)
                    used.add(n)
                    ys.append(Var(n, b))
                call = FunApp(symbols[res.name], tuple(branch_vars) + (app(u, *ys),))
                hyps.append(lam(ys, call))
            branch = branch_vars[[n for n, _ in branch_types].index(c.name)]
            lhs = FunApp(symbols[m], tuple(branch_vars) + (FunApp(c, tuple(us)),))
            rules.append(Rule(lhs, app(branch, *us, *hyps)))
    return RecursorBundle(members, target, decls, tuple(branch_types), rules, new_sig)


def _leaves(t):
    if isinstance(t, Ind):
        yield t.name
    else:
        yield from _leaves(t.domain)
        yield from _leaves(t.codomain)


# -- curried symbols ------------------------------------------------------------------

@dataclass
class CurryResult:
    decl: FunctionDecl
    rule: Rule
    precedence: tuple               # (curried, original)
    signature: Signature


def currify(sig: Signature, f: str) -> CurryResult:
    """A constant ``f_c`` of the type of ``f`` with the rule ``f_c --> \\x... f(x...)``."""
    sym = sig.symbol(f)
    if sym.arity == 0:
        raise ArityError(f"{f} has arity 0; there is nothing to curry")
    name = _fresh_symbol(f"{f}_c", sig)
    curried = Symbol(name, (), sym.type)
    taken = {s.name for s in sig.symbols} | {name}
    xs = []
    for t in sym.arg_types:
        n = _pick("x", taken) if len(sym.arg_types) == 1 else fresh_name("x", taken)
        taken.add(n)
        xs.append(Var(n, t))
    rule = Rule(FunApp(curried, ()), lam(xs, FunApp(sym, tuple(xs))))
    decl = FunctionDecl(curried)
    new_sig = seal(sig.extend(functions=[decl], strict=[(name, f)]))
    return CurryResult(decl, rule, (name, f), new_sig)


# -- conditional rules ------------------------------------------------------------------

@dataclass
class Encoding:
    rules: list
    eq_symbol: Optional[Symbol] = None


def eq_symbol_name(types, result: Type) -> str:
    return f"eq{len(types)}_" + "_".join(mangle(t) for t in (*types, result))


def eq_symbol(types, result: Type) -> Symbol:
    args = []
    for t in types:
        args += [t, t]
    return Symbol(eq_symbol_name(types, result), tuple(args) + (result,), result)


def eq_rule(sym: Symbol, avoid=()) -> Rule:
    """``eq_n(x1, x1, ..., xn, xn, z) --> z``; variable names avoid ``avoid``."""
    n = (sym.arity - 1) // 2
    taken = set(avoid)
    xs = []
    for k in range(1, n + 1):
        name = _pick(f"X{k}", taken)
        taken.add(name)
        xs.append(Var(name, sym.arg_types[2 * k - 2]))
    z = Var(_pick("Z", taken), sym.result)
    args = [a for x in xs for a in (x, x)] + [z]
    return Rule(FunApp(sym, tuple(args)), z)


def encode_conditional(rule: Rule, sig: Optional[Signature] = None) -> Encoding:
    """Replace a conditional rule by two unconditional ones."""
    if not rule.condition:
        return Encoding([rule])
    lhs_vars = rule.lhs.free_vars
    for u, v in rule.condition:
        escaped = (u.free_vars | v.free_vars) - lhs_vars
        if escaped:
            names = ", ".join(sorted(x.name for x in escaped))
            raise EncodingError(f"condition variables {names} do not occur in the left-hand side")
    types = tuple(u.type for u, _ in rule.condition)
    sym = eq_symbol(types, rule.rhs.type)
    if sig is not None and sig.has_symbol(sym.name):
        sym = sig.symbol(sym.name)
    args = [t for pair in rule.condition for t in pair] + [rule.rhs]
    avoid = {s.name for s in sig.symbols} if sig is not None else ()
    return Encoding([Rule(rule.lhs, FunApp(sym, tuple(args))), eq_rule(sym, avoid)], sym)


def encode_system(rs: RuleSystem) -> RuleSystem:
    """Encode every conditional rule; eq symbols go below every defined symbol."""
    sig = rs.signature
    rules, new_syms = [], {}
    for r in rs.rules:
        enc = encode_conditional(r, sig)
        if enc.eq_symbol is None:
            rules.append(r)
            continue
        rules.append(enc.rules[0])
        if enc.eq_symbol.name not in new_syms and not sig.has_symbol(enc.eq_symbol.name):
            new_syms[enc.eq_symbol.name] = enc.eq_symbol
            rules.append(enc.rules[1])
    if not new_syms:
        return RuleSystem(sig, rules)
    defined = [fd.name for fd in sig.functions]
    strict = [(g, e) for e in new_syms for g in defined]
    new_sig = seal(sig.extend(functions=[FunctionDecl(s) for s in new_syms.values()],
                              strict=strict))
    return RuleSystem(new_sig, rules)
