"""Independent replay of schema derivations.

The checker below re-validates every node of a :class:`~idts.schema.Derivation`
against the clause definitions directly.  It deliberately shares no decision
code with the search in :mod:`idts.schema`: accessibility chains, status
evidence and argument-ordering witnesses are all re-checked from scratch.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import PositionError
from .signature import Signature
from .terms import Abs, App, FunApp, Term, Var, show, subterm_at
from .types import Ind


@dataclass
class ReplayResult:
    ok: bool
    nodes: int = 0
    errors: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


class _Replay:
    def __init__(self, f: str, lhs_args, sig: Signature):
        self.f = f
        self.lhs = tuple(lhs_args)
        self.sig = sig
        self.nodes = 0
        self.errors = []

    def fail(self, term, msg) -> bool:
        self.errors.append(f"{show(term)}: {msg}")
        return False

    # accessibility ---------------------------------------------------------------

    def basic(self, t) -> bool:
        return (isinstance(t, Ind) and self.sig.is_inductive(t.name)
                and self.sig.is_basic(t.name))

    def acc(self, step) -> bool:
        if not 1 <= step.arg <= len(self.lhs):
            return self.fail(step.term, f"accessibility refers to argument {step.arg}")
        root = self.lhs[step.arg - 1]
        t, parent = step.term, step.parent
        if step.clause == 1:
            return parent is None and t == root or self.fail(t, "Acc1 term is not the argument")
        if step.clause == 5:
            try:
                at = subterm_at(root, step.detail)
            except (PositionError, TypeError):
                return self.fail(t, "Acc5 position invalid")
            if at != t:
                return self.fail(t, "Acc5 position does not hold the term")
            if not self.basic(t.type):
                return self.fail(t, f"Acc5 on non-basic type {t.type}")
            if not t.free_vars <= root.free_vars:
                return self.fail(t, "Acc5 free variables escape")
            return parent is None or self.fail(t, "Acc5 must start a chain")
        if parent is None or parent.arg != step.arg:
            return self.fail(t, f"Acc{step.clause} without a parent in the same argument")
        if not self.acc(parent):
            return False
        p = parent.term
        if step.clause == 2:
            return isinstance(p, Abs) and p.body == t or self.fail(t, "Acc2 not a body")
        if step.clause == 3:
            ok = (isinstance(p, FunApp) and p.symbol.constructor
                  and isinstance(step.detail, int) and 1 <= step.detail <= len(p.args)
                  and p.args[step.detail - 1] == t)
            return ok or self.fail(t, "Acc3 not a constructor argument")
        if step.clause == 4:
            x = step.detail
            ok = (isinstance(p, App) and isinstance(p.arg, Var) and p.arg == x
                  and p.fun == t and x not in t.free_vars and x not in root.free_vars)
            return ok or self.fail(t, "Acc4 side condition fails")
        return self.fail(t, f"unknown accessibility clause {step.clause}")

    # argument ordering -------------------------------------------------------------

    def ordered(self, l: Term, u: Term, w) -> bool:
        pos = tuple(w.position)
        if not pos:
            return self.fail(u, "ordering witness at the root")
        try:
            sub = subterm_at(l, pos)
        except (PositionError, TypeError):
            return self.fail(u, "ordering witness position invalid")
        s = l.type
        inductive = (isinstance(s, Ind) and self.sig.is_inductive(s.name)
                     and self.sig.is_strictly_positive(s.name))
        if w.branch == "inductive":
            if not inductive:
                return self.fail(u, f"inductive branch used at type {s}")
            t = u.type
            if t != s and not (isinstance(t, Ind) and self.sig.is_inductive(t.name)
                               and self.sig.dependency.compare(s.name, t.name) == "="):
                return self.fail(u, "compared terms have unrelated types")
            if not isinstance(l, FunApp):
                return self.fail(u, "inductive branch needs a function-headed term")
            for k in range(1, len(pos)):
                anc = subterm_at(l, pos[:k])
                if not (isinstance(anc, FunApp) and anc.symbol.constructor):
                    return self.fail(u, f"ancestor {show(anc)} is not constructor-headed")
            built = sub
            for a in w.extra:
                try:
                    built = App(built, a)
                except TypeError:
                    return self.fail(u, "ordering witness arguments ill-typed")
            return built == u or self.fail(u, "ordering witness does not rebuild the term")
        if w.branch == "subterm":
            if inductive or u.type != s:
                return self.fail(u, "subterm branch used at the wrong type")
            if w.extra:
                return self.fail(u, "subterm branch with applied arguments")
            if sub != u:
                return self.fail(u, "subterm witness position does not hold the term")
            return u.free_vars <= l.free_vars or self.fail(u, "free variables escape")
        return self.fail(u, f"unknown ordering branch {w.branch}")

    # status evidence -----------------------------------------------------------------

    def status(self, node) -> tuple:
        """Check the evidence; return (ok, terms that need side derivations)."""
        ev = node.status
        stat = self.sig.status_of(self.f)
        us = node.term.args
        if ev is None or stat is None or ev.status != stat:
            self.fail(node.term, "missing or foreign status evidence")
            return False, []
        if len(us) < stat.arity or len(self.lhs) < stat.arity:
            self.fail(node.term, "too few arguments for the status")
            return False, []
        groups = list(ev.groups)
        if not groups or len(groups) > len(stat.groups):
            self.fail(node.term, "evidence has the wrong number of groups")
            return False, []
        needed = []
        for k, (g, declared) in enumerate(zip(groups, stat.groups)):
            if tuple(g.group) != tuple(declared):
                self.fail(node.term, "evidence groups do not follow the status")
                return False, []
            left = Counter(self.lhs[i - 1] for i in declared)
            right = Counter(us[i - 1] for i in declared)
            last = k == len(groups) - 1
            if g.verdict == "eq":
                if last or left != right:
                    self.fail(node.term, f"group {k + 1} is not equal or is the last one")
                    return False, []
                continue
            if g.verdict != "mul-dec" or not last:
                self.fail(node.term, f"group {k + 1}: bad verdict {g.verdict}")
                return False, []
            rest_left, rest_right = left - right, right - left
            if not rest_left:
                self.fail(node.term, "multiset comparison has nothing left on the left")
                return False, []
            dominated = Counter()
            for j, i, w in g.dominations:
                if i not in declared or j not in declared:
                    self.fail(node.term, "domination index outside the group")
                    return False, []
                l, u = self.lhs[i - 1], us[j - 1]
                if l not in rest_left or u not in rest_right:
                    self.fail(node.term, "domination uses a cancelled element")
                    return False, []
                if not self.ordered(l, u, w):
                    return False, []
                dominated[u] += 1
                needed.extend(w.extra)
            if dominated != rest_right:
                self.fail(node.term, "not every remaining element is dominated")
                return False, []
        return True, needed

    # closure ---------------------------------------------------------------------

    def node(self, d) -> bool:
        self.nodes += 1
        t = d.term
        if d.clause == 1:
            return isinstance(t, Var) or self.fail(t, "CC1 on a non-variable")
        if d.clause == 2:
            if d.acc is None or d.acc.term != t:
                return self.fail(t, "CC2 without a matching accessibility chain")
            return self.acc(d.acc)
        if d.clause == 3:
            if not (isinstance(t, App) and len(d.children) == 2
                    and d.children[0].term == t.fun and d.children[1].term == t.arg):
                return self.fail(t, "CC3 children do not split the application")
            return all(self.node(c) for c in d.children)
        if d.clause == 4:
            if not (isinstance(t, Abs) and len(d.children) == 1 and d.children[0].term == t.body):
                return self.fail(t, "CC4 child is not the abstraction body")
            return self.node(d.children[0])
        if d.clause in (5, 6):
            if not isinstance(t, FunApp):
                return self.fail(t, f"CC{d.clause} on a term without a head symbol")
            if len(d.children) != len(t.args) or any(
                    c.term != a for c, a in zip(d.children, t.args)):
                return self.fail(t, f"CC{d.clause} children do not match the arguments")
            if not all(self.node(c) for c in d.children):
                return False
            rel = self.sig.compare(t.symbol.name, self.f)
            if d.clause == 5:
                return rel == "<" or self.fail(t, f"{t.symbol.name} is not below {self.f}")
            if rel != "=":
                return self.fail(t, f"{t.symbol.name} is not equivalent to {self.f}")
            ok, needed = self.status(d)
            if not ok:
                return False
            have = Counter(s.term for s in d.side)
            if Counter(needed) - have:
                return self.fail(t, "side condition terms lack derivations")
            return all(self.node(s) for s in d.side)
        return self.fail(t, f"unknown closure clause {d.clause}")


def replay_derivation(f: str, lhs_args, derivation, sig: Signature) -> ReplayResult:
    r = _Replay(f, lhs_args, sig)
    ok = r.node(derivation)
    return ReplayResult(ok, r.nodes, r.errors)


def replay_verdict(verdict, sig: Signature) -> ReplayResult:
    """Re-check an accepted rule verdict: rhs, free variables and conditions."""
    rule = verdict.rule
    r = _Replay(rule.head, rule.args, sig)
    ok = verdict.derivation is not None and verdict.derivation.term == rule.rhs
    if not ok:
        r.errors.append("derivation does not conclude the right-hand side")
    ok = ok and r.node(verdict.derivation)
    for x in rule.rhs.free_vars:
        step = verdict.variables.get(x)
        if step is None or step.term != x:
            r.errors.append(f"free variable {x.name} has no accessibility chain")
            ok = False
        elif not r.acc(step):
            ok = False
    wanted = [t for pair in rule.condition for t in pair]
    if len(verdict.conditions) != len(wanted):
        r.errors.append("condition derivations missing")
        ok = False
    for t, d in zip(wanted, verdict.conditions):
        if d is None or d.term != t or not r.node(d):
            r.errors.append(f"condition term {show(t)} not justified")
            ok = False
    return ReplayResult(ok, r.nodes, r.errors)
