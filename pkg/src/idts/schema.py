"""The General Schema: accessibility, argument ordering, computable closure.

Every positive verdict comes with a :class:`Derivation` that records which
closure clause justified each node; :mod:`idts.certificates` replays them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import TermTypeError
from .orderings import StatusEvidence, status_compare
from .rewriting import Rule, RuleSystem
from .signature import Signature, ValidationReport, validate
from .terms import Abs, App, FunApp, Term, Var, app, show, spine, subterms
from .types import Ind


# -- accessible subterms ----------------------------------------------------------

@dataclass(frozen=True)
class AccStep:
    """One accessibility fact: ``term`` is in Acc(l_arg) by ``clause``."""

    term: Term
    clause: int                     # 1..5
    arg: int                        # 1-based index into the lhs arguments
    parent: Optional["AccStep"] = None
    detail: object = None           # clause 3: argument index; 4: the variable; 5: position

    def chain(self) -> list:
        out, node = [], self
        while node is not None:
            out.append(node.clause)
            node = node.parent
        return list(reversed(out))

    def __str__(self) -> str:
        return "Acc(" + ",".join(map(str, self.chain())) + ")"


def _is_basic_type(t, sig: Signature) -> bool:
    return isinstance(t, Ind) and sig.is_inductive(t.name) and sig.is_basic(t.name)


def accessible(v: Term, sig: Signature, arg: int = 1) -> dict:
    """Acc(v): accessible subterm -> first derivation found (breadth first)."""
    found = {}
    queue = deque()

    def add(step):
        if step.term not in found:
            found[step.term] = step
            queue.append(step)

    fv = v.free_vars

    def drain():
        while queue:
            step = queue.popleft()
            t = step.term
            if isinstance(t, Abs):
                add(AccStep(t.body, 2, arg, step))
            elif isinstance(t, FunApp) and t.symbol.constructor:
                for i, a in enumerate(t.args, 1):
                    add(AccStep(a, 3, arg, step, i))
            elif isinstance(t, App) and isinstance(t.arg, Var):
                x = t.arg
                if x not in t.fun.free_vars and x not in fv:
                    add(AccStep(t.fun, 4, arg, step, x))

    add(AccStep(v, 1, arg))
    drain()
    # clause 5 seeds come last, so structural chains are preferred as certificates
    for pos, s in subterms(v):
        if _is_basic_type(s.type, sig) and s.free_vars <= fv:
            add(AccStep(s, 5, arg, None, pos))
    drain()
    return found


def acc_vector(lhs_args, sig: Signature) -> dict:
    """Union of Acc(l_i) over the arguments, keeping the first derivation."""
    found = {}
    for i, l in enumerate(lhs_args, 1):
        for t, step in accessible(l, sig, i).items():
            found.setdefault(t, step)
    return found


# -- ordering on arguments ---------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """``v = (u|_position extra...)`` (inductive branch) or ``v = u|_position``."""

    position: tuple
    extra: tuple = ()
    branch: str = "inductive"      # or 'subterm'

    def __str__(self) -> str:
        pos = ".".join(map(str, self.position))
        if self.branch == "subterm":
            return f"sub@{pos}"
        return f"@{pos}" + (f"+{len(self.extra)}" if self.extra else "")


def _comparable_types(u: Term, v: Term, sig: Signature) -> Optional[str]:
    """Which branch of the argument ordering applies, or raise TermTypeError."""
    s, t = u.type, v.type
    inductive = (isinstance(s, Ind) and sig.is_inductive(s.name)
                 and sig.is_strictly_positive(s.name))
    if s == t:
        return "inductive" if inductive else "subterm"
    if (inductive and isinstance(t, Ind) and sig.is_inductive(t.name)
            and sig.dependency.compare(s.name, t.name) == "="):
        return "inductive"
    raise TermTypeError(f"cannot compare {show(u)} : {s} with {show(v)} : {t}")


def _descent_positions(u: Term):
    """Positions p != root whose strict non-root prefixes are constructor-headed."""
    if not isinstance(u, FunApp):
        return
    stack = [((i,), a) for i, a in enumerate(u.args, 1)]
    while stack:
        p, t = stack.pop(0)
        yield p, t
        if isinstance(t, FunApp) and t.symbol.constructor:
            stack.extend((p + (i,), a) for i, a in enumerate(t.args, 1))


def greater_arg_witnesses(u: Term, v: Term, sig: Signature) -> list:
    branch = _comparable_types(u, v, sig)
    out = []
    if branch == "inductive":
        head, args = spine(v)
        for p, sub in _descent_positions(u):
            for k in range(len(args), -1, -1):
                if app(head, *args[:k]) == sub:
                    out.append(Witness(p, tuple(args[k:])))
        return out
    if not v.free_vars <= u.free_vars:
        return out
    for p, sub in subterms(u):
        if p and sub == v:
            out.append(Witness(p, (), "subterm"))
    return out


def greater_arg(u: Term, v: Term, sig: Signature) -> bool:
    """The argument ordering ``u > v``."""
    return bool(greater_arg_witnesses(u, v, sig))


# -- computable closure --------------------------------------------------------------

@dataclass
class Derivation:
    clause: int                     # 1..6
    term: Term
    children: tuple = ()
    acc: Optional[AccStep] = None   # clause 2
    status: Optional[StatusEvidence] = None  # clause 6
    side: tuple = ()                # clause 6: derivations of the extra arguments

    def render(self) -> str:
        if self.clause == 1:
            return "CC1"
        if self.clause == 2:
            return f"CC2[{self.acc}]"
        kids = ", ".join(c.render() for c in self.children)
        if self.clause == 3:
            return f"CC3({kids})"
        if self.clause == 4:
            return f"CC4({kids})"
        name = self.term.symbol.name
        if self.clause == 5:
            return f"CC5[{name}]" + (f" {{ args: {kids} }}" if kids else "")
        body = f"args: {kids}; status: {self.status}"
        if self.side:
            body += "; side: " + ", ".join(d.render() for d in self.side)
        return f"CC6[{name}] {{ {body} }}"

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()
        for c in self.side:
            yield from c.nodes()

    def tree_lines(self, indent: int = 0) -> list:
        pad = "  " * indent
        label = {1: "variable", 2: "accessible", 3: "application", 4: "abstraction",
                 5: "smaller symbol", 6: "recursive call"}[self.clause]
        line = f"{pad}CC{self.clause} {label}: {show(self.term)}"
        if self.acc is not None:
            line += f"  [{self.acc} in argument {self.acc.arg}]"
        if self.status is not None:
            line += f"  [{self.status}]"
        out = [line]
        for c in self.children:
            out += c.tree_lines(indent + 1)
        for c in self.side:
            out += [f"{pad}  side condition:"] + c.tree_lines(indent + 2)
        return out


@dataclass
class Failure:
    term: Term
    reasons: list = field(default_factory=list)
    child: Optional[Term] = None    # a failing subterm that explains the failure

    def __str__(self) -> str:
        return f"{show(self.term)}: " + "; ".join(self.reasons)


class ClosureSearch:
    """Backward search for membership in CC_f(l⃗), memoized per queried term."""

    def __init__(self, symbol: str, lhs_args, sig: Signature):
        self.f = symbol
        self.lhs_args = tuple(lhs_args)
        self.sig = sig
        self.acc = acc_vector(self.lhs_args, sig)
        self.memo = {}
        self.failures = {}

    def prove(self, r: Term) -> Optional[Derivation]:
        if r in self.memo:
            return self.memo[r]
        self.memo[r] = None          # cut cycles
        d = self._prove(r)
        self.memo[r] = d
        return d

    def _fail(self, r, reasons, child=None):
        self.failures[r] = Failure(r, reasons, child)
        return None

    def _prove(self, r: Term) -> Optional[Derivation]:
        if isinstance(r, Var):
            return Derivation(1, r)
        step = self.acc.get(r)
        if step is not None:
            return Derivation(2, r, acc=step)
        if isinstance(r, App):
            df, da = self.prove(r.fun), self.prove(r.arg)
            if df and da:
                return Derivation(3, r, (df, da))
            bad = r.fun if df is None else r.arg
            return self._fail(r, ["not accessible", "application has an argument outside the closure"], bad)
        if isinstance(r, Abs):
            db = self.prove(r.body)
            if db:
                return Derivation(4, r, (db,))
            return self._fail(r, ["not accessible", "abstraction body outside the closure"], r.body)
        g = r.symbol.name
        kids = [self.prove(a) for a in r.args]
        missing = next((a for a, d in zip(r.args, kids) if d is None), None)
        rel = self.sig.compare(g, self.f)
        if missing is not None:
            return self._fail(r, ["not accessible", f"argument {show(missing)} outside the closure"],
                              missing)
        if rel == "<":
            return Derivation(5, r, tuple(kids))
        if rel != "=":
            return self._fail(r, ["not accessible",
                                  f"{g} is not below {self.f} in the precedence"])
        stat = self.sig.status_of(self.f)
        if stat is None or stat.arity > len(r.args):
            return self._fail(r, ["not accessible", f"no usable status to compare {g} with {self.f}"])
        side_proofs = {}

        def witness(l, u):
            for w in greater_arg_witnesses(l, u, self.sig):
                proofs = [self.prove(x) for x in w.extra]
                if all(proofs):
                    side_proofs[(l, u)] = proofs
                    return w
            return None

        try:
            ev = status_compare(stat, self.lhs_args, r.args, witness)
        except TermTypeError as exc:
            return self._fail(r, ["not accessible", f"status comparison ill-typed: {exc}"])
        if ev is None:
            return self._fail(r, [
                "not accessible",
                f"arguments ({', '.join(map(show, self.lhs_args))}) are not greater than "
                f"({', '.join(map(show, r.args))}) in status {stat}"])
        side = []
        for grp in ev.groups:
            for j, i, w in grp.dominations:
                side += side_proofs.get((self.lhs_args[i - 1], r.args[j - 1]), [])
        return Derivation(6, r, tuple(kids), status=ev, side=tuple(side))

    def frontier(self, r: Term) -> Optional[Failure]:
        """The outermost failing subterm whose failure is not inherited from a child."""
        fail = self.failures.get(r)
        while fail is not None and fail.child is not None:
            nxt = self.failures.get(fail.child)
            if nxt is None:
                break
            fail = nxt
        return fail


def in_closure(symbol: str, lhs_args, r: Term, sig: Signature) -> Optional[Derivation]:
    return ClosureSearch(symbol, lhs_args, sig).prove(r)


# -- rule and system verdicts ---------------------------------------------------------

@dataclass
class RuleVerdict:
    rule: Rule
    index: int
    accepted: bool
    derivation: Optional[Derivation] = None
    variables: dict = field(default_factory=dict)    # free var of rhs -> AccStep
    conditions: list = field(default_factory=list)   # derivations for condition terms
    diagnosis: Optional[str] = None

    def derivations(self) -> list:
        out = [self.derivation] if self.derivation else []
        return out + [d for d in self.conditions if d is not None]

    def to_dict(self, explain: bool = False) -> dict:
        data = {"index": self.index, "rule": str(self.rule), "accepted": self.accepted}
        if self.diagnosis:
            data["diagnosis"] = self.diagnosis
        if explain and self.derivation is not None:
            data["derivation"] = self.derivation.render()
            data["variables"] = {x.name: str(s) for x, s in self.variables.items()}
        return data


def check_rule_schema(rule: Rule, sig: Signature, index: int = 0) -> RuleVerdict:
    """Does ``rule`` follow the General Schema?"""
    search = ClosureSearch(rule.head, rule.args, sig)
    verdict = RuleVerdict(rule, index, False)
    problems = []
    for x in sorted(rule.rhs.free_vars, key=lambda v: v.name):
        step = search.acc.get(x)
        if step is None:
            problems.append(f"variable {x.name} is not accessible in the left-hand side")
        else:
            verdict.variables[x] = step
    d = search.prove(rule.rhs)
    verdict.derivation = d
    if d is None:
        fail = search.frontier(rule.rhs)
        problems.append("right-hand side not in the computable closure"
                        + (f"; frontier {fail}" if fail else ""))
    for u, v in rule.condition:
        for t in (u, v):
            dt = search.prove(t)
            verdict.conditions.append(dt)
            if dt is None:
                problems.append(f"condition term {show(t)} not in the computable closure")
    verdict.accepted = not problems
    verdict.diagnosis = "; ".join(problems) or None
    return verdict


@dataclass
class SchemaReport:
    validation: ValidationReport
    verdicts: list

    @property
    def accepted_rules(self) -> list:
        return [v for v in self.verdicts if v.accepted]

    @property
    def rejected_rules(self) -> list:
        return [v for v in self.verdicts if not v.accepted]

    @property
    def assumptions_hold(self) -> bool:
        return self.validation.clean

    @property
    def constructor_rules(self) -> list:
        return [v for v in self.verdicts if v.rule.lhs.symbol.constructor]

    @property
    def schema_accepted(self) -> bool:
        """Both assumptions hold and every rule follows the schema."""
        return self.assumptions_hold and not self.rejected_rules

    @property
    def sn_guaranteed(self) -> bool:
        """The termination theorem applies: no constructor-headed rules either."""
        return self.schema_accepted and not self.constructor_rules

    @property
    def warnings(self) -> list:
        out = []
        if self.constructor_rules:
            heads = sorted({v.rule.head for v in self.constructor_rules})
            out.append("termination is not claimed for rules headed by constructors "
                       f"({', '.join(heads)})")
        return out

    def verdict_line(self) -> str:
        if self.sn_guaranteed:
            return "SN guaranteed"
        if self.schema_accepted:
            return "all rules follow the schema; SN not claimed (constructor-headed rules)"
        culprits = [str(v.index) for v in self.rejected_rules]
        why = []
        if not self.assumptions_hold:
            why.append("assumptions fail")
        if culprits:
            why.append("rejected rules: " + ", ".join(culprits))
        return "SN not guaranteed (" + "; ".join(why) + ")"

    def to_dict(self, explain: bool = False) -> dict:
        return {
            "assumption_1": not self.validation.positivity_errors,
            "assumption_2": not self.validation.errors,
            "validation": self.validation.lines(),
            "rules": [v.to_dict(explain) for v in self.verdicts],
            "accepted": len(self.accepted_rules),
            "total": len(self.verdicts),
            "schema_accepted": self.schema_accepted,
            "sn_guaranteed": self.sn_guaranteed,
            "warnings": self.warnings,
        }


def check_system(rs: RuleSystem) -> SchemaReport:
    report = validate(rs.signature)
    verdicts = [check_rule_schema(r, rs.signature, k) for k, r in enumerate(rs.rules, 1)]
    return SchemaReport(report, verdicts)
