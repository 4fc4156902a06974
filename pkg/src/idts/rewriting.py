"""Rewrite rules, syntactic matching modulo alpha, beta/eta and normalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import FuelExhausted, NotARedex, RuleError
from .signature import ALLOW_CONSTRUCTOR_RULES, Signature
from .terms import (Abs, App, FunApp, Position, Term, Var, replace_at, show,
                    subterm_at, substitute)

DEFAULT_FUEL = 10_000
CONDITION_FUEL = 1_000
CONDITION_DEPTH = 8
STRATEGIES = ("outermost", "innermost")


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    condition: tuple = ()   # pairs (u, v) that must have a common reduct

    def __post_init__(self):
        object.__setattr__(self, "condition",
                           tuple((u, v) for u, v in self.condition))

    @property
    def head(self) -> str:
        return self.lhs.symbol.name

    @property
    def args(self) -> tuple:
        return self.lhs.args

    @property
    def is_conditional(self) -> bool:
        return bool(self.condition)

    def __str__(self) -> str:
        text = f"{show(self.lhs)} --> {show(self.rhs)}"
        if self.condition:
            text += " if " + ", ".join(f"{show(u)} = {show(v)}" for u, v in self.condition)
        return text


def check_rule(rule: Rule, sig: Signature) -> None:
    """Raise :class:`RuleError` naming the first violated well-formedness condition."""
    lhs, rhs = rule.lhs, rule.rhs
    if not isinstance(lhs, FunApp):
        raise RuleError(1, f"left-hand side {show(lhs)} is not headed by a function symbol")
    if not sig.has_symbol(lhs.symbol.name) or sig.symbol(lhs.symbol.name) != lhs.symbol:
        raise RuleError(1, f"head {lhs.symbol.name} is not declared in the signature")
    if lhs.symbol.constructor and ALLOW_CONSTRUCTOR_RULES not in sig.flags:
        raise RuleError(1, f"head {lhs.symbol.name} is a constructor "
                           f"(enable option {ALLOW_CONSTRUCTOR_RULES})")
    extra = rhs.free_vars - lhs.free_vars
    if extra:
        names = ", ".join(sorted(x.name for x in extra))
        raise RuleError(2, f"right-hand side variables {names} do not occur in the left-hand side")
    if lhs.type != rhs.type:
        raise RuleError(3, f"left-hand side has type {lhs.type} but right-hand side has type {rhs.type}")
    for u, v in rule.condition:
        escaped = (u.free_vars | v.free_vars) - lhs.free_vars
        if escaped:
            names = ", ".join(sorted(x.name for x in escaped))
            raise RuleError("condition-variables",
                            f"condition variables {names} do not occur in the left-hand side")
        if u.type != v.type:
            raise RuleError("condition-types",
                            f"condition {show(u)} = {show(v)} compares {u.type} with {v.type}")


class RuleSystem:
    """A sealed signature with its rules, grouped by head symbol."""

    def __init__(self, signature: Signature, rules=(), *, check: bool = True):
        if not signature.sealed:
            raise ValueError("rule systems need a sealed signature")
        self.signature = signature
        self.rules = tuple(rules)
        if check:
            for r in self.rules:
                check_rule(r, signature)
        self.by_head = {}
        for k, r in enumerate(self.rules, 1):
            self.by_head.setdefault(r.head, []).append((k, r))

    def defining_rules(self, name: str) -> list:
        return [r for _, r in self.by_head.get(name, ())]

    def with_rules(self, rules, signature: Optional[Signature] = None) -> "RuleSystem":
        return RuleSystem(signature or self.signature, rules)


# -- matching -------------------------------------------------------------------

def match(pattern: Term, subject: Term) -> Optional[dict]:
    """Syntactic matching modulo alpha; repeated variables must agree."""
    theta = {}
    if _match(pattern, subject, {}, {}, 0, theta):
        return theta
    return None


def _match(p, s, pbound, sbound, depth, theta) -> bool:
    if p.type != s.type:
        return False
    if isinstance(p, Var):
        key = (p.name, p.type)
        if key in pbound:
            return isinstance(s, Var) and sbound.get((s.name, s.type)) == pbound[key]
        if sbound and any((x.name, x.type) in sbound for x in s.free_vars):
            return False
        prev = theta.get(p)
        if prev is None:
            theta[p] = s
            return True
        return prev == s
    if isinstance(p, Abs):
        if not isinstance(s, Abs):
            return False
        pb = dict(pbound)
        pb[(p.var.name, p.var.type)] = depth + 1
        sb = dict(sbound)
        sb[(s.var.name, s.var.type)] = depth + 1
        return _match(p.body, s.body, pb, sb, depth + 1, theta)
    if isinstance(p, App):
        return (isinstance(s, App)
                and _match(p.fun, s.fun, pbound, sbound, depth, theta)
                and _match(p.arg, s.arg, pbound, sbound, depth, theta))
    if not isinstance(s, FunApp) or s.symbol != p.symbol:
        return False
    return all(_match(a, b, pbound, sbound, depth, theta) for a, b in zip(p.args, s.args))


# -- beta / eta -------------------------------------------------------------------

def is_beta_redex(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fun, Abs)


def is_eta_redex(t: Term) -> bool:
    return (isinstance(t, Abs) and isinstance(t.body, App)
            and t.body.arg == t.var and t.var not in t.body.fun.free_vars)


def contract_beta(t: Term) -> Term:
    return substitute(t.fun.body, {t.fun.var: t.arg})


def beta_step(u: Term, p: Position = ()) -> Term:
    redex = subterm_at(u, p)
    if not is_beta_redex(redex):
        raise NotARedex(f"{show(redex)} is not a beta-redex")
    return replace_at(u, p, contract_beta(redex))


def eta_step(u: Term, p: Position = ()) -> Term:
    redex = subterm_at(u, p)
    if not is_eta_redex(redex):
        raise NotARedex(f"{show(redex)} is not an eta-redex")
    return replace_at(u, p, redex.body.fun)


# -- one-step reducts -------------------------------------------------------------

@dataclass
class Candidate:
    position: Position
    kind: str                     # 'beta', 'eta' or 'rule k'
    result: Optional[Term]        # whole term after the step
    contractum: Optional[Term] = None
    rule_index: Optional[int] = None
    error: Optional[str] = None   # e.g. condition fuel exhausted; step not taken

    @property
    def applicable(self) -> bool:
        return self.error is None


def _local_steps(rs: RuleSystem, t: Term, budget: "_CondBudget") -> Iterator[tuple]:
    """(kind, rule index, contractum, error) for redexes at the root of ``t``."""
    if isinstance(t, FunApp):
        for k, rule in rs.by_head.get(t.symbol.name, ()):
            theta = match(rule.lhs, t)
            if theta is None:
                continue
            if rule.condition:
                ok, err = _conditions_hold(rs, rule, theta, budget)
                if err:
                    yield f"rule {k}", k, None, err
                    continue
                if not ok:
                    continue
            yield f"rule {k}", k, substitute(rule.rhs, theta), None
    if is_beta_redex(t):
        yield "beta", None, contract_beta(t), None
    if is_eta_redex(t):
        yield "eta", None, t.body.fun, None


@dataclass
class _CondBudget:
    fuel: int = CONDITION_FUEL
    depth: int = 0
    max_depth: int = CONDITION_DEPTH


def root_reducts(rs: RuleSystem, t: Term) -> list:
    """Every contractum of an applicable redex at the root of ``t``."""
    return [c for _, _, c, err in _local_steps(rs, t, _CondBudget()) if err is None]


def root_step(rs: RuleSystem, t: Term) -> Optional[Term]:
    """The contractum of the first applicable redex at the root of ``t``, if any."""
    for _, _, contractum, err in _local_steps(rs, t, _CondBudget()):
        if err is None:
            return contractum
    return None


def _conditions_hold(rs, rule, theta, budget):
    if budget.depth >= budget.max_depth:
        return False, f"condition nesting exceeds depth {budget.max_depth}"
    inner = _CondBudget(budget.fuel, budget.depth + 1, budget.max_depth)
    for u, v in rule.condition:
        try:
            nu = _normalize(rs, substitute(u, theta), inner.fuel, "outermost", inner)[0]
            nv = _normalize(rs, substitute(v, theta), inner.fuel, "outermost", inner)[0]
        except FuelExhausted:
            return False, "condition fuel exhausted"
        if nu != nv:
            return False, None
    return True, None


def _walk(u: Term, order: str):
    """Positions/subterms in leftmost-outermost (pre) or leftmost-innermost (post) order."""
    stack = [((), u)]
    if order == "outermost":
        while stack:
            p, t = stack.pop()
            yield p, t
            kids = t.children()
            for i in range(len(kids), 0, -1):
                stack.append((p + (i,), kids[i - 1]))
    else:
        def post(p, t):
            for i, c in enumerate(t.children(), 1):
                yield from post(p + (i,), c)
            yield p, t
        yield from post((), u)


def iter_candidates(rs: RuleSystem, u: Term, order: str = "outermost",
                    budget: Optional[_CondBudget] = None,
                    local: Optional[dict] = None) -> Iterator[Candidate]:
    """Candidates position by position.  ``local`` optionally caches the root
    redexes of each subterm across calls (only with the default budget)."""
    budget = budget or _CondBudget()
    for p, t in _walk(u, order):
        if local is None:
            steps = _local_steps(rs, t, budget)
        else:
            steps = local.get(t)
            if steps is None:
                steps = local[t] = tuple(_local_steps(rs, t, budget))
        for kind, k, contractum, err in steps:
            if err is not None:
                yield Candidate(p, kind, None, None, k, err)
            else:
                yield Candidate(p, kind, replace_at(u, p, contractum), contractum, k)


def rewrite_candidates(rs: RuleSystem, u: Term) -> list:
    """Every one-step reduct under the rules and beta/eta, leftmost-outermost first."""
    return list(iter_candidates(rs, u, "outermost"))


# -- normalization ------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    position: Position
    kind: str
    term: Term


def format_position(p: Position) -> str:
    return ".".join(map(str, p)) if p else "ε"


@dataclass
class ReductionTrace:
    initial: Term
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def lines(self) -> list:
        return [f"step {n}: {s.kind} @ {format_position(s.position)} ⇒ {show(s.term)}"
                for n, s in enumerate(self.steps, 1)]

    def to_dict(self) -> dict:
        return {
            "initial": show(self.initial),
            "steps": [{"n": n, "kind": s.kind, "position": list(s.position),
                       "term": show(s.term)} for n, s in enumerate(self.steps, 1)],
        }

    def replay(self, rs: RuleSystem) -> bool:
        """Check that each step is a genuine one-step reduct of its predecessor."""
        current = self.initial
        for s in self.steps:
            t = subterm_at(current, s.position)
            local = [c for kind, _, c, err in _local_steps(rs, t, _CondBudget())
                     if kind == s.kind and err is None]
            if not any(replace_at(current, s.position, c) == s.term for c in local):
                return False
            current = s.term
        return True


@dataclass
class NormalizeResult:
    normal_form: Term
    trace: ReductionTrace

    @property
    def steps(self) -> int:
        return len(self.trace)


def _first_step(rs, u, strategy, budget):
    for c in iter_candidates(rs, u, strategy, budget):
        if c.applicable:
            return c
    return None


def _normalize(rs, u, fuel, strategy, budget, record=False):
    trace = ReductionTrace(u) if record else None
    current, used = u, 0
    while True:
        c = _first_step(rs, current, strategy, budget)
        if c is None:
            return current, trace, used
        if used >= fuel:
            raise FuelExhausted(f"fuel {fuel} exhausted", trace, current)
        used += 1
        current = c.result
        if record:
            trace.steps.append(Step(c.position, c.kind, current))


def normalize(rs: RuleSystem, u: Term, fuel: int = DEFAULT_FUEL,
              strategy: str = "outermost", *, condition_fuel: int = CONDITION_FUEL,
              sn_guaranteed: Optional[bool] = None) -> NormalizeResult:
    """Reduce ``u`` to normal form, taking the first step of ``strategy`` each time.

    Raises :class:`FuelExhausted` (carrying the partial trace) after ``fuel`` steps.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if fuel < 1:
        raise ValueError("fuel must be positive")
    try:
        nf, trace, _ = _normalize(rs, u, fuel, strategy, _CondBudget(condition_fuel), True)
    except FuelExhausted as exc:
        if sn_guaranteed:
            exc.args = (f"fuel {fuel} exhausted; the system is terminating, "
                        f"so a larger budget will reach the normal form",)
        elif sn_guaranteed is False:
            exc.args = (f"fuel {fuel} exhausted; termination is not guaranteed "
                        f"for this system",)
        raise
    return NormalizeResult(nf, trace)


def normal_form(rs: RuleSystem, u: Term, fuel: int = DEFAULT_FUEL,
                strategy: str = "outermost") -> Term:
    """Like :func:`normalize` but without recording a trace."""
    return _normalize(rs, u, fuel, strategy, _CondBudget())[0]


# -- subject reduction probe -------------------------------------------------------

@dataclass
class ProbeResult:
    ok: bool
    explored: int
    violation: Optional[str] = None


def subject_reduction_probe(rs: RuleSystem, u: Term, depth: int) -> ProbeResult:
    """Explore every reduct of ``u`` up to ``depth`` steps; all must keep ``u``'s type."""
    expected = u.type
    frontier, seen = [u], {u}
    explored = 0
    for level in range(depth):
        nxt = []
        for t in frontier:
            for p, sub in _walk(t, "outermost"):
                for kind, _, contractum, err in _local_steps(rs, sub, _CondBudget()):
                    if err is not None:
                        continue
                    explored += 1
                    if contractum.type != sub.type:
                        return ProbeResult(False, explored,
                                           f"{kind} @ {format_position(p)} in {show(t)}: "
                                           f"{show(sub)} : {sub.type} became "
                                           f"{show(contractum)} : {contractum.type}")
                    result = replace_at(t, p, contractum)
                    if result.type != expected:
                        return ProbeResult(False, explored,
                                           f"{kind} @ {format_position(p)} changed the type")
                    if result not in seen:
                        seen.add(result)
                        nxt.append(result)
        frontier = nxt
    return ProbeResult(True, explored)
