import random

import pytest
from hypothesis import given, settings, strategies as st

from idts.corpus import TermSpace
from idts.errors import TermTypeError
from idts.rewriting import Rule
from idts.schema import (acc_vector, accessible, check_rule_schema, check_system,
                         greater_arg, in_closure)
from idts.syntax import parse_term
from idts.terms import Abs, App, FunApp, Var, subterms
from idts.types import Arrow, Ind

NAT, ORD, LIST = Ind("nat"), Ind("ord"), Ind("listnat")

ACCEPTED = ["ack", "append_map", "bin", "differentiation", "foldl_sum", "injection",
            "insert", "lim_pair", "miniscoping", "natrec", "nnf", "ord_addition",
            "ordrec", "prenex", "proc", "subtraction", "treerec"]
CONSTRUCTOR_RULES = {"differentiation", "miniscoping", "nnf", "prenex", "proc"}


def _term(sig, text):
    return parse_term(text, sig)


def _chains(found):
    return {str(t): step.chain() for t, step in found.items()}


def test_acc_constructor_argument(types_sig):
    found = _chains(accessible(_term(types_sig, "cons(X, L)"), types_sig))
    assert found["L"] == [1, 3]
    assert found["X"] == [1, 3]


def test_acc_basic_subterms(load_fixture):
    sig = load_fixture("foldl_sum").sealed_signature()
    found = accessible(_term(sig, "plus(X, Y)"), sig)
    assert {str(t) for t, s in found.items() if s.clause == 5} >= {"X", "Y"}


def test_acc_through_abstraction(load_fixture):
    sig = load_fixture("differentiation").sealed_signature()
    found = _chains(accessible(_term(sig, r"\x:R. sin(F x)"), sig))
    assert found["F"] == [1, 2, 3, 4]


def test_acc_nonbasic_has_no_clause_five(types_sig):
    found = accessible(_term(types_sig, "lim(F)"), types_sig)
    assert all(step.clause != 5 for step in found.values())
    assert _chains(found)["F"] == [1, 3]


def test_acc_vector_for_append(load_fixture):
    sig = load_fixture("append_map").sealed_signature()
    lvar = Var("L", LIST)
    found = acc_vector([_term(sig, "nil"), lvar], sig)
    assert found[lvar].arg == 2 and found[lvar].chain() == [1]


def test_greater_arg_limit(types_sig):
    f, n, x = Var("F", Arrow(NAT, ORD)), Var("N", NAT), Var("X", NAT)
    lim = types_sig.symbol("lim")
    assert greater_arg(FunApp(lim, (f,)), App(f, n), types_sig)
    sx = _term(types_sig, "s(X)")
    assert greater_arg(_term(types_sig, "s(s(X))"), x, types_sig)
    assert greater_arg(_term(types_sig, "s(s(X))"), sx, types_sig)
    assert not greater_arg(sx, sx, types_sig)


def test_greater_arg_functional_branch(types_sig):
    u = _term(types_sig, r"\x:nat. s(x)")
    with pytest.raises(TermTypeError):
        greater_arg(u, u.body, types_sig)      # nat->nat against nat
    x, y = Var("x", NAT), Var("y", NAT)
    fun = Arrow(NAT, NAT)
    inner = Abs(y, _term(types_sig, "s(x)"))   # \y. s(x), x free
    closed = App(Abs(x, inner), _term(types_sig, "z"))
    assert not greater_arg(closed, inner, types_sig)   # FV(v) not in FV(u)
    f = Var("F", Arrow(fun, fun))
    succ = Abs(y, FunApp(types_sig.symbol("s"), (y,)))
    assert greater_arg(App(f, succ), succ, types_sig)


def test_greater_arg_function_headed(load_fixture):
    sig = load_fixture("append_map").sealed_signature()
    assert greater_arg(_term(sig, "append(L, L2)"), Var("L", LIST), sig)


def test_greater_arg_type_mismatch(types_sig):
    with pytest.raises(TermTypeError):
        greater_arg(_term(types_sig, "s(z)"), _term(types_sig, "nil"), types_sig)


def test_map_derivation(load_fixture):
    rs = load_fixture("append_map").rule_system()
    v = check_rule_schema(rs.rules[4], rs.signature)
    assert v.accepted
    text = v.derivation.render()
    assert text.startswith("CC5[cons]")
    assert "CC6[map]" in text and "CC3(" in text


def test_ordinal_addition_derivation(load_fixture):
    rs = load_fixture("ord_addition").rule_system()
    v = check_rule_schema(rs.rules[2], rs.signature)
    assert v.accepted
    clauses = {d.clause for d in v.derivation.nodes()}
    assert {4, 5, 6} <= clauses


def test_append_call(load_fixture):
    rs = load_fixture("append_map").rule_system()
    d = in_closure("append", rs.rules[1].args, _term(rs.signature, "append(L, L2)"),
                   rs.signature)
    assert d is not None and d.clause == 6


@pytest.mark.parametrize("name", ACCEPTED)
def test_fixture_accepted(load_fixture, name):
    rs = load_fixture(name).rule_system()
    if name == "insert":
        from idts.transforms import encode_system
        rs = encode_system(rs)
    report = check_system(rs)
    assert [v.accepted for v in report.verdicts] == [True] * len(rs.rules), \
        [v.diagnosis for v in report.rejected_rules]
    assert report.schema_accepted
    assert report.sn_guaranteed == (name not in CONSTRUCTOR_RULES)


def test_division_rejected(load_fixture):
    rs = load_fixture("division").rule_system()
    report = check_system(rs)
    assert [v.accepted for v in report.verdicts] == [True] * 5 + [False]
    assert not report.sn_guaranteed
    assert "rejected rules: 6" in report.verdict_line()
    assert "computable closure" in report.rejected_rules[0].diagnosis


def test_inaccessible_variable(load_fixture):
    rs = load_fixture("ord_addition").rule_system()
    sig = rs.signature
    # a non-basic argument gives no access to variables below a defined symbol
    lhs = _term(sig, "add(add(X, Y), oz)")
    rule = Rule(lhs, Var("X", ORD))
    v = check_rule_schema(rule, sig)
    assert not v.accepted
    assert "not accessible" in v.diagnosis


def test_report_dict(load_fixture):
    report = check_system(load_fixture("ack").rule_system())
    data = report.to_dict(explain=True)
    assert data["accepted"] == data["total"] == 3
    assert data["sn_guaranteed"] is True
    assert all("derivation" in r for r in data["rules"])


# -- random terms ----------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["append_map", "ord_addition", "treerec", "natrec"]),
       st.integers(0, 2**32))
def test_greater_arg_irreflexive_and_transitive(load_fixture, name, seed):
    sig = load_fixture(name).sealed_signature()
    space = TermSpace(sig)
    rng = random.Random(seed)
    u = space.random_term(rng, 7)
    assert not greater_arg(u, u, sig)
    if isinstance(u.type, Ind):
        return      # transitivity is only claimed on the subterm branch
    smaller = [t for p, t in subterms(u) if p and t.type == u.type and greater_arg(u, t, sig)]
    for v in smaller:
        for p, w in subterms(v):
            if p and w.type == v.type and greater_arg(v, w, sig):
                assert greater_arg(u, w, sig)
