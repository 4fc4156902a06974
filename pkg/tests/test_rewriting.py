import random

import pytest
from hypothesis import given, settings, strategies as st

from idts.corpus import TermSpace
from idts.errors import FuelExhausted, NotARedex, RuleError
from idts.rewriting import (Rule, RuleSystem, beta_step, eta_step, match, normal_form,
                            normalize, rewrite_candidates, root_reducts,
                            subject_reduction_probe)
from idts.syntax import parse_term
from idts.terms import Var, alpha_equal, app, lam, substitute
from idts.types import Ind, arrow

from oracles import ackermann


def numeral(n):
    return "z" if n == 0 else f"s({numeral(n - 1)})"


@pytest.fixture(scope="module")
def ack(load_fixture):
    return load_fixture("ack").rule_system()


@pytest.fixture(scope="module")
def lists(load_fixture):
    return load_fixture("append_map").rule_system()


def test_match_over_a_function_symbol(lists):
    sig = lists.signature
    nat_list = Ind("listnat")
    pattern = lists.rules[2].lhs          # append(append(L, L2), L3)
    subject = parse_term("append(append(nil, nil), nil)", sig)
    theta = match(pattern, subject)
    assert theta is not None
    assert {x.name: str(v) for x, v in theta.items()} == {"L": "nil", "L2": "nil", "L3": "nil"}
    assert all(x.type == nat_list for x in theta)


def test_match_fails_on_clash(lists):
    pattern = lists.rules[0].lhs          # append(nil, L)
    assert match(pattern, parse_term("append(cons(z, nil), nil)", lists.signature)) is None


def test_ordinal_limit_step(load_fixture):
    rs = load_fixture("ord_addition").rule_system()
    sig = rs.signature
    u = parse_term(r"add(oz, lim(\n:nat. lim(\m:nat. oz)))", sig)
    out = root_reducts(rs, u)
    assert len(out) == 1
    expected = parse_term(r"lim(\k:nat. add(oz, (\n:nat. lim(\m:nat. oz)) k))", sig)
    assert alpha_equal(out[0], expected)


def test_division_step(load_fixture):
    rs = load_fixture("division").rule_system()
    sig = rs.signature
    u = parse_term("div(s(s(z)), s(z))", sig)
    expected = parse_term("s(div(minus(s(z), z), s(z)))", sig)
    assert expected in root_reducts(rs, u)


@pytest.mark.parametrize("m,n", [(0, 0), (1, 2), (2, 2), (2, 3), (3, 2)])
def test_ackermann(ack, m, n):
    u = parse_term(f"ack({numeral(m)}, {numeral(n)})", ack.signature)
    for strategy in ("outermost", "innermost"):
        nf = normal_form(ack, u, 100_000, strategy)
        assert str(nf) == numeral(ackermann(m, n))


def test_map_successor(lists):
    u = parse_term(r"map(\x:nat. s(x), cons(z, nil))", lists.signature)
    assert str(normal_form(lists, u)) == "cons(s(z), nil)"


def test_trace_replays(lists):
    u = parse_term(
        r"map(\x:nat. s(x), append(cons(z, nil), cons(s(z), nil)))", lists.signature)
    res = normalize(lists, u)
    assert res.trace.replay(lists)
    assert res.trace.lines()[0].startswith("step 1: ")
    assert "⇒" in res.trace.lines()[0]
    assert res.trace.to_dict()["steps"][-1]["term"] == str(res.normal_form)


def test_fuel_exhaustion_keeps_partial_trace(ack):
    u = parse_term(f"ack({numeral(3)}, {numeral(3)})", ack.signature)
    with pytest.raises(FuelExhausted) as info:
        normalize(ack, u, fuel=10)
    assert len(info.value.trace) == 10
    assert info.value.last is not None


def test_candidates_are_leftmost_outermost(ack):
    u = parse_term("ack(ack(z, z), ack(z, z))", ack.signature)
    cands = rewrite_candidates(ack, u)
    assert [c.position for c in cands] == [(1,), (2,)]


def test_beta_and_eta(lists):
    sig = lists.signature
    assert str(beta_step(parse_term(r"(\x:nat. s(x)) z", sig))) == "s(z)"
    with pytest.raises(NotARedex):
        beta_step(parse_term("s(z)", sig))
    with pytest.raises(NotARedex):
        eta_step(parse_term(r"\x:nat. s(x)", sig))


def test_eta_in_context(load_fixture):
    rs = load_fixture("natrec").rule_system()
    u = parse_term(r"natrec(z, \n:nat. \r:nat. s(r), s(z))", rs.signature)
    assert str(normal_form(rs, u)) == "s(z)"
    nat = Ind("nat")
    y, n, r = Var("Y", arrow(nat, nat, nat)), Var("n", nat), Var("r", nat)
    u = lam([n, r], app(y, n, r))
    assert eta_step(u, (1,)) == lam([n], app(y, n))
    assert eta_step(eta_step(u, (1,))) == y


def test_rule_variable_check(lists):
    sig = lists.signature
    lhs = parse_term("append(nil, L)", sig)
    rhs = parse_term("append(L, M)", sig)
    with pytest.raises(RuleError):
        RuleSystem(sig, [Rule(lhs, rhs)])


def test_conditional_rules(load_fixture):
    rs = load_fixture("insert").rule_system()
    spec = load_fixture("insert")
    nf = normal_form(rs, spec.terms["ins"])
    assert str(nf) == "cons(z, cons(s(z), cons(s(s(z)), cons(s(s(s(z))), nil))))"


def test_subject_reduction_probe(ack):
    u = parse_term("ack(s(z), s(z))", ack.signature)
    res = subject_reduction_probe(ack, u, 3)
    assert res.ok and res.explored > 0


# -- matching on random instances -------------------------------------------------

FIXTURES = ["ack", "append_map", "ord_addition", "natrec", "treerec", "foldl_sum"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FIXTURES), st.integers(0, 2**32))
def test_match_sound_and_complete(load_fixture, name, seed):
    rs = load_fixture(name).rule_system()
    rng = random.Random(seed)
    space = TermSpace(rs.signature)
    rule = rng.choice(rs.rules)
    theta0 = {}
    for x in rule.lhs.free_vars:
        cands = [t for n in range(1, 5) for t in space.terms(x.type, n)]
        theta0[x] = rng.choice(cands)
    subject = substitute(rule.lhs, theta0)
    theta = match(rule.lhs, subject)
    assert theta is not None                       # complete on linear patterns
    assert alpha_equal(substitute(rule.lhs, theta), subject)   # sound
