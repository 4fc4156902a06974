import pytest
from hypothesis import given, settings, strategies as st

from idts.errors import PositionError, TermTypeError
from idts.terms import (Abs, App, FunApp, Symbol, Var, alpha_equal, free_vars, lam,
                        replace_at, subterm_at, substitute)
from idts.types import Arrow, Ind

nat = Ind("nat")
z = Symbol("z", (), nat, constructor=True)
s = Symbol("s", (nat,), nat, constructor=True)
plus = Symbol("plus", (nat, nat), nat)
ZERO = FunApp(z, ())


def S(t):
    return FunApp(s, (t,))


x, y, w = Var("x", nat), Var("y", nat), Var("w", nat)
F = Var("F", Arrow(nat, nat))


def test_typing_is_read_back():
    assert lam(x, S(x)).type == Arrow(nat, nat)
    assert App(lam(x, S(x)), ZERO).type == nat


def test_ill_typed_application_is_refused():
    with pytest.raises(TermTypeError):
        App(ZERO, ZERO)
    with pytest.raises(TermTypeError):
        FunApp(s, (ZERO, ZERO))
    with pytest.raises(TermTypeError):
        FunApp(s, (lam(x, x),))


def test_alpha_equality():
    assert alpha_equal(lam(x, x), lam(y, y))
    assert not alpha_equal(lam(x, y), lam(y, y))
    assert hash(lam(x, S(x))) == hash(lam(y, S(y)))


def test_substitution_without_capture():
    u = lam(x, App(F, x))
    z_ = Var("z", nat)
    got = substitute(u, {F: lam(z_, S(z_))})
    assert got == lam(x, App(lam(z_, S(z_)), x))


def test_substitution_renames_to_avoid_capture():
    got = substitute(lam(x, y), {y: x})
    assert isinstance(got, Abs) and got.var != x
    assert got.body == x
    assert free_vars(got) == {x}


def test_positions():
    u = FunApp(plus, (S(x), lam(y, y).body))
    assert subterm_at(u, (1, 1)) == x
    assert replace_at(u, (1, 1), ZERO) == FunApp(plus, (S(ZERO), y))
    with pytest.raises(PositionError):
        subterm_at(u, (3,))
    with pytest.raises(TermTypeError):
        replace_at(u, (1,), lam(x, x))


# -- random terms -------------------------------------------------------------------

VARS = [x, y, w]


@st.composite
def nat_terms(draw, depth=4, bound=()):
    choices = ["zero", "var", "s", "plus"] + (["beta"] if depth > 1 else [])
    kind = draw(st.sampled_from(choices if depth > 0 else ["zero", "var"]))
    if kind == "zero":
        return ZERO
    if kind == "var":
        return draw(st.sampled_from(VARS + list(bound)))
    if kind == "s":
        return S(draw(nat_terms(depth - 1, bound)))
    if kind == "plus":
        return FunApp(plus, (draw(nat_terms(depth - 1, bound)), draw(nat_terms(depth - 1, bound))))
    b = draw(st.sampled_from([Var("b", nat), Var("x", nat)]))
    body = draw(nat_terms(depth - 1, bound + (b,)))
    return App(Abs(b, body), draw(nat_terms(depth - 1, bound)))


@given(nat_terms())
def test_identity_substitution(u):
    assert substitute(u, {}) == u
    assert substitute(u, {x: x}) == u


@given(nat_terms(), nat_terms(), nat_terms())
@settings(max_examples=200)
def test_substitution_composition(u, v, t):
    # (u{x->v}){y->t} = u{x -> v{y->t}, y->t} when x is not free in t
    if x in t.free_vars:
        return
    lhs = substitute(substitute(u, {x: v}), {y: t})
    rhs = substitute(u, {x: substitute(v, {y: t}), y: t})
    assert lhs == rhs


@given(nat_terms(), nat_terms())
def test_substitution_preserves_type_and_bounds_free_variables(u, v):
    got = substitute(u, {x: v})
    assert got.type == u.type
    expected = (u.free_vars - {x}) | (v.free_vars if x in u.free_vars else set())
    assert got.free_vars <= expected
