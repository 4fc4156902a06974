import random

import pytest
from hypothesis import given, settings, strategies as st

from idts.corpus import TermSpace
from idts.errors import ParseError
from idts.signature import Status
from idts.syntax import parse, parse_term, print_spec, tokenize
from idts.terms import App, FunApp
from idts.types import Arrow, Ind

from oracles import fixture_path

FIXTURES = ["types", "ack", "append_map", "bad_positivity", "bin", "differentiation",
            "division", "foldl_sum", "injection", "insert", "lim_pair", "miniscoping",
            "natrec", "nnf", "ord_addition", "ordrec", "prenex", "proc", "subtraction",
            "treerec"]

NAT_ORD = """
inductive nat = z : nat | s : nat -> nat .
inductive ord = oz : ord | os : ord -> ord | lim : (nat -> ord) -> ord .
"""


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip(name):
    spec = parse(fixture_path(name).read_text(encoding="utf-8"))
    text = print_spec(spec)
    again = parse(text)
    assert again.abstract() == spec.abstract()
    assert print_spec(again) == text


def test_nat_ord_block():
    spec = parse(NAT_ORD)
    sig = spec.sealed_signature()
    assert sig.constructors_of("ord")[2].arg_types == (Arrow(Ind("nat"), Ind("ord")),)


def test_addition_rule():
    spec = parse(NAT_ORD + "symbol plus : nat -> nat -> nat arity 2 .\n"
                 "rule plus(X, s(Y)) --> s(plus(X, Y)) .")
    (rule,) = spec.rules
    assert str(rule) == "plus(X, s(Y)) --> s(plus(X, Y))"
    assert {x.name: x.type for x in rule.lhs.free_vars} == {"X": Ind("nat"), "Y": Ind("nat")}


def test_status_and_precedence():
    spec = parse(NAT_ORD + "symbol f : nat -> nat -> nat arity 2 status lex(mul 2, mul 1) .\n"
                 "symbol g : nat -> nat arity 1 .\nprecedence f > g .\n"
                 "symbol h : nat -> nat arity 1 .\nprecedence g ~ h .")
    assert spec.functions[0].status == Status(((2,), (1,)))
    assert spec.strict == [("f", "g")] and spec.equivalent == [("g", "h")]


def test_unterminated_statement():
    with pytest.raises(ParseError) as info:
        parse("inductive nat = z : nat | s : nat -> nat\nsymbol f : nat -> nat arity 1 .")
    assert (info.value.line, info.value.column) == (2, 1)
    assert str(info.value).startswith("2:1:")


def test_comments_and_positions():
    toks = tokenize("# a comment\n  rule")
    assert (toks[0].line, toks[0].col, toks[0].text) == (2, 3, "rule")


@pytest.mark.parametrize("text,fragment", [
    ("inductive nat = z : nat | s : nat -> nut .", "undeclared inductive type nut"),
    ("inductive nat = z : nat | z : nat .", "declared twice"),
    ("inductive nat = bot_z : nat .", "reserved prefix"),
    ("inductive nat = z : nat .\nterm t = s(z) .", "s"),
    ("inductive nat = z : nat | s : nat -> nat .\nterm t = s(z, z) .", ""),
    ("inductive nat = z : nat .\nrule z --> z extra .", ""),
])
def test_bad_input(text, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert fragment in str(info.value)


def test_type_mismatch_in_rule():
    with pytest.raises(ParseError):
        parse(NAT_ORD + "symbol f : nat -> nat arity 1 .\nrule f(X) --> oz .")


def test_lowercase_variable_warning():
    spec = parse(NAT_ORD + "symbol f : nat -> nat arity 1 .\nrule f(x) --> x .")
    assert spec.warnings and "lowercase rule variable x" in spec.warnings[0]


def test_call_syntax_needs_adjacent_parenthesis():
    spec = parse(NAT_ORD + "symbol k : nat -> (nat -> nat) -> nat arity 1 .")
    sig = spec.sealed_signature()
    u = parse_term(r"k(z) (\n:nat. n)", sig)
    assert isinstance(u, App) and isinstance(u.fun, FunApp)
    with pytest.raises(ParseError):
        parse_term(r"k (z)", sig)          # juxtaposition: k needs its argument


def test_named_terms(load_fixture):
    spec = load_fixture("ack")
    assert str(spec.terms["ack22"]) == "ack(s(s(z)), s(s(z)))"


# -- random closed terms print and re-parse to themselves ----------------------------

@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["ord_addition", "treerec", "proc", "differentiation", "foldl_sum"]),
       st.integers(0, 2**32))
def test_term_round_trip(load_fixture, name, seed):
    sig = load_fixture(name).sealed_signature()
    space = TermSpace(sig, free_vars=False)
    u = space.random_term(random.Random(seed), 9)
    assert parse_term(str(u), sig) == u
