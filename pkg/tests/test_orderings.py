import operator
from collections import Counter

from hypothesis import given, settings, strategies as st

from idts.orderings import (lex_greater, multiset_difference, multiset_greater,
                            status_compare, status_greater)
from idts.signature import Status

from oracles import lex_reference, multiset_bruteforce, multiset_reference, status_reference

GT = operator.gt
small = st.integers(0, 5)


@st.composite
def statuses(draw, max_arity=5):
    n = draw(st.integers(1, max_arity))
    idx = draw(st.permutations(range(1, n + 1)))
    cuts = sorted(draw(st.sets(st.integers(1, n - 1), max_size=n - 1))) if n > 1 else []
    groups, start = [], 0
    for c in cuts + [n]:
        groups.append(tuple(idx[start:c]))
        start = c
    return Status(tuple(groups))


@settings(max_examples=300, deadline=None)
@given(st.lists(small, max_size=5), st.lists(small, max_size=5))
def test_multiset_matches_both_references(ms, ns):
    expected = multiset_reference(ms, ns, GT)
    assert multiset_bruteforce(ms, ns, GT) == expected
    assert multiset_greater(ms, ns, GT) == expected


@settings(max_examples=200, deadline=None)
@given(st.lists(small, max_size=6), st.lists(small, max_size=6))
def test_multiset_difference_removes_common(ms, ns):
    left, right = multiset_difference(ms, ns)
    assert Counter(left) == Counter(ms) - Counter(ns)
    assert Counter(right) == Counter(ns) - Counter(ms)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_status_matches_reference(data):
    stat = data.draw(statuses())
    n = stat.arity
    us = data.draw(st.lists(small, min_size=n, max_size=n))
    vs = data.draw(st.lists(small, min_size=n, max_size=n))
    assert status_greater(stat, GT, us, vs) == status_reference(stat.groups, us, vs, GT)


@settings(max_examples=100, deadline=None)
@given(st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_pure_lex(us, vs):
    assert lex_greater(us, vs, GT) == lex_reference(us, vs, GT)
    assert status_greater(Status.lexicographic(3), GT, us, vs) == lex_reference(us, vs, GT)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_status_is_irreflexive(data):
    stat = data.draw(statuses())
    us = data.draw(st.lists(small, min_size=stat.arity, max_size=stat.arity))
    assert not status_greater(stat, GT, us, us)


def test_lex_of_multisets_example():
    stat = Status(((3,), (2, 4)))
    # third argument decreases
    assert status_greater(stat, GT, [0, 0, 2, 0], [9, 9, 1, 9])
    # third equal, {u2, u4} > {v2, v4}
    assert status_greater(stat, GT, [0, 3, 1, 1], [0, 2, 1, 2])
    assert not status_greater(stat, GT, [0, 3, 1, 1], [0, 3, 1, 2])


def test_ackermann_call():
    stat = Status(((1,), (2,)))
    assert status_greater(stat, GT, [1, 1], [1, 0])
    assert status_greater(stat, GT, [1, 1], [0, 99])


def test_status_evidence_names_the_group():
    stat = Status(((1,), (2,)))
    ev = status_compare(stat, [1, 1], [1, 0], lambda x, y: x > y or None)
    assert str(ev) == "lex(mul 1, mul 2): eq, mul-dec"
