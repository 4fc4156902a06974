"""Multiset and status extensions of an arbitrary strict ordering."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .signature import Status


def multiset_difference(left: Sequence, right: Sequence) -> tuple[list, list]:
    """Remove the largest common sub-multiset; return the two remainders."""
    common = Counter(left) & Counter(right)
    rest_left, rest_right = [], []
    budget = Counter(common)
    for x in left:
        if budget[x]:
            budget[x] -= 1
        else:
            rest_left.append(x)
    budget = Counter(common)
    for y in right:
        if budget[y]:
            budget[y] -= 1
        else:
            rest_right.append(y)
    return rest_left, rest_right


def multiset_greater(left: Sequence, right: Sequence, gt: Callable) -> bool:
    rest_left, rest_right = multiset_difference(left, right)
    if not rest_left:
        return False
    return all(any(gt(x, y) for x in rest_left) for y in rest_right)


def lex_greater(left: Sequence, right: Sequence, gt: Callable) -> bool:
    for x, y in zip(left, right):
        if x == y:
            continue
        return gt(x, y)
    return False


@dataclass
class GroupEvidence:
    group: tuple
    verdict: str                       # 'eq' or 'mul-dec'
    dominations: list = field(default_factory=list)  # (right idx, left idx, witness)

    def __str__(self) -> str:
        return self.verdict


@dataclass
class StatusEvidence:
    status: Status
    groups: list

    def __str__(self) -> str:
        return f"{self.status}: " + ", ".join(str(g) for g in self.groups)


def status_compare(stat: Status, us: Sequence, vs: Sequence,
                   witness: Callable) -> Optional[StatusEvidence]:
    """Decide ``us >stat vs``.

    ``witness(u, v)`` returns some evidence object (anything truthy) when
    ``u > v`` in the base ordering, else ``None``.  On success the returned
    evidence lists, group by group, how the comparison was settled.
    """
    n = stat.arity
    if len(us) < n or len(vs) < n:
        raise ValueError(f"status {stat} needs at least {n} arguments")
    groups = []
    for group in stat.groups:
        left = [us[i - 1] for i in group]
        right = [vs[i - 1] for i in group]
        if Counter(left) == Counter(right):
            groups.append(GroupEvidence(group, "eq"))
            continue
        rest_left, rest_right = multiset_difference(left, right)
        if not rest_left:
            return None
        left_idx = _indices(group, left, rest_left)
        right_idx = _indices(group, right, rest_right)
        doms = []
        for j, y in zip(right_idx, rest_right):
            for i, x in zip(left_idx, rest_left):
                w = witness(x, y)
                if w is not None:
                    doms.append((j, i, w))
                    break
            else:
                return None
        groups.append(GroupEvidence(group, "mul-dec", doms))
        return StatusEvidence(stat, groups)
    return None


def _indices(group, elems, rest):
    """Argument indices of the elements that survived common-part removal.

    Removal consumes the first occurrences, so survivors are matched from the right.
    """
    out = []
    remaining = Counter(rest)
    for i, e in reversed(list(zip(group, elems))):
        if remaining[e]:
            remaining[e] -= 1
            out.append(i)
    out.reverse()
    return out


def status_greater(stat: Status, gt: Callable, us: Sequence, vs: Sequence) -> bool:
    return status_compare(stat, us, vs, lambda x, y: True if gt(x, y) else None) is not None
