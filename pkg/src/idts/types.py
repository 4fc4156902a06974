"""Simple types over a set of inductive type names, with polarity analysis."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

TypePosition = tuple  # sequence over {1, 2}; () is the root


@dataclass(frozen=True)
class Ind:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow:
    domain: "Type"
    codomain: "Type"

    def __str__(self) -> str:
        dom = str(self.domain)
        if isinstance(self.domain, Arrow):
            dom = f"({dom})"
        return f"{dom} -> {self.codomain}"


Type = Union[Ind, Arrow]


def arrow(*types: Type) -> Type:
    """Right-associated arrow: ``arrow(a, b, c)`` is ``a -> (b -> c)``."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def split_arrow(t: Type) -> tuple[tuple[Type, ...], Ind]:
    """Decompose ``s1 -> ... -> sn -> i`` into ``((s1, ..., sn), i)``."""
    args = []
    while isinstance(t, Arrow):
        args.append(t.domain)
        t = t.codomain
    return tuple(args), t


def type_at(t: Type, pos: TypePosition) -> Type:
    for step in pos:
        if not isinstance(t, Arrow) or step not in (1, 2):
            raise ValueError(f"invalid type position {pos!r} in {t}")
        t = t.domain if step == 1 else t.codomain
    return t


def occurrences(t: Type) -> Iterator[tuple[TypePosition, str]]:
    """All (position, name) pairs of inductive leaves in ``t``."""
    if isinstance(t, Ind):
        yield (), t.name
        return
    for pos, name in occurrences(t.domain):
        yield (1,) + pos, name
    for pos, name in occurrences(t.codomain):
        yield (2,) + pos, name


def inductive_names(t: Type) -> frozenset[str]:
    return frozenset(name for _, name in occurrences(t))


def positive_positions(t: Type) -> frozenset[TypePosition]:
    if isinstance(t, Ind):
        return frozenset({()})
    return frozenset(
        {(1,) + p for p in negative_positions(t.domain)}
        | {(2,) + p for p in positive_positions(t.codomain)}
    )


def negative_positions(t: Type) -> frozenset[TypePosition]:
    if isinstance(t, Ind):
        return frozenset()
    return frozenset(
        {(1,) + p for p in positive_positions(t.domain)}
        | {(2,) + p for p in negative_positions(t.codomain)}
    )


@lru_cache(maxsize=4096)
def occurs_positively(name: str, t: Type) -> bool:
    positions = [pos for pos, n in occurrences(t) if n == name]
    if not positions:
        return False
    pos_plus = positive_positions(t)
    return all(p in pos_plus for p in positions)


def occurs_strictly_positively(name: str, t: Type) -> bool:
    args, target = split_arrow(t)
    if target.name != name:
        return False
    return all(name not in inductive_names(a) for a in args)


def type_size(t: Type) -> int:
    if isinstance(t, Ind):
        return 1
    return 1 + type_size(t.domain) + type_size(t.codomain)
