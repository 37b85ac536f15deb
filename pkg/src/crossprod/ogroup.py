"""The ordered group Z^k (lexicographic order) indexing the crossed product."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union


class DimensionMismatch(ValueError):
    pass


class NotInCone(ValueError):
    """Raised when an operation requires a positive group element."""


class Ordering(Enum):
    LT = -1
    EQ = 0
    GT = 1


@dataclass(frozen=True)
class GroupElement:
    """An element of Z^k. Coordinates are Python ints, so sums never wrap."""

    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("group elements need at least one coordinate")
        for c in coords:
            if isinstance(c, bool) or int(c) != c:
                raise TypeError(f"coordinate {c!r} is not an integer")
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))

    @classmethod
    def zero(cls, k: int = 1) -> "GroupElement":
        return cls((0,) * k)

    @classmethod
    def unit(cls, k: int, i: int) -> "GroupElement":
        c = [0] * k
        c[i] = 1
        return cls(tuple(c))

    @property
    def k(self) -> int:
        return len(self.coords)

    def _check(self, other: "GroupElement") -> None:
        if not isinstance(other, GroupElement):
            raise TypeError(f"expected GroupElement, got {type(other).__name__}")
        if other.k != self.k:
            raise DimensionMismatch(f"dimension {self.k} vs {other.k}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(tuple(-a for a in self.coords))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __lt__(self, other: "GroupElement") -> bool:
        return compare(self, other) is Ordering.LT

    def __le__(self, other: "GroupElement") -> bool:
        return compare(self, other) is not Ordering.GT

    def __gt__(self, other: "GroupElement") -> bool:
        return compare(self, other) is Ordering.GT

    def __ge__(self, other: "GroupElement") -> bool:
        return compare(self, other) is not Ordering.LT

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_positive(self) -> bool:
        """Membership in the positive cone (zero included)."""
        for c in self.coords:
            if c:
                return c > 0
        return True

    def radius(self) -> int:
        """Max-norm of the coordinates; used for window margins."""
        return max(abs(c) for c in self.coords)

    def to_json(self) -> list[int]:
        return list(self.coords)

    def __repr__(self) -> str:
        if self.k == 1:
            return f"G({self.coords[0]})"
        return f"G{self.coords}"


GroupLike = Union[GroupElement, int, Sequence[int]]


def as_group(g: GroupLike, k: int | None = None) -> GroupElement:
    """Coerce an int or integer sequence to a GroupElement of dimension k."""
    if isinstance(g, GroupElement):
        out = g
    elif isinstance(g, (int,)) and not isinstance(g, bool):
        out = GroupElement((g,))
    elif hasattr(g, "__int__") and not hasattr(g, "__len__"):
        out = GroupElement((int(g),))
    else:
        out = GroupElement(tuple(g))
    if k is not None and out.k != k:
        raise DimensionMismatch(f"expected dimension {k}, got {out.k}")
    return out


def compare(g: GroupElement, h: GroupElement) -> Ordering:
    g._check(h)
    if g.coords < h.coords:
        return Ordering.LT
    if g.coords > h.coords:
        return Ordering.GT
    return Ordering.EQ


def is_positive(g: GroupElement) -> bool:
    return compare(GroupElement.zero(g.k), g) is not Ordering.GT


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    return g + h


def neg(g: GroupElement) -> GroupElement:
    return -g


def require_positive(x: GroupElement) -> None:
    if not x.is_positive():
        raise NotInCone(f"{x!r} is not in the positive cone")


def positive_split(g: GroupElement) -> tuple[GroupElement, GroupElement]:
    """Write g = p - q with p, q in the cone."""
    z = GroupElement.zero(g.k)
    return (g, z) if g.is_positive() else (z, -g)


def sumset(a: Iterable[GroupElement], b: Iterable[GroupElement]) -> set[GroupElement]:
    b = list(b)
    return {x + y for x in a for y in b}


def iterated_sumset(s: Iterable[GroupElement], n: int, cap: int | None = None) -> set[GroupElement]:
    """All sums of exactly n elements of s. ``cap`` aborts with OverflowError."""
    s = set(s)
    if n < 1 or not s:
        raise ValueError("need n >= 1 and a nonempty set")
    out = set(s)
    for _ in range(n - 1):
        out = sumset(out, s)
        if cap is not None and len(out) > cap:
            raise OverflowError(f"sumset exceeds {cap} elements")
    return out


def box(k: int, n: int) -> list[GroupElement]:
    """The componentwise box {g : |g_i| <= n}, sorted in the group order."""
    if n < 0:
        return []
    rng = range(-n, n + 1)
    return sorted(GroupElement(c) for c in itertools.product(rng, repeat=k))
