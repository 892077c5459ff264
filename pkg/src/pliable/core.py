"""Hypercube ground sets and bit-vector subsets.

Element ids are integers in ``[0, 2**k)``; bit ``j - 1`` of an id is coordinate
``j`` of the vector, so ``v_{1,2}`` has id 3 and ``v_{3}`` has id 4.  A subset of
the ground set is stored as a Python int of ``2**k`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional


class GroundSetMismatch(ValueError):
    """Two sets from different ground sets were combined."""


@dataclass(frozen=True)
class GroundSet:
    """The vectors of ``{0,1}^k``."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")

    @property
    def n(self) -> int:
        return 1 << self.k

    @property
    def full(self) -> int:
        """Bitmask of the whole ground set."""
        return (1 << self.n) - 1

    def check_element(self, e: int) -> None:
        if not 0 <= e < self.n:
            raise ValueError(f"element id {e} out of range for k={self.k}")

    def check_coordinate(self, i: int) -> None:
        if not 1 <= i <= self.k:
            raise ValueError(f"coordinate index {i} out of range [1, {self.k}]")

    def eset(self, elements: Iterable[int] = ()) -> "ESet":
        bits = 0
        for e in elements:
            self.check_element(e)
            bits |= 1 << e
        return ESet(bits, self)

    def from_bits(self, bits: int) -> "ESet":
        if bits < 0 or bits > self.full:
            raise ValueError(f"bitmask {bits:#x} does not fit a ground set of {self.n} elements")
        return ESet(bits, self)

    @property
    def all(self) -> "ESet":
        return ESet(self.full, self)

    @property
    def empty(self) -> "ESet":
        return ESet(0, self)


class ESet:
    """An immutable subset of a hypercube ground set."""

    __slots__ = ("bits", "ground")

    def __init__(self, bits: int, ground: GroundSet) -> None:
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "ground", ground)

    def __setattr__(self, name, value):
        raise AttributeError("ESet is immutable")

    def _same(self, other: "ESet") -> None:
        if not isinstance(other, ESet):
            raise TypeError(f"expected ESet, got {type(other).__name__}")
        if other.ground != self.ground:
            raise GroundSetMismatch(f"k={self.ground.k} vs k={other.ground.k}")

    def __and__(self, other: "ESet") -> "ESet":
        self._same(other)
        return ESet(self.bits & other.bits, self.ground)

    def __or__(self, other: "ESet") -> "ESet":
        self._same(other)
        return ESet(self.bits | other.bits, self.ground)

    def __sub__(self, other: "ESet") -> "ESet":
        self._same(other)
        return ESet(self.bits & ~other.bits, self.ground)

    def __invert__(self) -> "ESet":
        return ESet(self.ground.full & ~self.bits, self.ground)

    def __le__(self, other: "ESet") -> bool:
        self._same(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: "ESet") -> bool:
        return self <= other and self.bits != other.bits

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ESet):
            return NotImplemented
        return self.bits == other.bits and self.ground == other.ground

    def __hash__(self) -> int:
        return hash((self.bits, self.ground.k))

    def __contains__(self, e: int) -> bool:
        return e >= 0 and (self.bits >> e) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(elements(self.bits))

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


class SetAlgebra(NamedTuple):
    inter: ESet
    union: ESet
    diff_ab: ESet
    diff_ba: ESet
    complement_a: ESet


def elements(bits: int) -> list[int]:
    """Sorted element ids of a bitmask."""
    out = []
    e = 0
    while bits:
        if bits & 1:
            out.append(e)
        bits >>= 1
        e += 1
    return out


def popcount(bits: int) -> int:
    return bin(bits).count("1")


def coordinate_mask(k: int, i: int) -> int:
    mask = 0
    for e in range(1 << k):
        if (e >> (i - 1)) & 1:
            mask |= 1 << e
    return mask


def coordinate_set(g: GroundSet, i: int) -> ESet:
    """``V_i``: every vector whose ``i``-th coordinate is 1."""
    g.check_coordinate(i)
    return ESet(coordinate_mask(g.k, i), g)


def unit_index(g: GroundSet, e: int) -> Optional[int]:
    """Coordinate ``i`` if ``e`` is the unit-vector ``v_{i}``, else None."""
    g.check_element(e)
    if e and e & (e - 1) == 0:
        return e.bit_length()
    return None


def vec_of_indexset(g: GroundSet, index_set: Iterable[int]) -> int:
    e = 0
    for j in index_set:
        g.check_coordinate(j)
        e |= 1 << (j - 1)
    return e


def unit_mask(k: int) -> int:
    """Bitmask of the k unit-vectors."""
    mask = 0
    for i in range(k):
        mask |= 1 << (1 << i)
    return mask


def units_in(bits: int, k: int) -> list[int]:
    """Coordinate indices of the unit-vectors contained in ``bits``."""
    return [i + 1 for i in range(k) if (bits >> (1 << i)) & 1]


def set_algebra(a: ESet, b: ESet) -> SetAlgebra:
    return SetAlgebra(a & b, a | b, a - b, b - a, ~a)


def crosses_bits(a: int, b: int, full: int) -> bool:
    return bool(a & b) and bool(a & ~b) and bool(b & ~a) and (a | b) != full


def crosses(a: ESet, b: ESet) -> bool:
    """True iff ``A∩B``, ``V-(A∪B)``, ``A-B`` and ``B-A`` are all non-empty."""
    a._same(b)
    return crosses_bits(a.bits, b.bits, a.ground.full)
