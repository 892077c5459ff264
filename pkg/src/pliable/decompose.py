"""Rewrite unit-vector members as nested differences of coordinate sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .core import ESet, coordinate_mask, crosses_bits, elements, units_in
from .family import Family


class ExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    index: int
    value: ESet

    def text(self) -> str:
        return f"V{self.index}"

    def to_doc(self) -> dict:
        return {"leaf": self.index, "elements": list(self.value)}


@dataclass(frozen=True)
class Diff:
    left: "Tree"
    right: "Tree"
    value: ESet

    def text(self) -> str:
        return f"({self.left.text()} - {self.right.text()})"

    def to_doc(self) -> dict:
        return {"diff": [self.left.to_doc(), self.right.to_doc()], "elements": list(self.value)}


Tree = Union[Leaf, Diff]


def leaves(t: Tree) -> list[int]:
    if isinstance(t, Leaf):
        return [t.index]
    return leaves(t.left) + leaves(t.right)


def evaluate(t: Tree) -> int:
    if isinstance(t, Leaf):
        return coordinate_mask(t.value.ground.k, t.index)
    return evaluate(t.left) & ~evaluate(t.right)


def _single_unit(bits: int, k: int) -> int:
    units = units_in(bits, k)
    return units[0] if len(units) == 1 else 0


class _Resolver:
    def __init__(self, f: Family, use_provenance: bool = True) -> None:
        self.f = f
        self.use_provenance = use_provenance
        self.k = f.ground.k
        self.full = f.ground.full
        self.memo: dict[int, Tree] = {}

    def tree(self, ref: int) -> Tree:
        if ref in self.memo:
            return self.memo[ref]
        member = self.f.members[ref]
        i = _single_unit(member.bits, self.k)
        if member.generation == 0:
            if member.bits != coordinate_mask(self.k, i):
                raise ExpressionError(f"generation-0 member {elements(member.bits)} is not a coordinate set")
            t = Leaf(i, self.f.eset(ref))
        else:
            a, b = self.split(ref, i)
            t = Diff(self.tree(a), self.tree(b), self.f.eset(ref))
        self.memo[ref] = t
        return t

    def _fits(self, ref: int, i: int, a: int, b: int) -> bool:
        ms = self.f.members
        r, sa, sb = ms[ref], ms[a], ms[b]
        if sa.generation > r.generation or sb.generation >= r.generation:
            return False
        if sa.bits & ~sb.bits != r.bits or not crosses_bits(sa.bits, sb.bits, self.full):
            return False
        if not (sa.bits >> (1 << (i - 1))) & 1:
            return False
        j = _single_unit(sb.bits, self.k)
        return 0 < j < i

    def split(self, ref: int, i: int) -> tuple[int, int]:
        """Members ``(S', S'')`` with ``S = S' - S''`` meeting the generation and unit constraints."""
        prov = self.f.members[ref].provenance
        if self.use_provenance and prov is not None and prov.kind == "difference":
            if self._fits(ref, i, prov.parent_a, prov.parent_b):
                return prov.parent_a, prov.parent_b

        ms = self.f.members
        target = ms[ref].bits
        gen = ms[ref].generation
        best = None
        for a, ma in enumerate(ms):
            if ma.generation > gen or ma.bits == target or target & ~ma.bits:
                continue
            for b, mb in enumerate(ms):
                if mb.generation >= gen:
                    break
                if self._fits(ref, i, a, b):
                    key = (mb.generation, ma.generation, ma.bits, mb.bits)
                    if best is None or key < best[0]:
                        best = (key, a, b)
        if best is None:
            raise ExpressionError(f"no crossing pair (S', S'') found for {elements(target)}")
        return best[1], best[2]


def express(f: Family, s, use_provenance: bool = True) -> Tree:
    """Nested-difference tree for a member of generation >= 1 holding one unit-vector.

    Recorded provenance is used when it already has the required shape; otherwise,
    or with ``use_provenance=False``, the split is found by searching member pairs.
    """
    ref = s if isinstance(s, int) else f.ref_of(s)
    if ref is None or not 0 <= ref < len(f):
        raise ExpressionError(f"{s!r} is not a member")
    member = f.members[ref]
    units = units_in(member.bits, f.ground.k)
    if not units:
        raise ExpressionError(f"{elements(member.bits)} holds no unit-vector")
    if len(units) > 1:
        raise ExpressionError(f"{elements(member.bits)} holds several unit-vectors {units}")
    if member.generation == 0:
        raise ExpressionError("coordinate sets are leaves already; express needs generation >= 1")
    return _Resolver(f, use_provenance).tree(ref)


@dataclass
class ExpressionCheck:
    ok: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_expression(t: Tree, s: ESet, i: int) -> ExpressionCheck:
    reasons = []
    value = evaluate(t)
    if value != s.bits:
        reasons.append(f"evaluates to {elements(value)}, expected {list(s)}")
    ls = leaves(t)
    if ls[0] != i:
        reasons.append(f"leftmost leaf is V{ls[0]}, expected V{i}")
    late = sorted({j for j in ls[1:] if j >= i})
    if late:
        reasons.append(f"leaves {['V%d' % j for j in late]} have index >= {i}")
    full = s.ground.full

    def walk(node: Tree) -> None:
        if isinstance(node, Leaf):
            if node.value.bits != coordinate_mask(node.value.ground.k, node.index):
                reasons.append(f"leaf V{node.index} carries a wrong value")
            return
        lv, rv = evaluate(node.left), evaluate(node.right)
        if lv & ~rv != node.value.bits:
            reasons.append(f"cached value of {node.text()} is stale")
        if not crosses_bits(lv, rv, full):
            reasons.append(f"children of {node.text()} do not cross")
        walk(node.left)
        walk(node.right)

    walk(t)
    return ExpressionCheck(not reasons, reasons)
