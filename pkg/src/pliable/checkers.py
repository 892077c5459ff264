"""Decision procedures for pliability, uncrossability and related properties."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .config import DEFAULT, Config
from .construct import coordinate_refs
from .core import coordinate_mask, crosses_bits, elements, popcount
from .family import Family


@dataclass(frozen=True)
class Witness:
    """A pair (or triple) of members and the derived sets that were missing."""

    sets: tuple[int, ...]
    missing: tuple[tuple[str, int], ...] = ()
    note: str = ""

    def to_doc(self) -> dict:
        doc = {"sets": [elements(b) for b in self.sets]}
        if self.missing:
            doc["missing"] = [{"name": name, "elements": elements(b)} for name, b in self.missing]
        if self.note:
            doc["note"] = self.note
        return doc


@dataclass
class ViolationReport:
    property: str
    witnesses: list[Witness] = field(default_factory=list)
    # total number of violations; may exceed len(witnesses) when a limit is set
    count: int = 0

    @property
    def ok(self) -> bool:
        return self.count == 0

    def add(self, witness: Witness, limit: Optional[int]) -> None:
        self.count += 1
        if limit is None or len(self.witnesses) < limit:
            self.witnesses.append(witness)

    def to_doc(self) -> dict:
        return {
            "property": self.property,
            "ok": self.ok,
            "violations": self.count,
            "witnesses": [w.to_doc() for w in self.witnesses],
        }


def _four(a: int, b: int, full: int) -> tuple[int, int, int, int]:
    return a & b, (a | b) & full, a & ~b, b & ~a


def _pairs(masks):
    m = len(masks)
    for i in range(m):
        a = masks[i]
        for j in range(i + 1, m):
            yield a, masks[j]


def is_pliable(f: Family, limit: Optional[int] = None) -> ViolationReport:
    """At least two of ``A∩B, A∪B, A-B, B-A`` are members, for every pair."""
    report = ViolationReport("pliable")
    present = f.index
    full = f.ground.full
    for a, b in _pairs(f.masks):
        derived = _four(a, b, full)
        hits = sum(1 for s in derived if s in present)
        if hits < 2:
            missing = tuple((n, s) for n, s in zip(("A∩B", "A∪B", "A-B", "B-A"), derived) if s not in present)
            report.add(Witness((a, b), missing), limit)
    return report


def is_structurally_submodular(f: Family, limit: Optional[int] = None) -> ViolationReport:
    report = ViolationReport("structural")
    present = f.index
    full = f.ground.full
    for a, b in _pairs(f.masks):
        if not crosses_bits(a, b, full):
            continue
        inter, union, ab, ba = _four(a, b, full)
        missing = []
        if inter not in present and union not in present:
            missing += [("A∩B", inter), ("A∪B", union)]
        if ab not in present and ba not in present:
            missing += [("A-B", ab), ("B-A", ba)]
        if missing:
            report.add(Witness((a, b), tuple(missing)), limit)
    return report


def _uncrossable_missing(a: int, b: int, full: int, present) -> tuple:
    inter, union, ab, ba = _four(a, b, full)
    if inter in present and union in present:
        return ()
    if ab in present and ba in present:
        return ()
    return tuple((n, s) for n, s in (("A∩B", inter), ("A∪B", union), ("A-B", ab), ("B-A", ba)) if s not in present)


def is_uncrossable(f: Family, limit: Optional[int] = None) -> ViolationReport:
    """Both ``A∩B, A∪B`` or both ``A-B, B-A`` are members, for every pair."""
    report = ViolationReport("uncrossable")
    present = f.index
    full = f.ground.full
    for a, b in _pairs(f.masks):
        missing = _uncrossable_missing(a, b, full, present)
        if missing:
            report.add(Witness((a, b), missing), limit)
    return report


def minimal_members(f: Family) -> list[int]:
    masks = f.masks
    return [c for c in masks if not any(s != c and s & ~c == 0 for s in masks)]


def satisfies_gamma(f: Family, limit: Optional[int] = None) -> ViolationReport:
    """For minimal ``C`` crossing ``S1 ⊊ S2``: ``S2-(S1∪C)`` is empty or a member."""
    report = ViolationReport("gamma")
    present = f.index
    full = f.ground.full
    masks = f.masks
    for c in minimal_members(f):
        crossing = [s for s in masks if crosses_bits(c, s, full)]
        for s1 in crossing:
            for s2 in crossing:
                if s1 == s2 or s1 & ~s2:
                    continue
                rest = s2 & ~(s1 | c)
                if rest and rest not in present:
                    report.add(Witness((c, s1, s2), (("S2-(S1∪C)", rest),)), limit)
    return report


def upward_mask(k: int, i: int) -> int:
    """Vectors ``v_I`` with ``I = {i} ∪ J``, ``J ⊆ {i+1..k}``."""
    low = (1 << i) - 1
    target = 1 << (i - 1)
    mask = 0
    for e in range(1 << k):
        if e & low == target:
            mask |= 1 << e
    return mask


def validate_construction(f: Family, limit: Optional[int] = None) -> ViolationReport:
    """Structural facts every constructed family must satisfy.

    * ``subsets``: each member lies inside some ``V_i``;
    * ``one-unit``: at most one unit-vector, and ``S ⊆ V_i`` when ``v_{i} ∈ S``;
    * ``upward``: ``v_{i} ∈ S`` implies ``v_I ∈ S`` for all ``I ⊇ {i}`` above ``i``,
      so ``|S| >= 2^(k-i)``;
    * ``singleton``: ``{v_{i}}`` is not a member for ``i < k``;
    * ``difference``: ``V_i - V_j`` is not a member for ``i < j``;
    * ``w-pattern``: for ``i >= 3`` no member holds ``v_{i}`` and ``v_[k]`` but
      not ``v_{1,i}``.
    """
    coordinate_refs(f)
    k = f.ground.k
    report = ViolationReport("lemmas")
    coords = {i: coordinate_mask(k, i) for i in range(1, k + 1)}
    ups = {i: upward_mask(k, i) for i in range(1, k + 1)}
    top = 1 << ((1 << k) - 1)

    for s in f.masks:
        if not any(s & ~v == 0 for v in coords.values()):
            report.add(Witness((s,), note="subsets: not inside any V_i"), limit)
        units = [i for i in range(1, k + 1) if (s >> (1 << (i - 1))) & 1]
        if len(units) > 1:
            report.add(Witness((s,), note=f"one-unit: holds unit-vectors {units}"), limit)
        for i in units:
            if s & ~coords[i]:
                report.add(Witness((s,), note=f"one-unit: holds v_{{{i}}} but is not inside V_{i}"), limit)
            if ups[i] & ~s:
                report.add(
                    Witness((s,), (("missing v_I", ups[i] & ~s),), f"upward: holds v_{{{i}}}"), limit
                )
            if popcount(s) < 1 << (k - i):
                report.add(Witness((s,), note=f"upward: fewer than 2^(k-{i}) elements"), limit)
        for i in range(3, k + 1):
            v1i = 1 << ((1 << (i - 1)) | 1)
            if (s >> (1 << (i - 1))) & 1 and s & top and not s & v1i:
                report.add(Witness((s,), note=f"w-pattern: holds v_{{{i}}} and v_[k] but not v_{{1,{i}}}"), limit)

    for i in range(1, k):
        single = 1 << (1 << (i - 1))
        if single in f.index:
            report.add(Witness((single,), note=f"singleton: {{v_{{{i}}}}} is a member"), limit)
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            diff = coords[i] & ~coords[j]
            if diff in f.index:
                report.add(Witness((diff,), note=f"difference: V_{i}-V_{j} is a member"), limit)
    return report


@dataclass(frozen=True)
class ConflictPair:
    i: int
    j: int
    union_member: bool
    difference_member: bool

    @property
    def verified(self) -> bool:
        return not self.union_member and not self.difference_member

    def to_doc(self) -> dict:
        return {
            "pair": [f"V{self.i}", f"V{self.j}"],
            "union_member": self.union_member,
            "difference_member": self.difference_member,
            "verified": self.verified,
        }


def conflict_witness(f: Family) -> list[ConflictPair]:
    """Check that ``V_i ∪ V_j`` and ``V_i - V_j`` (``i < j``) are non-members.

    Each verified pair can never share an uncrossable block, so ``k`` verified
    pairwise conflicts force at least ``k`` blocks.
    """
    coordinate_refs(f)
    k = f.ground.k
    out = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            vi, vj = coordinate_mask(k, i), coordinate_mask(k, j)
            out.append(ConflictPair(i, j, (vi | vj) in f.index, (vi & ~vj) in f.index))
    return out


class SearchBudgetExceeded(RuntimeError):
    pass


def partition_uncrossable(
    f: Family, d: int, config: Config = DEFAULT
) -> Optional[list[list[int]]]:
    """Exhaustive search for a partition of ``f`` into at most ``d`` uncrossable blocks.

    Returns the blocks as lists of member refs, or None when no partition exists.
    """
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    masks = f.masks
    m = len(masks)
    if m == 0:
        return []
    full = f.ground.full
    index = f.index

    # options[(x, y)]: ways the pair can be satisfied inside one block, as sets of refs
    options: dict[tuple[int, int], list[frozenset]] = {}
    mentions: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    degree = [0] * m
    for x in range(m):
        for y in range(x + 1, m):
            inter, union, ab, ba = _four(masks[x], masks[y], full)
            opts = []
            for req in ((inter, union), (ab, ba)):
                if all(r in index for r in req):
                    opts.append(frozenset(index[r] for r in req))
            options[(x, y)] = opts
            if not opts:
                degree[x] += 1
                degree[y] += 1
            for r in set().union(*opts) if opts else ():
                if r not in (x, y):
                    mentions[r].append((x, y))

    order = sorted(range(m), key=lambda x: (-degree[x], x))
    block = [-1] * m
    nodes = 0

    def pair_ok(x: int, y: int) -> bool:
        b = block[x]
        for opt in options[(x, y) if x < y else (y, x)]:
            if all(block[r] in (-1, b) for r in opt):
                return True
        return False

    def consistent(x: int) -> bool:
        b = block[x]
        for y in range(m):
            if y != x and block[y] == b and not pair_ok(x, y):
                return False
        for p, q in mentions[x]:
            if block[p] != -1 and block[p] == block[q] and not pair_ok(p, q):
                return False
        return True

    def search(pos: int, used: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > config.partition_node_budget:
            raise SearchBudgetExceeded(f"partition search exceeded {config.partition_node_budget} nodes")
        if pos == m:
            return True
        x = order[pos]
        for b in range(min(used + 1, d)):
            block[x] = b
            if consistent(x) and search(pos + 1, max(used, b + 1)):
                return True
        block[x] = -1
        return False

    if not search(0, 0):
        return None
    blocks: dict[int, list[int]] = {}
    for x in range(m):
        blocks.setdefault(block[x], []).append(x)
    return [blocks[b] for b in sorted(blocks)]
