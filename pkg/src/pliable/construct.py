"""Generational closure of the coordinate sets under crossing-pair rules.

Starting from ``V_1..V_k``, each iteration looks at every crossing pair of the
family as it stood when the iteration began.  A missing intersection is staged;
when both differences are missing, one of them is staged:

* both differences hold unit-vectors: the one with the larger unit index;
* exactly one holds a unit-vector: the other one;
* neither: chosen by the tie-break policy.

Staged sets join the family together at the end of the iteration, and the
process stops at the first iteration that stages nothing.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Optional

from .config import DEFAULT, Config
from .core import GroundSet, coordinate_mask, crosses_bits, unit_mask
from .family import INITIAL, Family, Provenance


class ConstructionBudgetExceeded(RuntimeError):
    """The family outgrew ``Config.family_member_budget``."""


class TieBreakPolicy(str, Enum):
    MIN = "lexicographic-min-bitmask"
    MAX = "lexicographic-max-bitmask"

    @classmethod
    def parse(cls, value) -> "TieBreakPolicy":
        if isinstance(value, cls):
            return value
        aliases = {"min": cls.MIN, "max": cls.MAX}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ValueError(f"unknown tie-break policy {value!r}") from None


def _top_unit(bits: int, units: int) -> int:
    """Largest unit-vector id inside ``bits``, 0 if there is none."""
    hit = bits & units
    return hit.bit_length() - 1 if hit else 0


def run_iteration(
    snapshot: list[int],
    k: int,
    policy: TieBreakPolicy = TieBreakPolicy.MIN,
    pair_order: Optional[Iterable[tuple[int, int]]] = None,
    fresh_from: int = 0,
    limit: Optional[int] = None,
) -> dict[int, tuple[tuple[int, int], str, str, int, int]]:
    """Stage the sets produced by one pass over the crossing pairs of ``snapshot``.

    Returns ``{bits: ((i, j), kind, rule, parent_a, parent_b)}`` where ``(i, j)``
    is the smallest producing pair; ``pair_order`` only changes the visiting
    order, never the result.

    With ``fresh_from`` set, pairs whose members both precede that position are
    skipped.  Such a pair was already examined by the previous iteration, which
    left its intersection and one of its differences in the family, so it
    cannot stage anything.
    """
    full = (1 << (1 << k)) - 1
    units = unit_mask(k)
    present = set(snapshot)
    staged: dict[int, tuple] = {}

    def stage(bits, pair, kind, rule, pa, pb):
        old = staged.get(bits)
        if old is None:
            if limit is not None and len(staged) >= limit:
                raise ConstructionBudgetExceeded(f"more than {limit} sets staged in one iteration")
            staged[bits] = (pair, kind, rule, pa, pb)
        elif pair < old[0]:
            staged[bits] = (pair, kind, rule, pa, pb)

    m = len(snapshot)
    if pair_order is None:
        pair_order = ((i, j) for j in range(max(fresh_from, 1), m) for i in range(j))
    for i, j in pair_order:
        if i > j:
            i, j = j, i
        if j < fresh_from:
            continue
        a = snapshot[i]
        b = snapshot[j]
        if not crosses_bits(a, b, full):
            continue
        inter = a & b
        if inter not in present:
            stage(inter, (i, j), "intersection", "a", i, j)
        ab = a & ~b
        ba = b & ~a
        if ab in present or ba in present:
            continue
        ua = _top_unit(ab, units)
        ub = _top_unit(ba, units)
        if ua and ub:
            rule = "b-i"
            take_ab = ua > ub
        elif ua or ub:
            rule = "b-ii"
            take_ab = not ua
        else:
            rule = "b-iii"
            take_ab = (ab < ba) == (policy is TieBreakPolicy.MIN)
        if take_ab:
            stage(ab, (i, j), "difference", rule, i, j)
        else:
            stage(ba, (i, j), "difference", rule, j, i)
    return staged


def construct_family(
    k: int,
    policy=TieBreakPolicy.MIN,
    config: Config = DEFAULT,
    max_iterations: Optional[int] = None,
) -> Family:
    if not isinstance(k, int) or not 3 <= k <= config.k_cap:
        raise ValueError(f"k must be an integer in [3, {config.k_cap}], got {k!r}")
    policy = TieBreakPolicy.parse(policy)
    ground = GroundSet(k)
    family = Family(ground)
    for i in sorted(range(1, k + 1), key=lambda i: coordinate_mask(k, i)):
        family.insert(coordinate_mask(k, i), 0, INITIAL)

    gen = 0
    fresh_from = 0
    while max_iterations is None or gen < max_iterations:
        gen += 1
        snapshot = family.masks
        room = config.family_member_budget - len(family)
        try:
            staged = run_iteration(snapshot, k, policy, fresh_from=fresh_from, limit=room)
        except ConstructionBudgetExceeded:
            raise ConstructionBudgetExceeded(
                f"k={k}: generation {gen} grows the family past the budget of "
                f"{config.family_member_budget} sets"
            ) from None
        if not staged:
            break
        fresh_from = len(snapshot)
        for bits in sorted(staged):
            _, kind, rule, pa, pb = staged[bits]
            family.insert(bits, gen, Provenance(kind, pa, pb, rule))
    return family.freeze()


def coordinate_refs(family: Family) -> dict[int, int]:
    """Map coordinate index ``i`` to the member ref of ``V_i``."""
    k = family.ground.k
    refs = {}
    for i in range(1, k + 1):
        ref = family.ref_of(coordinate_mask(k, i))
        if ref is None or family.members[ref].generation != 0:
            raise ValueError(f"V_{i} is not a generation-0 member")
        refs[i] = ref
    if len(family.generation(0)) != k:
        raise ValueError("generation 0 holds sets other than V_1..V_k")
    return refs
