import itertools
import random

import pytest
from hypothesis import given, strategies as st

from pliable.config import Config
from pliable.construct import (
    ConstructionBudgetExceeded,
    TieBreakPolicy,
    construct_family,
    coordinate_refs,
    run_iteration,
)
from pliable.family import Family

GOLDEN_K3 = [
    [{1, 3, 5, 7}, {2, 3, 6, 7}, {4, 5, 6, 7}],
    [{2, 6}, {4, 5}, {4, 6}, {3, 7}, {5, 7}, {6, 7}],
    [{3}, {4}, {5}, {6}, {7}, {4, 5, 7}],
]


def by_generation(f):
    return [sorted(map(frozenset, f.generation(g)), key=sorted) for g in range(f.max_generation + 1)]


@pytest.mark.parametrize("policy", ["min", "max"])
def test_golden_k3(policy):
    f = construct_family(3, policy)
    want = [sorted(map(frozenset, gen), key=sorted) for gen in GOLDEN_K3]
    assert by_generation(f) == want
    assert len(f) == 15


@pytest.mark.parametrize("k", [2, 7, 0, "3"])
def test_k_out_of_range(k):
    with pytest.raises(ValueError):
        construct_family(k)


def test_k_cap_is_configurable():
    with pytest.raises(ValueError):
        construct_family(4, config=Config(k_cap=3))


def test_budget_aborts():
    with pytest.raises(ConstructionBudgetExceeded):
        construct_family(5, config=Config(family_member_budget=100))


def test_policy_parse():
    assert TieBreakPolicy.parse("min") is TieBreakPolicy.MIN
    assert TieBreakPolicy.parse("lexicographic-max-bitmask") is TieBreakPolicy.MAX
    with pytest.raises(ValueError):
        TieBreakPolicy.parse("random")


def reference_construction(k, prefer_small=True):
    """The loop written the obvious way, over frozensets of element ids."""
    n = 1 << k
    ground = frozenset(range(n))
    coords = [frozenset(e for e in ground if e >> (i - 1) & 1) for i in range(1, k + 1)]
    units = {1 << (i - 1): i for i in range(1, k + 1)}

    def unit_of(s):
        found = [units[e] for e in s if e in units]
        return max(found) if found else 0

    def cross(a, b):
        return bool(a & b) and bool(ground - (a | b)) and bool(a - b) and bool(b - a)

    fam = {s: 0 for s in coords}
    gen = 0
    while True:
        gen += 1
        snap = set(fam)
        new = set()
        for a, b in itertools.combinations(list(snap), 2):
            if not cross(a, b):
                continue
            if a & b not in snap:
                new.add(a & b)
            if a - b not in snap and b - a not in snap:
                ua, ub = unit_of(a - b), unit_of(b - a)
                if ua and ub:
                    new.add(a - b if ua > ub else b - a)
                elif ua or ub:
                    new.add(b - a if ua else a - b)
                else:
                    key = lambda s: sum(1 << e for e in s)  # noqa: E731
                    pick = min if prefer_small else max
                    new.add(pick(a - b, b - a, key=key))
        if not new:
            return fam
        for s in new:
            fam[s] = gen


@pytest.mark.parametrize("policy", ["min", "max"])
def test_k4_matches_reference(policy):
    f = construct_family(4, policy)
    ref = reference_construction(4, prefer_small=policy == "min")
    got = {frozenset(s): m.generation for s, m in zip(f, f.members)}
    assert got == ref


def test_k3_matches_reference():
    f = construct_family(3)
    assert {frozenset(s): m.generation for s, m in zip(f, f.members)} == reference_construction(3)


def test_k4_regression_baseline():
    assert construct_family(4, "min").generation_sizes() == [4, 12, 42, 17, 1]
    assert construct_family(4, "max").generation_sizes() == [4, 12, 42, 31, 1]


def test_policies_diverge_at_k4(fam4):
    other = construct_family(4, "max")
    mine, theirs = set(fam4.masks), set(other.masks)
    assert (len(mine - theirs), len(theirs - mine)) == (1, 15)


def test_k4_members_holding_v2(fam4):
    # a member holding v_2 must also hold v_23, v_24 and v_234, so {2, 6} alone is too small
    holding = [list(s) for s in fam4 if 2 in s]
    assert holding == [[2, 3, 6, 7, 10, 11, 14, 15], [2, 6, 10, 14]]
    assert not fam4.contains(fam4.ground.eset([2, 6]))


def test_generation_zero_is_coordinates(fam4):
    refs = coordinate_refs(fam4)
    assert sorted(refs) == [1, 2, 3, 4]
    assert all(fam4.members[r].generation == 0 for r in refs.values())


def test_coordinate_refs_rejects_other_seeds():
    f = Family.from_sets(construct_family(3).ground, [[1, 3, 5, 7], [4, 5, 6, 7]])
    with pytest.raises(ValueError):
        coordinate_refs(f)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_members_inside_a_coordinate_set(k, request):
    f = request.getfixturevalue(f"fam{k}")
    coords = [m.bits for m in f.members if m.generation == 0]
    assert all(any(s.bits & ~v == 0 for v in coords) for s in f)
    sizes = f.generation_sizes()
    assert all(n > 0 for n in sizes)


def test_provenance_is_first_producing_pair(fam3):
    snap = [m.bits for m in fam3.members if m.generation == 0]
    staged = run_iteration(snap, 3)
    for bits, (pair, kind, rule, pa, pb) in staged.items():
        ref = fam3.ref_of(bits)
        p = fam3.members[ref].provenance
        assert (p.kind, p.rule, p.parent_a, p.parent_b) == (kind, rule, pa, pb)
        assert pair == min(pair, (pa, pb), (pb, pa))


def test_seminaive_matches_full_scan(fam4):
    # re-run each generation scanning every pair; nothing old may stage anything
    for gen in range(1, fam4.max_generation + 2):
        snap = [m.bits for m in fam4.members if m.generation < gen]
        fresh = sum(1 for m in fam4.members if m.generation < gen - 1)
        assert run_iteration(snap, 4) == run_iteration(snap, 4, fresh_from=fresh)


SNAPSHOTS = None


def snapshots():
    global SNAPSHOTS
    if SNAPSHOTS is None:
        f = construct_family(4)
        SNAPSHOTS = [[m.bits for m in f.members if m.generation < g] for g in range(1, f.max_generation + 2)]
    return SNAPSHOTS


@given(st.integers(0, 4), st.randoms(use_true_random=False), st.sampled_from(list(TieBreakPolicy)))
def test_snapshot_determinism(level, rnd, policy):
    snap = snapshots()[level]
    pairs = [(i, j) for j in range(len(snap)) for i in range(j)]
    rnd.shuffle(pairs)
    flip = [(j, i) if rnd.random() < 0.5 else (i, j) for i, j in pairs]
    assert run_iteration(snap, 4, policy, pair_order=flip) == run_iteration(snap, 4, policy)


def test_snapshot_determinism_whole_run_k3():
    f = construct_family(3)
    rnd = random.Random(7)
    for gen in range(1, 4):
        snap = [m.bits for m in f.members if m.generation < gen]
        pairs = [(i, j) for j in range(len(snap)) for i in range(j)]
        rnd.shuffle(pairs)
        assert run_iteration(snap, 3, pair_order=pairs) == run_iteration(snap, 3)
