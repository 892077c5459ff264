"""The telescoping sum of symmetric-submodular inequalities over chained differences.

For crossing ``A, B`` a symmetric submodular ``g`` obeys
``g(A) + g(B) - g(A-B) - g(B-A) >= 0``.  Two lists of ``2k-3`` crossing pairs
built from ``V_1..V_k`` sum to

    g(V_1) + ... + g(V_k) - g({v_1}) - g({v_2}) - g(W_3) - ... - g(W_k) >= 0

which no sublevel family containing the ``V_i`` and missing ``{v_1}``,
``{v_2}`` and every ``W_i`` can satisfy.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .checkers import ViolationReport, Witness
from .core import ESet, GroundSet, coordinate_mask, crosses_bits, elements
from .family import Family


class SignedTerm(NamedTuple):
    sign: int
    set: ESet


class Ledger:
    """Signed multiset of ``g(S)`` terms, kept cancelled."""

    def __init__(self, ground: GroundSet, coeffs=None) -> None:
        self.ground = ground
        self.coeffs: Counter = Counter()
        for bits, c in (coeffs or {}).items():
            self.add(bits, c)

    def add(self, bits: int, coeff: int) -> None:
        self.coeffs[bits] += coeff
        if self.coeffs[bits] == 0:
            del self.coeffs[bits]

    def add_pair(self, a: int, b: int) -> None:
        self.add(a, 1)
        self.add(b, 1)
        self.add(a & ~b, -1)
        self.add(b & ~a, -1)

    @property
    def terms(self) -> list[SignedTerm]:
        """Canonical form: positive terms first, each group by ascending bitmask."""
        out = []
        for bits in sorted(self.coeffs, key=lambda b: (self.coeffs[b] < 0, b)):
            c = self.coeffs[bits]
            out.extend([SignedTerm(1 if c > 0 else -1, ESet(bits, self.ground))] * abs(c))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ledger):
            return NotImplemented
        return self.ground == other.ground and self.coeffs == other.coeffs

    def __len__(self) -> int:
        return sum(abs(c) for c in self.coeffs.values())

    def __repr__(self) -> str:
        return " ".join(f"{'+' if t.sign > 0 else '-'}{t.set!r}" for t in self.terms) or "0"

    def to_doc(self) -> list[dict]:
        return [{"sign": t.sign, "elements": list(t.set)} for t in self.terms]


class NotCrossing(ValueError):
    pass


def ledger_sum(pairs: Iterable[tuple[ESet, ESet]], ground: GroundSet = None) -> Ledger:
    pairs = list(pairs)
    if ground is None:
        if not pairs:
            raise ValueError("ground set needed for an empty pair list")
        ground = pairs[0][0].ground
    ledger = Ledger(ground)
    for a, b in pairs:
        if a.ground != ground or b.ground != ground:
            raise ValueError("pair from another ground set")
        if not crosses_bits(a.bits, b.bits, ground.full):
            raise NotCrossing(f"{a!r} and {b!r} do not cross")
        ledger.add_pair(a.bits, b.bits)
    return ledger


def chain(k: int, indices: Iterable[int]) -> int:
    """``V_a - V_b - V_c - ...`` evaluated left to right."""
    indices = list(indices)
    bits = coordinate_mask(k, indices[0])
    for j in indices[1:]:
        bits &= ~coordinate_mask(k, j)
    return bits


@dataclass
class Certificate:
    k: int
    first_list: list[tuple[ESet, ESet]]
    second_list: list[tuple[ESet, ESet]]
    u_sets: dict[int, ESet]
    w_sets: dict[int, ESet]
    summed: Ledger

    @property
    def pairs(self) -> list[tuple[ESet, ESet]]:
        return self.first_list + self.second_list

    def expected_sum(self) -> Ledger:
        k = self.k
        ledger = Ledger(GroundSet(k))
        for i in range(1, k + 1):
            ledger.add(coordinate_mask(k, i), 1)
        ledger.add(1 << 1, -1)
        ledger.add(1 << 2, -1)
        for w in self.w_sets.values():
            ledger.add(w.bits, -1)
        return ledger

    def to_doc(self) -> dict:
        full = (1 << (1 << self.k)) - 1

        def pair_doc(a: ESet, b: ESet) -> dict:
            return {
                "A": list(a),
                "B": list(b),
                "A∩B": elements(a.bits & b.bits),
                "V-(A∪B)": elements(full & ~(a.bits | b.bits)),
                "A-B": elements(a.bits & ~b.bits),
                "B-A": elements(b.bits & ~a.bits),
            }

        return {
            "k": self.k,
            "first_list": [pair_doc(a, b) for a, b in self.first_list],
            "second_list": [pair_doc(a, b) for a, b in self.second_list],
            "U": {f"U{i}": list(u) for i, u in self.u_sets.items()},
            "W": {f"W{i}": list(w) for i, w in self.w_sets.items()},
            "sum": self.summed.to_doc(),
        }


def build_certificate(k: int) -> Certificate:
    if not isinstance(k, int) or k < 3:
        raise ValueError(f"k must be an integer >= 3, got {k!r}")
    ground = GroundSet(k)
    es = lambda bits: ESet(bits, ground)  # noqa: E731
    v = {i: coordinate_mask(k, i) for i in range(1, k + 1)}

    first = [(es(chain(k, range(1, i + 1))), es(v[i + 1])) for i in range(1, k)]
    u_sets = {i: es(v[i] & ~chain(k, range(1, i))) for i in range(3, k + 1)}
    # (V_2 - V_1) - V_3 - ... - V_{i+1}
    tail = lambda last: chain(k, [2, 1] + list(range(3, last + 1)))  # noqa: E731
    second = [(es(tail(i + 1)), u_sets[i + 2]) for i in range(1, k - 1)]
    w_sets = {i: es(u_sets[i].bits & ~tail(i - 1)) for i in range(3, k + 1)}
    summed = ledger_sum(first + second, ground)
    return Certificate(k, first, second, u_sets, w_sets, summed)


def _check_algebra(c: Certificate, report: ViolationReport) -> None:
    k = c.k
    full = (1 << (1 << k)) - 1
    for n, (a, b) in enumerate(c.pairs):
        if not crosses_bits(a.bits, b.bits, full):
            report.add(Witness((a.bits, b.bits), note=f"crossing: pair #{n + 1} does not cross"), None)
    for i, (a, _) in enumerate(c.second_list, start=1):
        lhs = a.bits & ~c.u_sets[i + 2].bits
        rhs = chain(k, [2, 1] + list(range(3, i + 3)))
        if lhs != rhs:
            report.add(Witness((lhs, rhs), note=f"telescoping: second-list pair #{i} difference mismatch"), None)
    if c.summed != c.expected_sum():
        report.add(Witness((), note=f"sum: got {c.summed!r}"), None)
    if any(abs(x) != 1 for x in c.summed.coeffs.values()):
        report.add(Witness((), note="sum: a term survives with multiplicity other than 1"), None)
    if chain(k, range(1, k + 1)) != 1 << 1:
        report.add(Witness((chain(k, range(1, k + 1)),), note="chain: V_1-V_2-...-V_k is not {v_1}"), None)
    v2_chain = chain(k, [2, 1] + list(range(3, k + 1)))
    if v2_chain != 1 << 2:
        report.add(Witness((v2_chain,), note="chain: V_2-V_1-V_3-...-V_k is not {v_2}"), None)


def verify_certificate_algebra(c: Certificate) -> ViolationReport:
    """Checks that need no family: crossing, telescoping identities, the sum."""
    report = ViolationReport("certificate-algebra")
    _check_algebra(c, report)
    return report


def verify_certificate(f: Family, c: Certificate) -> ViolationReport:
    if f.ground.k != c.k:
        raise ValueError(f"family has k={f.ground.k}, certificate has k={c.k}")
    k = c.k
    report = ViolationReport("certificate")
    _check_algebra(c, report)
    for i in range(1, k + 1):
        if coordinate_mask(k, i) not in f.index:
            report.add(Witness((coordinate_mask(k, i),), note=f"membership: V_{i} is not a member"), None)
    for i in (1, 2):
        if 1 << (1 << (i - 1)) in f.index:
            report.add(Witness((1 << (1 << (i - 1)),), note=f"membership: {{v_{i}}} is a member"), None)
    for i, w in c.w_sets.items():
        if w.bits in f.index:
            report.add(Witness((w.bits,), note=f"membership: W_{i} is a member"), None)
    return report
