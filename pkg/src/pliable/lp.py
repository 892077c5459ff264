"""Exact feasibility oracle: is a family the sublevel family of a symmetric submodular function?

Unknowns are one value ``g`` per complement class ``{S, V-S}`` and the threshold
``lam``.  Every constraint is written ``coeffs . x >= rhs``:

* submodularity, for each ⊆-incomparable pair:  g(A) + g(B) - g(A∩B) - g(A∪B) >= 0
* member S:                                       lam - g(S) >= 1
* non-member S:                                   g(S) - lam >= 0

Strict inequalities are normalized to a unit gap, which loses nothing because
every constraint is invariant under ``g -> a*g + b`` with ``a > 0``.  The empty
set and ``V`` get no threshold row: a symmetric submodular function attains its
minimum there, so they are members whenever anything is.

Infeasibility is proved by nonnegative multipliers ``y`` with ``sum y_i coeffs_i = 0``
and ``sum y_i rhs_i > 0``, i.e. the contradiction ``0 >= positive``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .config import DEFAULT, Config
from .core import GroundSet, elements
from .family import Family

LAMBDA = "lam"

log = logging.getLogger(__name__)


class RealizeMode(str, Enum):
    LITERAL = "literal"
    COMPLEMENTED = "complemented"


class LPBudgetError(ValueError):
    """The LP would exceed the configured size limits."""


class TriviallyUnrealizable(ValueError):
    """A family that is not complement-closed cannot be a symmetric sublevel family."""

    def __init__(self, witness: int, ground: GroundSet) -> None:
        self.witness = witness
        self.ground = ground
        super().__init__(
            f"trivially unrealizable: complement closure violated, "
            f"{elements(witness)} is a member but its complement is not"
        )


@dataclass(frozen=True)
class Constraint:
    coeffs: dict
    rhs: int
    tag: tuple

    def label(self) -> str:
        kind = self.tag[0]
        if kind == "submodular":
            return f"submodularity row for ({elements(self.tag[1])}, {elements(self.tag[2])})"
        return f"{'membership' if kind == 'member' else 'non-membership'} row for {elements(self.tag[1])}"

    def value(self, x: dict) -> Fraction:
        return sum((Fraction(c) * x[v] for v, c in self.coeffs.items()), Fraction(0))

    def holds(self, x: dict) -> bool:
        return self.value(x) >= self.rhs


@dataclass
class LPProblem:
    ground: GroundSet
    mode: RealizeMode
    variables: list
    constraints: list[Constraint]
    # only some rows materialized (certificate checks on large ground sets)
    partial: bool = False
    _rows: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._rows = {c.tag: i for i, c in enumerate(self.constraints)}

    def row(self, tag: tuple) -> int:
        return self._rows[tag]

    @property
    def dimensions(self) -> dict:
        counts = {"submodular": 0, "member": 0, "nonmember": 0}
        for c in self.constraints:
            counts[c.tag[0]] += 1
        return {"g_variables": len(self.variables) - 1, "constraints": len(self.constraints), **counts}


def complement_class(bits: int, full: int) -> int:
    return min(bits, full & ~bits)


def submodular_tag(a: int, b: int) -> tuple:
    return ("submodular", min(a, b), max(a, b))


def submodular_row(ground: GroundSet, a: int, b: int) -> Constraint:
    full = ground.full
    coeffs: dict = {}
    for bits, c in ((a, 1), (b, 1), (a & b, -1), (a | b, -1)):
        key = complement_class(bits, full)
        coeffs[key] = coeffs.get(key, 0) + c
    coeffs = {key: c for key, c in coeffs.items() if c}
    return Constraint(coeffs, 0, submodular_tag(a, b))


def difference_row(ground: GroundSet, a: int, b: int) -> Constraint:
    """``g(A) + g(B) >= g(A-B) + g(B-A)``, which is the submodularity row of ``(A, V-B)``."""
    return submodular_row(ground, a, ground.full & ~b)


def threshold_row(ground: GroundSet, bits: int, member: bool) -> Constraint:
    key = complement_class(bits, ground.full)
    if member:
        return Constraint({LAMBDA: 1, key: -1}, 1, ("member", key))
    return Constraint({key: 1, LAMBDA: -1}, 0, ("nonmember", key))


def hat_family(f: Family, mode: RealizeMode) -> set[int]:
    """The set system the threshold rows encode, after the mode's complement handling."""
    mode = RealizeMode(mode)
    full = f.ground.full
    members = set(f.masks)
    if mode is RealizeMode.LITERAL:
        for bits in f.masks:
            if full & ~bits not in members:
                raise TriviallyUnrealizable(bits, f.ground)
        return members
    return members | {full & ~b for b in members}


def submodular_row_count(n: int) -> int:
    """Unordered ⊆-incomparable pairs of subsets of an ``n``-element set."""
    total = (1 << n) * ((1 << n) - 1) // 2
    comparable = 3**n - (1 << n)
    return total - comparable


def build_realizability_lp(f: Family, mode=RealizeMode.COMPLEMENTED, config: Config = DEFAULT) -> LPProblem:
    mode = RealizeMode(mode)
    ground = f.ground
    if ground.k > config.lp_max_k:
        raise LPBudgetError(f"k={ground.k} exceeds the LP cap lp_max_k={config.lp_max_k}")
    n = ground.n
    if submodular_row_count(n) > config.lp_row_budget:
        raise LPBudgetError(
            f"{submodular_row_count(n)} submodularity rows exceed lp_row_budget={config.lp_row_budget}"
        )
    hat = hat_family(f, mode)
    full = ground.full

    classes = sorted({complement_class(b, full) for b in range(1 << n)})
    variables = classes + [LAMBDA]
    rows = []
    for key in classes:
        if key == 0:
            continue
        rows.append(threshold_row(ground, key, key in hat))
    for a in range(1 << n):
        for b in range(a + 1, 1 << n):
            if a & ~b == 0 or b & ~a == 0:
                continue
            rows.append(submodular_row(ground, a, b))
    return LPProblem(ground, mode, variables, rows)


@dataclass
class FarkasCertificate:
    multipliers: list[Fraction]

    def support(self) -> list[int]:
        return [i for i, y in enumerate(self.multipliers) if y]


@dataclass
class Feasible:
    assignment: dict

    @property
    def lam(self) -> Fraction:
        return self.assignment[LAMBDA]


@dataclass
class Infeasible:
    certificate: FarkasCertificate


@dataclass
class BudgetExhausted:
    pivots: int


LPOutcome = Union[Feasible, Infeasible, BudgetExhausted]


def verify_farkas(p: LPProblem, c: FarkasCertificate) -> bool:
    if len(c.multipliers) != len(p.constraints):
        return False
    total: dict = {}
    rhs = Fraction(0)
    for y, row in zip(c.multipliers, p.constraints):
        y = Fraction(y)
        if y < 0:
            return False
        if not y:
            continue
        for v, a in row.coeffs.items():
            total[v] = total.get(v, 0) + y * a
        rhs += y * row.rhs
    return all(v == 0 for v in total.values()) and rhs > 0


def check_assignment(p: LPProblem, x: dict) -> list[int]:
    """Indices of rows the assignment violates."""
    return [i for i, row in enumerate(p.constraints) if not row.holds(x)]


class _PhaseOne:
    """Revised simplex on  M y + art = e,  y, art >= 0,  min sum(art).

    Columns of ``M`` are the constraints ``(coeffs, rhs)``; ``e`` is zero except
    for a 1 in the rhs row.  A zero optimum gives Farkas multipliers ``y``; a
    positive optimum leaves duals ``pi`` with ``pi_rhs > 0`` and
    ``coeffs . pi_x + rhs * pi_rhs <= 0`` for every row, so ``x = -pi_x / pi_rhs``
    satisfies the original system.

    ``rule="dantzig"`` enters the column with the largest reduced-cost violation
    and breaks ratio ties lexicographically; ``rule="bland"`` uses smallest
    indices for both.  Either combination cannot cycle.
    """

    def __init__(self, p: LPProblem, pivot_budget: int, rule: str = "dantzig") -> None:
        if rule not in ("dantzig", "bland"):
            raise ValueError(f"unknown pivot rule {rule!r}")
        self.p = p
        self.rule = rule
        self.var_pos = {v: i for i, v in enumerate(p.variables)}
        self.dim = len(p.variables) + 1
        rhs_row = self.dim - 1

        seen: dict = {}
        self.cols: list[tuple[list[int], list[int]]] = []
        self.col_row: list[int] = []
        for i, row in enumerate(p.constraints):
            entries = sorted((self.var_pos[v], int(a)) for v, a in row.coeffs.items() if a)
            if row.rhs:
                entries.append((rhs_row, int(row.rhs)))
            if not entries:
                continue
            key = tuple(entries)
            if key in seen:
                continue
            seen[key] = i
            self.cols.append(([e[0] for e in entries], [e[1] for e in entries]))
            self.col_row.append(i)
        self.m = len(self.cols)
        self.pivot_budget = pivot_budget
        self.pivots = 0

    def dense(self, j: int) -> dict:
        if j < self.m:
            idx, val = self.cols[j]
            return dict(zip(idx, val))
        return {j - self.m: 1}

    def _price(self, ipi: list[int], denom: int, basis: list[int]) -> Optional[int]:
        m = self.m
        best, entering = 0, None
        for j in range(m):
            idx, val = self.cols[j]
            s = 0
            for a, b in zip(idx, val):
                s += ipi[a] * b
            if s > best:
                if self.rule == "bland":
                    return j
                best, entering = s, j
        in_basis = set(basis)
        for r in range(self.dim):
            s = ipi[r] - denom
            if m + r not in in_basis and s > best:
                if self.rule == "bland":
                    return m + r
                best, entering = s, m + r
        return entering

    def _leave(self, w, xb, binv, basis) -> Optional[int]:
        best_ratio, ties = None, []
        for r in range(self.dim):
            if w[r] > 0:
                ratio = xb[r] / w[r]
                if best_ratio is None or ratio < best_ratio:
                    best_ratio, ties = ratio, [r]
                elif ratio == best_ratio:
                    ties.append(r)
        if not ties:
            return None
        if len(ties) == 1:
            return ties[0]
        if self.rule == "bland":
            return min(ties, key=lambda r: basis[r])
        # lexicographic minimum of rows of B^-1 scaled by 1/w_r
        for c in range(self.dim):
            col_best = min(binv[r][c] / w[r] for r in ties)
            ties = [r for r in ties if binv[r][c] / w[r] == col_best]
            if len(ties) == 1:
                break
        return ties[0]

    def run(self):
        dim, m = self.dim, self.m
        one, zero = Fraction(1), Fraction(0)
        binv = [[one if r == c else zero for c in range(dim)] for r in range(dim)]
        basis = [m + r for r in range(dim)]
        xb = [zero] * dim
        xb[dim - 1] = one

        while True:
            pi = [zero] * dim
            for r in range(dim):
                if basis[r] >= m:
                    row = binv[r]
                    for c in range(dim):
                        if row[c]:
                            pi[c] += row[c]
            denom = 1
            for v in pi:
                denom = denom * v.denominator // math.gcd(denom, v.denominator)
            ipi = [int(v * denom) for v in pi]

            entering = self._price(ipi, denom, basis)
            if entering is None:
                objective = sum((xb[r] for r in range(dim) if basis[r] >= m), zero)
                return objective, basis, xb, pi

            if self.pivots >= self.pivot_budget:
                return None
            self.pivots += 1

            col = self.dense(entering)
            w = [sum((binv[r][c] * a for c, a in col.items()), zero) for r in range(dim)]
            leave = self._leave(w, xb, binv, basis)
            if leave is None:
                raise RuntimeError("phase-one objective unbounded; cannot happen")
            if self.pivots % 100 == 0:
                log.debug("pivot %d, entering %d, phase-one objective %s", self.pivots, entering,
                          sum((xb[r] for r in range(dim) if basis[r] >= m), zero))

            piv = w[leave]
            prow = [v / piv for v in binv[leave]]
            nz = [c for c in range(dim) if prow[c]]
            xl = xb[leave] / piv
            for r in range(dim):
                if r == leave or not w[r]:
                    continue
                f = w[r]
                row = binv[r]
                for c in nz:
                    row[c] -= f * prow[c]
                xb[r] -= f * xl
            binv[leave] = prow
            xb[leave] = xl
            basis[leave] = entering


def _violations(p: LPProblem, x: dict) -> list[tuple[Fraction, int]]:
    """``(slack, row)`` for each violated row, most violated first."""
    denom = 1
    for v in x.values():
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    ix = {k: int(v * denom) for k, v in x.items()}
    out = []
    for i, row in enumerate(p.constraints):
        lhs = 0
        for v, a in row.coeffs.items():
            lhs += a * ix[v]
        gap = lhs - row.rhs * denom
        if gap < 0:
            out.append((Fraction(gap, denom), i))
    out.sort()
    return out


def _solve_direct(p: LPProblem, pivot_budget: int, rule: str):
    solver = _PhaseOne(p, pivot_budget, rule)
    result = solver.run()
    if result is None:
        return BudgetExhausted(solver.pivots), solver.pivots
    objective, basis, xb, pi = result
    if objective == 0:
        y = [Fraction(0)] * len(p.constraints)
        for r, j in enumerate(basis):
            if j < solver.m and xb[r]:
                y[solver.col_row[j]] += xb[r]
        return Infeasible(FarkasCertificate(y)), solver.pivots
    scale = pi[-1]
    if scale <= 0:
        raise RuntimeError("phase-one duals do not yield a witness")
    return Feasible({v: -pi[i] / scale for i, v in enumerate(p.variables)}), solver.pivots


def solve_feasibility(
    p: LPProblem, config: Config = DEFAULT, rule: str = "dantzig", batch: int = 50
) -> LPOutcome:
    """Decide ``coeffs . x >= rhs`` for every row, exactly.

    Rows are brought in lazily: the threshold rows first, then after each solve
    the ``batch`` rows the current witness violates most.  An infeasible subset
    already yields a certificate for the whole system; a witness violating no
    row is a solution of the whole system.
    """
    active = [i for i, c in enumerate(p.constraints) if c.tag[0] != "submodular"]
    if len(active) == len(p.constraints) or len(p.constraints) <= 4 * batch:
        active = list(range(len(p.constraints)))
    pivots = 0
    while True:
        sub = LPProblem(p.ground, p.mode, p.variables, [p.constraints[i] for i in active], partial=True)
        outcome, used = _solve_direct(sub, config.lp_pivot_budget - pivots, rule)
        pivots += used
        if isinstance(outcome, BudgetExhausted):
            return BudgetExhausted(pivots)
        if isinstance(outcome, Infeasible):
            y = [Fraction(0)] * len(p.constraints)
            for mult, i in zip(outcome.certificate.multipliers, active):
                y[i] += mult
            cert = FarkasCertificate(y)
            if not verify_farkas(p, cert):
                raise RuntimeError("extracted Farkas certificate failed verification")
            return Infeasible(cert)
        violated = _violations(p, outcome.assignment)
        log.debug("%d active rows, %d violated, %d pivots so far", len(active), len(violated), pivots)
        if not violated:
            if check_assignment(p, outcome.assignment):
                raise RuntimeError("witness re-check disagrees with the violation scan")
            return outcome
        active = sorted(set(active) | {i for _, i in violated[:batch]})


@dataclass
class Rejected:
    reason: str
    witness: int


def realize(f: Family, mode=RealizeMode.COMPLEMENTED, config: Config = DEFAULT):
    """Build and solve; returns ``(problem, outcome)`` or ``(None, Rejected)``."""
    try:
        p = build_realizability_lp(f, mode, config)
    except TriviallyUnrealizable as exc:
        return None, Rejected(str(exc), exc.witness)
    return p, solve_feasibility(p, config)


def hand_certificate(f: Family, mode=RealizeMode.COMPLEMENTED) -> tuple[LPProblem, FarkasCertificate]:
    """The chained-difference certificate as an explicit system with unit multipliers.

    Only the rows the certificate uses are materialized; every threshold row is
    derived from the family (after the mode's complement handling), so the
    certificate only verifies if the ``V_i`` are members and ``{v_1}``, ``{v_2}``
    and every ``W_i`` are not.
    """
    from .certificate import build_certificate

    ground = f.ground
    cert = build_certificate(ground.k)
    full = ground.full
    hat = f.masks if RealizeMode(mode) is RealizeMode.LITERAL else None
    hat = set(hat) if hat is not None else set(f.masks) | {full & ~b for b in f.masks}

    rows = [difference_row(ground, a.bits, b.bits) for a, b in cert.pairs]
    for term in cert.summed.terms:
        rows.append(threshold_row(ground, term.set.bits, term.set.bits in hat))
    variables = sorted({v for r in rows for v in r.coeffs if v != LAMBDA}) + [LAMBDA]
    p = LPProblem(ground, RealizeMode(mode), variables, rows, partial=True)
    return p, FarkasCertificate([Fraction(1)] * len(rows))


def transcribe(full_problem: LPProblem, partial: LPProblem, c: FarkasCertificate) -> FarkasCertificate:
    """Carry multipliers from a partial system onto the matching rows of a full one."""
    y = [Fraction(0)] * len(full_problem.constraints)
    for mult, row in zip(c.multipliers, partial.constraints):
        i = full_problem.row(row.tag)
        if full_problem.constraints[i].coeffs != row.coeffs or full_problem.constraints[i].rhs != row.rhs:
            raise ValueError(f"row {row.label()} differs in the full problem")
        y[i] += mult
    return FarkasCertificate(y)


def outcome_doc(p: Optional[LPProblem], outcome, limit: Optional[int] = None) -> dict:
    if isinstance(outcome, Rejected):
        return {"outcome": "rejected", "reason": outcome.reason, "witness": elements(outcome.witness)}
    doc = {"mode": p.mode.value, "dimensions": p.dimensions}
    if isinstance(outcome, Feasible):
        table = [
            {"class": elements(v), "g": str(outcome.assignment[v])} for v in p.variables if v != LAMBDA
        ]
        doc.update(outcome="feasible", lam=str(outcome.lam), g=table)
    elif isinstance(outcome, Infeasible):
        support = outcome.certificate.support()
        doc.update(
            outcome="infeasible",
            support_size=len(support),
            multipliers=[
                {"row": p.constraints[i].label(), "multiplier": str(outcome.certificate.multipliers[i])}
                for i in support[:limit]
            ],
        )
    else:
        doc.update(outcome="budget-exhausted", pivots=outcome.pivots)
    return doc
