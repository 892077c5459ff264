"""Command-line front end.

Exit codes: 0 when the property holds / the system is feasible / a partition
exists, 1 when refuted / infeasible / no partition, 2 on input or budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import __version__
from .certificate import build_certificate, verify_certificate
from .checkers import (
    SearchBudgetExceeded,
    conflict_witness,
    is_pliable,
    is_structurally_submodular,
    is_uncrossable,
    partition_uncrossable,
    satisfies_gamma,
    validate_construction,
)
from .config import Config
from .construct import ConstructionBudgetExceeded, TieBreakPolicy, construct_family
from .core import elements, units_in
from .decompose import ExpressionError, express, verify_expression
from .family import Family, FamilyError, write_atomic
from .lp import Feasible, Infeasible, LPBudgetError, Rejected, outcome_doc, realize, verify_farkas

CHECKS = {
    "pliable": is_pliable,
    "structural": is_structurally_submodular,
    "uncrossable": is_uncrossable,
    "gamma": satisfies_gamma,
    "lemmas": validate_construction,
}

WITNESS_LIMIT = 20


class InputError(Exception):
    pass


def make_report(command: str, inputs: dict, outcome: str, payload: dict) -> dict:
    return {"command": command, "inputs": inputs, "outcome": outcome, "payload": payload, "version": __version__}


def _load(path: str) -> Family:
    try:
        return Family.load(path)
    except OSError as exc:
        raise InputError(f"cannot read family file {path}: {exc.strerror}") from None
    except (FamilyError, ValueError) as exc:
        raise InputError(f"invalid family file {path}: {exc}") from None


def _fmt(bits_list) -> str:
    return "{" + ",".join(map(str, bits_list)) + "}"


def cmd_construct(args, config: Config):
    policy = TieBreakPolicy.parse(args.tiebreak)
    try:
        f = construct_family(args.k, policy, config)
    except ConstructionBudgetExceeded as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    inputs = {"k": args.k, "policy": policy.value}
    payload = {"size": len(f), "generation_sizes": f.generation_sizes()}
    if args.out:
        f.save(args.out)
        payload["family_file"] = args.out
    else:
        payload["family"] = f.to_doc()
    lines = [f"k={args.k} policy={policy.value}: {len(f)} sets"]
    lines += [f"  F_{g}: {n} sets" for g, n in enumerate(f.generation_sizes())]
    if not args.out:
        for g in range(len(f.generation_sizes())):
            lines.append(f"  F_{g} = " + " ".join(_fmt(list(s)) for s in f.generation(g)))
    return 0, make_report("construct", inputs, "constructed", payload), lines


def cmd_compare(args, config: Config):
    try:
        fmin = construct_family(args.k, TieBreakPolicy.MIN, config)
        fmax = construct_family(args.k, TieBreakPolicy.MAX, config)
    except (ConstructionBudgetExceeded, ValueError) as exc:
        raise InputError(str(exc)) from None
    a, b = set(fmin.masks), set(fmax.masks)
    same = a == b
    payload = {
        "sizes": {"min": len(fmin), "max": len(fmax)},
        "identical": same,
        "only_min": [elements(x) for x in sorted(a - b)][:WITNESS_LIMIT],
        "only_max": [elements(x) for x in sorted(b - a)][:WITNESS_LIMIT],
    }
    lines = [f"k={args.k}: min={len(fmin)} sets, max={len(fmax)} sets, identical={same}"]
    return (0 if same else 1), make_report("compare", {"k": args.k}, "identical" if same else "different", payload), lines


def cmd_check(args, config: Config):
    f = _load(args.family)
    try:
        report = CHECKS[args.property](f, limit=WITNESS_LIMIT)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    inputs = {"family": args.family, "property": args.property}
    lines = [f"{args.property}: {'ok' if report.ok else 'violated'} ({report.count} violations)"]
    for w in report.witnesses:
        desc = " , ".join(_fmt(elements(s)) for s in w.sets)
        miss = "; ".join(f"{n}={_fmt(elements(b))}" for n, b in w.missing)
        lines.append(f"  {desc}" + (f"  missing {miss}" if miss else "") + (f"  {w.note}" if w.note else ""))
    outcome = "holds" if report.ok else "refuted"
    return (0 if report.ok else 1), make_report("check", inputs, outcome, report.to_doc()), lines


def cmd_certify(args, config: Config):
    try:
        cert = build_certificate(args.k)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.family:
        f = _load(args.family)
    else:
        try:
            f = construct_family(args.k, TieBreakPolicy.MIN, config)
        except (ConstructionBudgetExceeded, ValueError) as exc:
            raise InputError(f"cannot construct the family to certify against: {exc}") from None
    try:
        report = verify_certificate(f, cert)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    membership = {f"W{i}": w.bits in f.index for i, w in cert.w_sets.items()}
    payload = {"certificate": cert.to_doc(), "verification": report.to_doc(), "w_members": membership}
    lines = [f"k={args.k}: {2 * args.k - 3} crossing pairs"]
    for a, b in cert.pairs:
        lines.append(
            f"  {_fmt(list(a))} , {_fmt(list(b))}  ->  -{_fmt(list(a - b))} -{_fmt(list(b - a))}"
        )
    for i, w in cert.w_sets.items():
        lines.append(f"  W{i} = {_fmt(list(w))}  member: {membership[f'W{i}']}")
    lines.append(f"  sum: {cert.summed!r} >= 0")
    lines.append(f"verification: {'ok' if report.ok else 'failed'}")
    for w in report.witnesses:
        lines.append(f"  {w.note}")
    outcome = "holds" if report.ok else "refuted"
    inputs = {"k": args.k, "family": args.family}
    return (0 if report.ok else 1), make_report("certify", inputs, outcome, payload), lines


def cmd_realize(args, config: Config):
    f = _load(args.family)
    try:
        p, outcome = realize(f, args.mode, config)
    except LPBudgetError as exc:
        raise InputError(str(exc)) from None
    doc = outcome_doc(p, outcome, limit=None)
    inputs = {"family": args.family, "mode": args.mode}
    if isinstance(outcome, Rejected):
        return 1, make_report("realize", inputs, "rejected", doc), [outcome.reason]
    lines = [f"mode={args.mode} dimensions={p.dimensions}"]
    if isinstance(outcome, Feasible):
        lines.append(f"feasible: lam={outcome.lam}")
        for row in doc["g"]:
            lines.append(f"  g({_fmt(row['class'])}) = {row['g']}")
        return 0, make_report("realize", inputs, "feasible", doc), lines
    if isinstance(outcome, Infeasible):
        ok = verify_farkas(p, outcome.certificate)
        doc["certificate_verified"] = ok
        lines.append(f"infeasible: Farkas certificate on {doc['support_size']} rows, verified={ok}")
        for row in doc["multipliers"]:
            lines.append(f"  {row['multiplier']} x {row['row']}")
        return 1, make_report("realize", inputs, "infeasible", doc), lines
    lines.append(f"pivot budget exhausted after {outcome.pivots} pivots")
    return 2, make_report("realize", inputs, "budget-exhausted", doc), lines


def cmd_partition(args, config: Config):
    f = _load(args.family)
    inputs = {"family": args.family, "d": args.d}
    try:
        blocks = partition_uncrossable(f, args.d, config)
    except SearchBudgetExceeded as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload: dict = {}
    try:
        payload["conflicts"] = [c.to_doc() for c in conflict_witness(f)]
    except ValueError:
        payload["conflicts"] = None
    if blocks is None:
        lines = [f"no partition into at most {args.d} uncrossable families"]
        return 1, make_report("partition", inputs, "none", payload), lines
    payload["blocks"] = [[elements(f.members[r].bits) for r in b] for b in blocks]
    lines = [f"partition into {len(blocks)} uncrossable families"]
    for n, b in enumerate(payload["blocks"]):
        lines.append(f"  block {n}: " + " ".join(_fmt(s) for s in b))
    return 0, make_report("partition", inputs, "found", payload), lines


def cmd_express(args, config: Config):
    f = _load(args.family)
    try:
        ids = [int(x) for x in args.set.split(",") if x.strip()]
        s = f.ground.eset(ids)
    except ValueError as exc:
        raise InputError(f"bad --set value {args.set!r}: {exc}") from None
    inputs = {"family": args.family, "set": sorted(ids)}
    try:
        tree = express(f, s)
    except ExpressionError as exc:
        raise InputError(str(exc)) from None
    check = verify_expression(tree, s, units_in(s.bits, f.ground.k)[0])
    payload = {"text": tree.text(), "tree": tree.to_doc(), "verified": check.ok, "reasons": check.reasons}
    lines = [f"{_fmt(list(s))} = {tree.text()}", f"verified: {check.ok}"] + [f"  {r}" for r in check.reasons]
    return (0 if check.ok else 1), make_report("express", inputs, "expressed", payload), lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pliable", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--out", help="write the report (the family file, for construct) here")
    common.add_argument("--k-cap", type=int)
    common.add_argument("--family-member-budget", type=int)
    common.add_argument("--lp-max-k", type=int)
    common.add_argument("--lp-row-budget", type=int)
    common.add_argument("--lp-pivot-budget", type=int)
    common.add_argument("--partition-node-budget", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("construct", parents=[common], help="build the family for a given k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tiebreak", choices=("min", "max"), default="min")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("compare", parents=[common], help="compare both tie-break policies")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check", parents=[common], help="check a family property")
    p.add_argument("--family", required=True)
    p.add_argument("--property", choices=sorted(CHECKS), required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", parents=[common], help="build and verify the impossibility certificate")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--family", help="family file to verify against (default: construct it)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("realize", parents=[common], help="decide sublevel realizability exactly")
    p.add_argument("--family", required=True)
    p.add_argument("--mode", choices=("literal", "complemented"), default="complemented")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("partition", parents=[common], help="search for an uncrossable partition")
    p.add_argument("--family", required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("express", parents=[common], help="rewrite a member as nested differences")
    p.add_argument("--family", required=True)
    p.add_argument("--set", required=True, help="comma-separated element ids")
    p.set_defaults(func=cmd_express)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = Config.from_env(
            k_cap=args.k_cap,
            family_member_budget=args.family_member_budget,
            lp_max_k=args.lp_max_k,
            lp_row_budget=args.lp_row_budget,
            lp_pivot_budget=args.lp_pivot_budget,
            partition_node_budget=args.partition_node_budget,
        )
        code, report, lines = args.func(args, config)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.format == "structured":
        text = json.dumps(report, indent=1, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.out and args.command != "construct":
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
