"""Ordered set families with generation tags and construction provenance."""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from dataclasses import dataclass
from typing import Iterator, Optional

from .core import ESet, GroundSet, GroundSetMismatch, elements

FORMAT_NAME = "pliable-family"
FORMAT_VERSION = 1

KINDS = ("initial", "intersection", "difference")
RULES = ("a", "b-i", "b-ii", "b-iii")


class FamilyError(ValueError):
    """Invalid family operation or malformed family document."""


@dataclass(frozen=True)
class Provenance:
    kind: str
    parent_a: Optional[int] = None
    parent_b: Optional[int] = None
    rule: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise FamilyError(f"unknown provenance kind {self.kind!r}")
        has_parents = self.parent_a is not None or self.parent_b is not None
        if self.kind == "initial":
            if has_parents or self.rule is not None:
                raise FamilyError("initial provenance takes no parents or rule")
        else:
            if self.parent_a is None or self.parent_b is None:
                raise FamilyError(f"{self.kind} provenance needs two parents")
            if self.rule not in RULES:
                raise FamilyError(f"unknown rule {self.rule!r}")
            if (self.kind == "intersection") != (self.rule == "a"):
                raise FamilyError(f"rule {self.rule!r} does not produce a {self.kind}")

    def to_doc(self) -> dict:
        doc = {"kind": self.kind}
        if self.kind != "initial":
            doc["parents"] = [self.parent_a, self.parent_b]
            doc["rule"] = self.rule
        return doc


INITIAL = Provenance("initial")


@dataclass(frozen=True)
class Member:
    bits: int
    generation: int
    provenance: Optional[Provenance] = None


class Family:
    """Members are kept in canonical order: by generation, then by bitmask."""

    def __init__(self, ground: GroundSet) -> None:
        self.ground = ground
        self.members: list[Member] = []
        self.index: dict[int, int] = {}
        self.frozen = False

    @classmethod
    def from_sets(cls, ground: GroundSet, sets, generation: int = 0) -> "Family":
        """Family of externally given sets (ESets, masks or element iterables)."""
        masks = set()
        for s in sets:
            if isinstance(s, ESet):
                if s.ground != ground:
                    raise GroundSetMismatch("set from another ground set")
                masks.add(s.bits)
            elif isinstance(s, int):
                masks.add(ground.from_bits(s).bits)
            else:
                masks.add(ground.eset(s).bits)
        f = cls(ground)
        for m in sorted(masks):
            f.insert(m, generation)
        return f

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[ESet]:
        return (ESet(m.bits, self.ground) for m in self.members)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return self.ground == other.ground and self.members == other.members

    def __repr__(self) -> str:
        return f"Family(k={self.ground.k}, size={len(self)}, generations={self.generation_sizes()})"

    @property
    def masks(self) -> list[int]:
        return [m.bits for m in self.members]

    @property
    def max_generation(self) -> int:
        return self.members[-1].generation if self.members else -1

    def generation(self, gen: int) -> list[ESet]:
        return [ESet(m.bits, self.ground) for m in self.members if m.generation == gen]

    def generation_sizes(self) -> list[int]:
        sizes = [0] * (self.max_generation + 1)
        for m in self.members:
            sizes[m.generation] += 1
        return sizes

    def eset(self, ref: int) -> ESet:
        return ESet(self.members[ref].bits, self.ground)

    def ref_of(self, s) -> Optional[int]:
        bits = self._bits(s)
        return self.index.get(bits)

    def _bits(self, s) -> int:
        if isinstance(s, ESet):
            if s.ground != self.ground:
                raise GroundSetMismatch(f"set over k={s.ground.k} tested against family over k={self.ground.k}")
            return s.bits
        return s

    def contains(self, s) -> bool:
        return self._bits(s) in self.index

    __contains__ = contains

    def insert(self, s, gen: int, prov: Optional[Provenance] = None) -> int:
        if self.frozen:
            raise FamilyError("family is frozen")
        bits = self._bits(s)
        if bits < 0 or bits > self.ground.full:
            raise FamilyError(f"bitmask {bits:#x} outside the ground set")
        if bits == 0 or bits == self.ground.full:
            raise FamilyError("the empty set and the whole ground set are never members")
        if bits in self.index:
            raise FamilyError(f"duplicate set {elements(bits)}")
        if not isinstance(gen, int) or gen < 0:
            raise FamilyError(f"generation must be a non-negative integer, got {gen!r}")
        if self.members:
            last = self.members[-1]
            if gen < last.generation:
                raise FamilyError(f"stale generation {gen} (current is {last.generation})")
            if gen == last.generation and bits < last.bits:
                raise FamilyError("members of one generation must be inserted in ascending bitmask order")
        if gen > self.max_generation + 1:
            raise FamilyError(f"generation {gen} skips generation {self.max_generation + 1}")
        if prov is not None:
            self._check_provenance(bits, gen, prov)
        self.members.append(Member(bits, gen, prov))
        self.index[bits] = len(self.members) - 1
        return len(self.members) - 1

    def _check_provenance(self, bits: int, gen: int, prov: Provenance) -> None:
        if prov.kind == "initial":
            if gen != 0:
                raise FamilyError("initial provenance only at generation 0")
            return
        if gen == 0:
            raise FamilyError("generation-0 members must have initial provenance")
        n = len(self.members)
        for p in (prov.parent_a, prov.parent_b):
            if not isinstance(p, int) or not 0 <= p < n:
                raise FamilyError(f"provenance parent {p!r} is not an existing member")
            if self.members[p].generation >= gen:
                raise FamilyError("provenance parents must come from earlier generations")
        a = self.members[prov.parent_a].bits
        b = self.members[prov.parent_b].bits
        expected = a & b if prov.kind == "intersection" else a & ~b
        if expected != bits:
            raise FamilyError(f"provenance {prov.kind} of parents does not reproduce {elements(bits)}")

    def freeze(self) -> "Family":
        self.frozen = True
        return self

    def to_doc(self) -> dict:
        sets = []
        for m in self.members:
            rec = {"elements": elements(m.bits), "generation": m.generation}
            if m.provenance is not None:
                rec["provenance"] = m.provenance.to_doc()
            sets.append(rec)
        return {"format": FORMAT_NAME, "version": FORMAT_VERSION, "k": self.ground.k, "sets": sets}

    @classmethod
    def from_doc(cls, doc) -> "Family":
        if not isinstance(doc, dict):
            raise FamilyError("family document must be an object")
        if doc.get("format", FORMAT_NAME) != FORMAT_NAME:
            raise FamilyError(f"unexpected format {doc.get('format')!r}")
        k = doc.get("k")
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise FamilyError(f"'k' must be a positive integer, got {k!r}")
        raw_sets = doc.get("sets")
        if not isinstance(raw_sets, list):
            raise FamilyError("'sets' must be a list")
        ground = GroundSet(k)

        parsed = []
        for pos, rec in enumerate(raw_sets):
            if not isinstance(rec, dict) or "elements" not in rec:
                raise FamilyError(f"set #{pos}: expected an object with 'elements'")
            elems = rec["elements"]
            if not isinstance(elems, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in elems):
                raise FamilyError(f"set #{pos}: 'elements' must be a list of integers")
            bits = 0
            for e in elems:
                if not 0 <= e < ground.n:
                    raise FamilyError(f"set #{pos}: element id {e} out of range for k={k}")
                bits |= 1 << e
            gen = rec.get("generation", 0)
            if not isinstance(gen, int) or isinstance(gen, bool):
                raise FamilyError(f"set #{pos}: 'generation' must be an integer")
            parsed.append((pos, bits, gen, rec.get("provenance")))

        has_prov = any(p is not None for _, _, _, p in parsed)
        if not has_prov:
            parsed.sort(key=lambda r: (r[2], r[1]))

        f = cls(ground)
        doc_to_ref: dict[int, int] = {}
        for pos, bits, gen, raw_prov in parsed:
            if bits == 0 or bits == ground.full:
                warnings.warn(f"set #{pos} is {'empty' if bits == 0 else 'the whole ground set'}; dropped")
                continue
            if bits in f.index:
                raise FamilyError(f"set #{pos}: duplicate set {elements(bits)}")
            prov = _parse_provenance(raw_prov, pos, doc_to_ref)
            doc_to_ref[pos] = f.insert(bits, gen, prov)
        return f

    def dumps(self) -> str:
        return json.dumps(self.to_doc(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Family":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FamilyError(f"not a JSON document: {exc}") from None
        return cls.from_doc(doc)

    def save(self, path) -> None:
        write_atomic(path, self.dumps())

    @classmethod
    def load(cls, path) -> "Family":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _parse_provenance(raw, pos: int, doc_to_ref: dict) -> Optional[Provenance]:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise FamilyError(f"set #{pos}: 'provenance' must be an object")
    kind = raw.get("kind")
    if kind == "initial":
        return Provenance("initial")
    parents = raw.get("parents")
    if not isinstance(parents, list) or len(parents) != 2:
        raise FamilyError(f"set #{pos}: provenance needs exactly two parents")
    refs = []
    for p in parents:
        if p not in doc_to_ref:
            raise FamilyError(f"set #{pos}: provenance parent {p!r} is not an earlier member")
        refs.append(doc_to_ref[p])
    try:
        return Provenance(kind, refs[0], refs[1], raw.get("rule"))
    except FamilyError as exc:
        raise FamilyError(f"set #{pos}: {exc}") from None


def write_atomic(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
