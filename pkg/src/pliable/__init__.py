"""Pliable set families over the hypercube, their structural checks, and an exact
realizability oracle for symmetric submodular sublevel families."""

__version__ = "0.1.0"

from .core import ESet, GroundSet, coordinate_set, crosses, set_algebra, unit_index, vec_of_indexset
from .family import Family, Provenance
from .construct import TieBreakPolicy, construct_family

__all__ = [
    "ESet",
    "Family",
    "GroundSet",
    "Provenance",
    "TieBreakPolicy",
    "construct_family",
    "coordinate_set",
    "crosses",
    "set_algebra",
    "unit_index",
    "vec_of_indexset",
]
