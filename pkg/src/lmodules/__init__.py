"""Exact combinatorial L-modules on split root systems.

Root data and Kostant's theorem, L-modules with cones and truncations,
weighted and intersection cohomology modules, micro-support, and the
mixed decomposition into weighted cohomology building blocks.
"""

from .builders import check_local_formulas, intersection_module, weighted_module
from .kostant import EtaOrder, Irreducible, kostant
from .lmod import LMod, LMorphism, Slot, cocone, cone, local_cohomology, local_cohomology_supports, validate
from .microsupport import self_contragredient, strong_ms, type_eta, weak_ms
from .mixer import mix, mix_ok, verify_ic_wc
from .roots import RootDatum, build
from .serialize import lmod_from_json, lmod_to_json

__version__ = "0.1.0"

__all__ = [
    "EtaOrder", "Irreducible", "LMod", "LMorphism", "RootDatum", "Slot", "build",
    "check_local_formulas", "cocone", "cone", "intersection_module", "kostant",
    "lmod_from_json", "lmod_to_json", "local_cohomology", "local_cohomology_supports",
    "mix", "mix_ok", "self_contragredient", "strong_ms", "type_eta", "validate",
    "verify_ic_wc", "weak_ms", "weighted_module",
]
