"""JSON encoding of L-modules and mixing certificates.

Schema::

    {"root_system": "A2",
     "poset": [0, 1, 2, 3],
     "modules": {"3": [{"label": "x0", "degree": 0, "highest_weight": [0, 0]}], ...},
     "morphisms": {"0,3": [{"src_slot": "x0", "src_w": [0, 1], "dst_slot": "x5",
                            "scalar": "-1/1"}], ...}}

``"P,Q"`` holds the entries of ``f_PQ``; ``src_w`` is the reduced word
(0-based simple reflections, leftmost applied last) of the Kostant component
of the source slot that is mapped.  Rationals are always written ``"num/den"``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .kostant import Irreducible, kostant_element
from .lmod import LMod, LModError, LMorphism, Slot
from .roots import build, popcount


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text))


def canonical(M: LMod) -> LMod:
    """Reorder slots stratum by stratum (poset order), keeping their relative order."""
    order = sorted(range(len(M.slots)), key=lambda i: (M.poset.index(M.slots[i].parabolic), i))
    index = {old: new for new, old in enumerate(order)}
    D = {(index[t], index[s]): v for (t, s), v in M.D.items()}
    return LMod(M.datum, M.poset, [M.slots[i] for i in order], D)


def lmod_to_dict(M: LMod) -> dict:
    modules = {}
    for P in M.poset:
        modules[str(P)] = [{"label": s.label, "degree": s.degree, "highest_weight": list(s.irr.weight)}
                           for s in M.slots if s.parabolic == P]
    morphisms = {}
    for P in M.poset:
        for Q in M.poset:
            block = M.block(P, Q)
            if block:
                morphisms[f"{P},{Q}"] = [
                    {"src_slot": M.slots[s].label, "src_w": list(w), "dst_slot": M.slots[t].label,
                     "scalar": fraction_str(v)} for s, w, t, v in block]
    return {"root_system": M.datum.label, "poset": list(M.poset), "modules": modules,
            "morphisms": morphisms}


def lmod_from_dict(data: dict) -> LMod:
    try:
        datum = build(data["root_system"])
        poset = [int(P) for P in data["poset"]]
        order = sorted(set(poset), key=lambda q: (popcount(q), q))
        slots, by_label = [], {}
        for P in order:
            for entry in data["modules"].get(str(P), []):
                label = entry["label"]
                if label in by_label:
                    raise LModError(f"duplicate slot label {label!r}")
                by_label[label] = len(slots)
                slots.append(Slot(label, Irreducible(P, tuple(entry["highest_weight"])), int(entry["degree"])))
        extra = set(data["modules"]) - {str(P) for P in order}
        if extra:
            raise LModError(f"modules given for strata outside the poset: {sorted(extra)}")
        D = {}
        for key, entries in data.get("morphisms", {}).items():
            P, Q = (int(x) for x in key.split(","))
            for e in entries:
                s, t = by_label[e["src_slot"]], by_label[e["dst_slot"]]
                if slots[s].parabolic != Q or slots[t].parabolic != P:
                    raise LModError(f"entry in block {key} connects slots on other strata")
                w = kostant_element(datum, slots[s].irr, slots[t].irr)
                if w is None or list(w.word) != [int(i) for i in e["src_w"]]:
                    raise LModError(f"entry in block {key} names the wrong Kostant component")
                D[(t, s)] = parse_fraction(e["scalar"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, LModError):
            raise
        raise LModError(f"malformed L-module JSON: {exc}") from exc
    return LMod(datum, poset, slots, D)


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=True) + "\n"


def lmod_to_json(M: LMod) -> str:
    return dumps(lmod_to_dict(M))


def lmod_from_json(text: str) -> LMod:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LModError(f"invalid JSON: {exc}") from exc
    return lmod_from_dict(data)


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return hashlib.sha256(text).hexdigest()[:16]


def morphism_entries(phi: LMorphism) -> list[dict]:
    out = []
    for (t, s), v in sorted(phi.entries.items()):
        src, dst = phi.source.slots[s], phi.target.slots[t]
        w = kostant_element(phi.source.datum, src.irr, dst.irr)
        out.append({"src_slot": src.label, "src_w": list(w.word), "dst_slot": dst.label,
                    "scalar": fraction_str(v)})
    return out


def mixed_to_dict(data, rank: int, include_modules: bool = False) -> dict:
    blocks = []
    n = len(data.blocks)
    for k, b in enumerate(data.blocks):
        entry = {"index": n - k, "parabolic": b.parabolic, "highest_weight": list(b.irr.weight),
                 "degree": b.degree,
                 "direction": "into M_i" if data.eta == "mu" else "out of M_i",
                 "morphism": morphism_entries(b.morphism)}
        if include_modules:
            entry["building_block"] = lmod_to_dict(b.building_block)
            entry["result"] = lmod_to_dict(b.after)
        blocks.append(entry)
    checks = {k: (v if not isinstance(v, list) else list(v)) for k, v in data.checks.items()}
    return {"eta": data.eta, "steps": len(data.blocks), "blocks": blocks, "checks": checks}
