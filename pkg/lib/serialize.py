"""
JSON codecs for the inputs the CLI reads and the values it prints.

Pages, morphisms, real complexes and tables carry their own ``to_json`` /
``from_json``; this module covers involutive modules, G-complexes, exact
templates and their resolutions, plus the canonical encoding used for
cache keys.
"""

import json

from .chain import Determined, ExactTemplate, GradedPieces, Known, Undetermined, Unknown
from .errors import InputError
from .gmod import GComplex, InvolutiveModule
from .znf import FGAbelianGroup, GroupMap, IntegerMatrix, Presentation, standardize


def canonical_dumps(value) -> str:
    """Key-sorted compact JSON; equal values give equal strings."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _matrix(rows, cols: int) -> IntegerMatrix:
    if not rows:
        return IntegerMatrix.zeros(0, cols)
    return IntegerMatrix.from_rows(rows, cols)


def presentation_from_json(data: dict) -> Presentation:
    """``{"generators": n, "relations": [[...], ...]}`` with one relation vector per list."""
    n = int(data["generators"])
    rels = data.get("relations", [])
    return Presentation(n, IntegerMatrix.from_columns(rels, n))


def presentation_to_json(p: Presentation) -> dict:
    return {"generators": p.generators, "relations": p.relations.transpose().to_json()}


def module_from_json(data: dict) -> InvolutiveModule:
    """
    An involutive module.

    Either ``{"generators", "relations", "sigma"}`` with sigma given by rows,
    or a named standard module ``{"kind": "trivial"|"sign"|"regular"|"cyclic", ...}``.
    """
    try:
        kind = data.get("kind")
        if kind == "trivial":
            return InvolutiveModule.trivial(int(data.get("rank", 1)))
        if kind == "sign":
            return InvolutiveModule.sign(int(data.get("rank", 1)))
        if kind == "regular":
            return InvolutiveModule.regular()
        if kind == "cyclic":
            return InvolutiveModule.cyclic(int(data["m"]), bool(data.get("inversion", False)))
        if kind is not None:
            raise InputError(f"unknown module kind {kind!r}")
        p = presentation_from_json(data)
        return InvolutiveModule.from_matrix(p, _matrix(data["sigma"], p.generators))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed module JSON ({type(e).__name__}: {e})")


def module_to_json(m: InvolutiveModule) -> dict:
    out = presentation_to_json(m.underlying)
    out["sigma"] = m.sigma.matrix.to_json()
    return out


def gcomplex_from_json(data: dict) -> GComplex:
    """
    ``{"lowest_degree": L, "terms": [module, ...], "differentials": [rows, ...]}``.

    A bare module is read as a complex concentrated in degree 0.
    """
    if "terms" not in data:
        return GComplex.concentrated(module_from_json(data))
    terms = [module_from_json(t) for t in data["terms"]]
    raw = data.get("differentials", [])
    if len(raw) != max(len(terms) - 1, 0):
        raise InputError(f"{len(terms)} terms need {max(len(terms) - 1, 0)} differentials, got {len(raw)}")
    try:
        matrices = []
        for k, rows in enumerate(raw):
            if rows:
                matrices.append(IntegerMatrix.from_rows(rows, terms[k].generators))
            else:
                matrices.append(IntegerMatrix.zeros(terms[k + 1].generators, terms[k].generators))
    except (TypeError, ValueError) as e:
        raise InputError(f"malformed differential ({type(e).__name__}: {e})")
    return GComplex.from_matrices(int(data.get("lowest_degree", 0)), terms, matrices)


def gcomplex_to_json(c: GComplex) -> dict:
    return {
        "lowest_degree": c.lowest_degree,
        "terms": [module_to_json(t) for t in c.terms],
        "differentials": [d.matrix.to_json() for d in c.differentials],
    }


# ---------------------------------------------------------------------------
# Exact templates
# ---------------------------------------------------------------------------

def template_from_json(data: dict) -> ExactTemplate:
    """
    ``{"slots": [{"group": {rank, torsion}} | {"unknown": label}], "maps": [null | rows]}``.

    Map matrices are written in the standard generators of their end groups.
    """
    try:
        slots = []
        for s in data["slots"]:
            if "unknown" in s:
                slots.append(Unknown(str(s["unknown"])))
            else:
                slots.append(Known.of(FGAbelianGroup.from_json(s["group"])))
        maps = []
        raw = data.get("maps", [None] * max(len(slots) - 1, 0))
        for k, rows in enumerate(raw):
            if rows is None:
                maps.append(None)
                continue
            src, dst = slots[k], slots[k + 1]
            if not (isinstance(src, Known) and isinstance(dst, Known)):
                raise InputError(f"map {k} touches an unknown slot")
            matrix = _matrix(rows, src.group.generators) if rows else \
                IntegerMatrix.zeros(dst.group.generators, src.group.generators)
            maps.append(GroupMap(src.group, dst.group, matrix))
        return ExactTemplate(slots, maps)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed template JSON ({type(e).__name__}: {e})")


def template_to_json(t: ExactTemplate) -> dict:
    slots = []
    for s in t.slots:
        if isinstance(s, Unknown):
            slots.append({"unknown": s.label})
        else:
            slots.append({"group": s.group.group.to_json()})
    maps = []
    for m in t.maps:
        if m is None:
            maps.append(None)
            continue
        to_std, _ = standardize(m.target)
        _, from_std = standardize(m.source)
        maps.append((to_std @ m.matrix @ from_std).to_json())
    return {"slots": slots, "maps": maps}


def resolution_to_json(r) -> dict:
    if isinstance(r, Determined):
        return {"status": "determined", "group": r.group.to_json()}
    if isinstance(r, GradedPieces):
        return {"status": "graded", **r.to_json()}
    if isinstance(r, Undetermined):
        return {"status": "undetermined", "reason": r.reason}
    raise TypeError(f"not a resolution: {r!r}")
