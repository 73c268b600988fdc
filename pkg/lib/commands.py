"""
Command implementations behind kr.py.

Each command is a plain function of its parameters returning a JSON-ready
value. ``run_job`` wraps one call into the result dict the CLI prints:
{"success", "command", "params", "result", "error", "exit_code"}.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Optional

from .cache import ResultCache
from .errors import InputError, KRError, MismatchAt, UnsupportedParams
from .gmod import group_cohomology, hypercohomology
from .krtables import (
    curve_affine_kr,
    curve_projective_kr,
    graded_order,
    mod_m_table,
    mv_surface_kr,
    simplicial_kr,
    sphere_ko,
    sphere_ko_mod,
)
from .realcx import graph_model, surface_free
from .serialize import gcomplex_from_json
from .specseq import Page, abutment_graded, compare, morphism_from_json, run_to_infinity, turn_page
from .znf import FGAbelianGroup, iso_check

logger = logging.getLogger(__name__)

# parameters naming input files; the cache key uses their content digest
FILE_PARAMS = {
    "ss-run": ("page",),
    "ss-compare": ("morphism", "source", "target", "maps"),
    "gcoh": ("module",),
}


def parse_degrees(text: str) -> list:
    """'0..8' → [0, ..., 8]; '-3,-1,0' → [-3, -1, 0]."""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            step = 1 if hi >= lo else -1
            return list(range(lo, hi + step, step))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UnsupportedParams(f"cannot parse degree range {text!r}")


def load_json_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}")


def _file_digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")


def cache_params(command: str, params: dict) -> dict:
    """Params with file paths replaced by the sha256 of their contents."""
    out = dict(params)
    for name in FILE_PARAMS.get(command, ()):
        if out.get(name) is not None:
            out[name] = {"sha256": _file_digest(out[name])}
    return out


# ---------------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------------

def _pieces_json(pieces) -> list:
    return [g.to_json() for g in pieces]


def _compare_split(closed, computed) -> list:
    """Degreewise: the direct sum of the computed pieces against the closed form."""
    rows = []
    for n in closed.degrees():
        pieces = computed.pieces[n]
        total = FGAbelianGroup.trivial().direct_sum(*pieces)
        if not iso_check(total, closed[n]):
            raise MismatchAt(n, [str(g) for g in pieces], str(closed[n]))
        rows.append({"degree": n, "pieces": _pieces_json(pieces)})
    return rows


def _compare_orders(closed, graded: dict) -> list:
    rows = []
    for n in closed.degrees():
        pieces = graded[n].nonzero()
        if graded_order(pieces) != graded_order([closed[n]]):
            raise MismatchAt(n, [str(g) for g in pieces], str(closed[n]))
        rows.append({"degree": n, "pieces": _pieces_json(pieces)})
    return rows


def curve(genus: Optional[int], real_components: int, kind: str = "projective", mod: Optional[int] = None) -> dict:
    """
    Closed-form KR table of a real curve, cross-checked against a model.

    Projective curves without real points are checked against the free
    double-cover model, M-curves against the Gysin sequence, affine curves
    against the graph model.
    """
    if kind not in ("projective", "affine"):
        raise UnsupportedParams(f"curve kind must be projective or affine, got {kind!r}")
    if kind == "projective":
        if genus is None:
            raise UnsupportedParams("projective curves need a genus")
        table = curve_projective_kr(genus, real_components)
        if real_components == 0:
            model = "surface_free"
            agreement = _compare_split(table, simplicial_kr(surface_free(genus)))
        elif real_components == genus + 1:
            model = "gysin"
            agreement = _compare_orders(table, mv_surface_kr(genus, table.degrees()))
        else:
            model, agreement = None, None
    else:
        table = curve_affine_kr(real_components)
        model = "graph_model"
        agreement = _compare_split(table, simplicial_kr(graph_model(real_components), table.degrees()))
    out = {
        "table": table.to_json(),
        "model": model,
        "cross_check": agreement,
        "agree": agreement is not None,
    }
    if mod is not None:
        out["mod"] = mod_m_table(table, mod).to_json()
    return out


# ---------------------------------------------------------------------------
# sphere
# ---------------------------------------------------------------------------

def sphere(dim: int, degrees: str = "0..7", mod: Optional[int] = None) -> dict:
    """KO^{−n}(S^d), and with ``mod`` the graded pieces of KO^{−n}(S^d; Z/m)."""
    rows = []
    for n in parse_degrees(degrees):
        row = {"n": n, "ko": sphere_ko(dim, n).to_json()}
        if mod is not None:
            pieces = sphere_ko_mod(dim, n, mod)
            row["mod"] = {**pieces.to_json(), "order": pieces.order()}
        rows.append(row)
    return {"dim": dim, "m": mod, "rows": rows}


# ---------------------------------------------------------------------------
# spectral sequences
# ---------------------------------------------------------------------------

def ss_run(page: str) -> dict:
    """Turns a page until it degenerates; reports every page and the graded abutment."""
    start = Page.from_json(load_json_file(page))
    pages = [start]
    while not pages[-1].is_degenerate():
        pages.append(turn_page(pages[-1]))
    final = run_to_infinity(pages[-1])
    p_lo, p_hi, q_lo, q_hi = final.window
    abutment = {}
    for n in range(p_lo + q_lo, p_hi + q_hi + 1):
        pieces = abutment_graded(final, n)
        if pieces:
            abutment[str(n)] = _pieces_json(pieces)
    return {
        "pages": [p.to_json() for p in pages],
        "stable_at": final.r,
        "abutment": abutment,
    }


def _identity_maps(source: Page, target: Page) -> list:
    maps = []
    for p, q in source.nonzero_spots():
        if source.group(p, q) == target.group(p, q):
            n = source.entry(p, q).generators
            maps.append({"p": p, "q": q, "matrix": [[int(i == j) for j in range(n)] for i in range(n)]})
    return maps


def ss_compare(n_max: int, r0: int, morphism: Optional[str] = None, source: Optional[str] = None,
               target: Optional[str] = None, maps: Optional[str] = None) -> dict:
    """
    Runs the comparison argument on a morphism of pages.

    The morphism comes from one file {source, target, maps}, or from two page
    files plus an optional maps file; without maps, spots carrying the same
    group on both sides are joined by the identity.
    """
    if morphism is not None:
        data = load_json_file(morphism)
    elif source is not None and target is not None:
        a, b = load_json_file(source), load_json_file(target)
        if maps is not None:
            raw = load_json_file(maps)
            components = raw.get("maps", []) if isinstance(raw, dict) else raw
        else:
            components = _identity_maps(Page.from_json(a), Page.from_json(b))
        data = {"source": a, "target": b, "maps": components}
    else:
        raise UnsupportedParams("compare needs a morphism file or two page files")
    verdict = compare(morphism_from_json(data), n_max, r0)
    return verdict.to_json()


# ---------------------------------------------------------------------------
# group cohomology
# ---------------------------------------------------------------------------

def gcoh(module: str, degrees: str = "0..4") -> dict:
    """H^p(Z/2; M) of a module, or hypercohomology of a G-complex."""
    data = load_json_file(module)
    c = gcomplex_from_json(data)
    rows = []
    for n in parse_degrees(degrees):
        if "terms" in data:
            group = hypercohomology(c, n)
        elif n < 0:
            group = FGAbelianGroup.trivial()
        else:
            group = group_cohomology(c.term(0), n)
        rows.append({"degree": n, "group": group.to_json(), "text": str(group)})
    return {"kind": "hypercohomology" if "terms" in data else "group_cohomology", "rows": rows}


COMMANDS = {
    "curve": curve,
    "sphere": sphere,
    "ss-run": ss_run,
    "ss-compare": ss_compare,
    "gcoh": gcoh,
}


# ---------------------------------------------------------------------------
# Job wrapper
# ---------------------------------------------------------------------------

def new_result(command: str, params: dict) -> dict:
    return {
        "success": False,
        "command": command,
        "params": params,
        "result": None,
        "error": None,
        "exit_code": 0,
    }


def fail(result: dict, e: Exception) -> dict:
    result["error"] = f"{type(e).__name__}: {str(e)}"
    result["exit_code"] = e.exit_code if isinstance(e, KRError) else 1
    return result


def run_job(command: str, params: dict, cache: Optional[ResultCache] = None) -> dict:
    """Runs one command, consulting the cache when given."""
    result = new_result(command, params)
    try:
        fn = COMMANDS[command]
        key_params = cache_params(command, params) if cache is not None else None
        value = cache.get(command, key_params) if cache is not None else None
        if value is None:
            value = fn(**params)
            if cache is not None:
                cache.put(command, key_params, value)
        result["result"] = value
        result["success"] = True
    except Exception as e:
        logger.debug("%s failed: %s", command, e)
        fail(result, e)
    return result


def cache_command(action: str, cache: ResultCache, command: Optional[str] = None,
                  params: Optional[dict] = None, value: Optional[str] = None) -> dict:
    """get / put / clear on the result cache."""
    shown = {"action": action, "command": command, "params": params}
    result = new_result("cache", shown)
    try:
        if action == "clear":
            result["result"] = {"removed": cache.clear(), "directory": str(cache.directory)}
        elif action in ("get", "put"):
            if command is None or params is None:
                raise UnsupportedParams(f"cache {action} needs a command and params")
            if action == "get":
                hit = cache.get(command, params)
                result["result"] = {"hit": hit is not None, "value": hit}
            else:
                if value is None:
                    raise UnsupportedParams("cache put needs a value file")
                path = cache.put(command, params, load_json_file(value))
                result["result"] = {"path": str(path)}
        else:
            raise UnsupportedParams(f"unknown cache action {action!r}")
        result["success"] = True
    except KRError as e:
        fail(result, e)
    return result


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------

def _is_group(value) -> bool:
    return isinstance(value, dict) and set(value) == {"rank", "torsion"}


def render_text(value, indent: int = 0) -> str:
    """Plain-text view of a result; groups print as Z^2 + Z/2."""
    pad = "  " * indent
    if _is_group(value):
        return pad + str(FGAbelianGroup.from_json(value))
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if _is_group(item) or not isinstance(item, (dict, list)):
                shown = str(FGAbelianGroup.from_json(item)) if _is_group(item) else item
                lines.append(f"{pad}{key}: {shown}")
            else:
                lines.append(f"{pad}{key}:")
                lines.append(render_text(item, indent + 1))
        return "\n".join(lines)
    if isinstance(value, list):
        if all(_is_group(v) for v in value) and value:
            return pad + ", ".join(str(FGAbelianGroup.from_json(v)) for v in value)
        return "\n".join(render_text(item, indent) for item in value) if value else pad + "[]"
    return f"{pad}{value}"
