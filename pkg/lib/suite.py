"""
Check suites run by ``kr.py check``.

A suite is a list of named jobs. Each job is a function of a seeded numpy
generator returning a JSON-ready detail dict and raising a KRError when its
check fails. Jobs are independent and run on a thread pool.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np
import sympy

from .commands import curve, fail, new_result
from .errors import KRError, LemmaViolation, MathematicalMismatch, SuiteFailed, UnsupportedParams
from .gmod import InvolutiveModule, group_cohomology, lemma54_check, random_gcomplex
from .krtables import (
    Z2,
    brauer_severi_check,
    graded_order,
    periodicity_check,
    simplicial_kr,
    sphere_ko,
    sphere_ko_mod,
)
from .realcx import (
    OUTPUT_TOLERANCE,
    LocalWeight,
    fixed_subcomplex,
    graph_model,
    quotient,
    sample_variety_point,
    sphere_antipodal,
    sphere_retraction,
    sphere_trivial,
    surface_free,
    surface_reflection,
    twisted_cohomology,
)
from .specseq import (
    Confirmed,
    HypothesisFailed,
    SSMorphism,
    abutment_graded,
    assemble_ahss,
    cartan_leray_abutment,
    collapse_certificate,
    compare,
    random_defect,
    random_extension,
    random_page,
)
from .znf import GroupMap, IntegerMatrix, smith_normal_form

logger = logging.getLogger(__name__)


def _require(condition: bool, message: str):
    if not condition:
        raise MathematicalMismatch(message)


# ---------------------------------------------------------------------------
# Closed forms against models
# ---------------------------------------------------------------------------

def free_surface_job(g: int) -> Callable:
    def job(rng) -> dict:
        out = curve(g, 0)
        return {"genus": g, "cross_check": out["cross_check"]}
    return job


def brauer_severi_job(rng) -> dict:
    return brauer_severi_check(8)


def graph_model_job(lam: int) -> Callable:
    def job(rng) -> dict:
        out = curve(None, lam, "affine")
        page = assemble_ahss(graph_model(lam))
        _require(collapse_certificate(page), f"graph model λ={lam} does not certify collapse")
        return {"lambda": lam, "cross_check": out["cross_check"], "collapse": True}
    return job


def gysin_job(g: int) -> Callable:
    def job(rng) -> dict:
        out = curve(g, g + 1)
        return {"genus": g, "cross_check": out["cross_check"]}
    return job


def annulus_job(rng) -> dict:
    """The reflected torus model against the rank of KR^0 = Z^2."""
    pieces = simplicial_kr(surface_reflection(1), [0]).pieces[0]
    rank, _ = graded_order(pieces)
    _require(rank == 2, f"reflected torus KR^0 has free rank {rank}, expected 2")
    return {"pieces": [g.to_json() for g in pieces]}


def periodicity_job(rng) -> dict:
    free_models = {
        "surface_free(1)": surface_free(1),
        "surface_free(2)": surface_free(2),
        "surface_free(3)": surface_free(3),
        "graph_model(0)": graph_model(0),
        "sphere_antipodal(2)": sphere_antipodal(2),
    }
    for name, x in free_models.items():
        _require(periodicity_check(simplicial_kr(x)), f"{name} is not 4-periodic")
    control = periodicity_check(simplicial_kr(sphere_trivial(1)))
    _require(not control, "the trivial circle passed the period-4 check")
    return {"periodic": sorted(free_models), "control": "sphere_trivial(1)"}


def retraction_job(samples: int) -> Callable:
    def job(rng) -> dict:
        checked = 0
        for k in range(samples):
            d = 1 + k % 4
            z = sample_variety_point(rng, d)
            t = float(rng.uniform(0.0, 1.0))
            w = sphere_retraction(z, t)
            _require(abs(np.sum(w * w) - 1.0) <= OUTPUT_TOLERANCE, f"h_t(z) left V(C) at d={d}")
            _require(np.allclose(sphere_retraction(z, 1.0), z, rtol=0, atol=OUTPUT_TOLERANCE), "h_1 is not the identity")
            _require(np.allclose(sphere_retraction(z, 0.0).imag, 0, atol=OUTPUT_TOLERANCE), "h_0 is not real")
            _require(np.allclose(sphere_retraction(np.conj(z), t), np.conj(w), rtol=0, atol=OUTPUT_TOLERANCE),
                     "h_t does not commute with conjugation")
            checked += 1
        return {"samples": checked}
    return job


def _quotient_order(a, m: int) -> int:
    out = m ** a.free_rank
    for t in a.torsion:
        out *= sympy.gcd(t, m)
    return int(out)


def _torsion_order(a, m: int) -> int:
    out = 1
    for t in a.torsion:
        out *= sympy.gcd(t, m)
    return int(out)


def sphere_mod_job(rng) -> dict:
    rows = 0
    for d in range(9):
        for m in (2, 8, 16):
            for n in range(8):
                pieces = sphere_ko_mod(d, n, m)
                expected = _quotient_order(sphere_ko(d, n), m) * _torsion_order(sphere_ko(d, n - 1), m)
                _require(pieces.order() == expected, f"KO^-{n}(S^{d}; Z/{m}) has order {pieces.order()}, expected {expected}")
                rows += 1
    return {"rows": rows}


def cyclic_inversion_job(rng) -> dict:
    for m in (2, 4, 8, 16):
        h2 = group_cohomology(InvolutiveModule.cyclic(m, inversion=True), 2)
        _require(h2 == Z2, f"H^2(G, Z/{m}) = {h2}, expected Z/2")
    return {"moduli": [2, 4, 8, 16]}


# ---------------------------------------------------------------------------
# Lemma fuzzers
# ---------------------------------------------------------------------------

def truncation_job(trials: int) -> Callable:
    def job(rng) -> dict:
        levels = 0
        for _ in range(trials):
            c = random_gcomplex(rng)
            for i in range(c.lowest_degree - 1, c.top_degree + 1):
                if not lemma54_check(c, i):
                    raise LemmaViolation(f"truncation at {i} changed hypercohomology")
                levels += 1
        return {"complexes": trials, "levels": levels}
    return job


def _reverify(verdict: Confirmed, n_max: int):
    for n in range(sum(verdict.source.window[::2]), n_max + 1):
        a = sorted(abutment_graded(verdict.source, n), key=str)
        b = sorted(abutment_graded(verdict.target, n), key=str)
        if a != b:
            raise LemmaViolation(f"E_inf differs in total degree {n}")


def comparison_job(trials: int, n_max: int = 0) -> Callable:
    def job(rng) -> dict:
        page = random_page(rng)
        identity = SSMorphism(page, page, {s: GroupMap.identity(page.entry(*s)) for s in page.entries})
        _require(isinstance(compare(identity, n_max, page.r), Confirmed), "identity morphism not confirmed")
        confirmed = 0
        for _ in range(trials):
            f = random_extension(rng, random_page(rng), n_max)
            verdict = compare(f, n_max, f.source.r)
            _require(isinstance(verdict, Confirmed), "extension above N failed its hypotheses")
            _reverify(verdict, n_max)
            confirmed += 1
        nonzero = [s for s in page.nonzero_spots() if sum(s) <= n_max]
        violating = SSMorphism(page, page, {})
        verdict = compare(violating, n_max, page.r)
        if nonzero:
            _require(isinstance(verdict, HypothesisFailed), "zero morphism passed the hypotheses")
        defects = 0
        for _ in range(trials):
            drawn = random_defect(rng, random_page(rng), n_max)
            if drawn is None:
                continue
            f, spot = drawn
            verdict = compare(f, n_max, f.source.r)
            _require(isinstance(verdict, HypothesisFailed) and verdict.spot == spot,
                     f"defect at {spot} not reported")
            defects += 1
        return {"confirmed": confirmed, "violation_detected": bool(nonzero), "defects": defects}
    return job


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------

def snf_job(trials: int) -> Callable:
    def job(rng) -> dict:
        for _ in range(trials):
            rows, cols = (int(v) for v in rng.integers(1, 7, size=2))
            m = IntegerMatrix.from_rows(rng.integers(-9, 10, size=(rows, cols)).tolist())
            s, u, v = smith_normal_form(m)
            _require(u @ m @ v == s, "U·M·V differs from S")
            _require(abs(sympy.Matrix(u.to_lists()).det()) == 1, "U is not unimodular")
            _require(abs(sympy.Matrix(v.to_lists()).det()) == 1, "V is not unimodular")
            diag = [s[i, i] for i in range(min(rows, cols))]
            _require(all(s[i, j] == 0 for i in range(rows) for j in range(cols) if i != j), "S is not diagonal")
            _require(all(x >= 0 for x in diag), "negative invariant factor")
            for a, b in zip(diag, diag[1:]):
                _require(b % a == 0 if a else b == 0, f"divisibility fails: {a} ∤ {b}")
        return {"matrices": trials}
    return job


FREE_BUILDERS = {
    "sphere_antipodal(2)": lambda: sphere_antipodal(2),
    "surface_free(0)": lambda: surface_free(0),
    "surface_free(1)": lambda: surface_free(1),
    "surface_free(2)": lambda: surface_free(2),
    "graph_model(0)": lambda: graph_model(0),
}

ALL_BUILDERS = {
    **FREE_BUILDERS,
    "sphere_trivial(1)": lambda: sphere_trivial(1),
    "sphere_trivial(2)": lambda: sphere_trivial(2),
    "surface_reflection(0)": lambda: surface_reflection(0),
    "surface_reflection(1)": lambda: surface_reflection(1),
    "graph_model(1)": lambda: graph_model(1),
    "graph_model(3)": lambda: graph_model(3),
}


def twisted_routes_job(rng) -> dict:
    rows = []
    for name, build in FREE_BUILDERS.items():
        x = build()
        for i in (0, 1):
            weight = LocalWeight(i)
            direct = [twisted_cohomology(x, weight, n) for n in range(x.dimension + 1)]
            invariant = [twisted_cohomology(x, weight, n, route="invariant") for n in range(x.dimension + 1)]
            _require(direct == invariant, f"{name} Z({i}): quotient and invariant routes differ")
            graded = cartan_leray_abutment(x, weight)
            for n, group in enumerate(direct):
                _require(graded_order(graded[n]) == graded_order([group]),
                         f"{name} Z({i}) degree {n}: Cartan–Leray disagrees")
            rows.append({"model": name, "weight": i, "groups": [str(g) for g in direct]})
    return {"rows": rows}


def euler_job(rng) -> dict:
    rows = []
    for name, build in ALL_BUILDERS.items():
        x = build()
        chi = x.complex.euler_characteristic()
        chi_quotient = quotient(x).euler_characteristic()
        chi_fixed = fixed_subcomplex(x).euler_characteristic()
        _require(chi == 2 * chi_quotient - chi_fixed, f"{name}: orbit count fails")
        rows.append({"model": name, "chi": chi, "quotient": chi_quotient, "fixed": chi_fixed})
    return {"rows": rows}


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def build_suite(name: str, check_config: dict) -> list:
    if name == "appendix-a":
        return (
            [(f"free-surface-g{g}", free_surface_job(g)) for g in (0, 1, 2, 3)]
            + [("brauer-severi", brauer_severi_job)]
            + [(f"graph-model-l{lam}", graph_model_job(lam)) for lam in (0, 1, 3)]
            + [(f"gysin-g{g}", gysin_job(g)) for g in (0, 1, 2)]
            + [("reflected-torus", annulus_job), ("periodicity", periodicity_job)]
            + [("retraction", retraction_job(check_config["retraction_samples"])), ("sphere-mod", sphere_mod_job)]
            + [("cyclic-inversion", cyclic_inversion_job)]
        )
    if name == "lemmas":
        return [
            ("truncation", truncation_job(check_config["fuzz_trials"])),
            ("comparison", comparison_job(check_config["fuzz_trials"])),
        ]
    if name == "properties":
        return [
            ("snf", snf_job(check_config["snf_trials"])),
            ("twisted-routes", twisted_routes_job),
            ("euler", euler_job),
        ]
    if name == "all":
        return [job for part in SUITES[:-1] for job in build_suite(part, check_config)]
    raise UnsupportedParams(f"unknown suite {name!r}")


SUITES = ("appendix-a", "lemmas", "properties", "all")


def _run_one(name: str, job: Callable, seed: int, index: int) -> dict:
    rng = np.random.default_rng([seed, index])
    logger.debug("suite job %s started", name)
    try:
        detail = job(rng)
    except KRError as e:
        logger.debug("suite job %s failed: %s", name, e)
        return {"name": name, "passed": False, "error": f"{type(e).__name__}: {str(e)}"}
    logger.debug("suite job %s passed", name)
    return {"name": name, "passed": True, "detail": detail}


def run_suite(name: str, check_config: dict, seed: int, workers: int = 1) -> dict:
    """Runs every job of a suite; job i draws from default_rng([seed, i])."""
    if name not in SUITES:
        raise UnsupportedParams(f"unknown suite {name!r}, expected one of {list(SUITES)}")
    jobs = build_suite(name, check_config)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_run_one, job_name, job, seed, k) for k, (job_name, job) in enumerate(jobs)]
        results = [f.result() for f in futures]
    failed = [r["name"] for r in results if not r["passed"]]
    return {"suite": name, "seed": seed, "jobs": results, "passed": len(results) - len(failed), "failed": failed}


def check(suite: str, seed: int, check_config: dict) -> dict:
    """The ``check`` command: a result dict whose exit code is 1 when any job failed."""
    result = new_result("check", {"suite": suite, "seed": seed})
    try:
        report = run_suite(suite, check_config, seed, check_config.get("workers", 1))
        result["result"] = report
        if report["failed"]:
            raise SuiteFailed(suite, report["failed"])
        result["success"] = True
    except KRError as e:
        fail(result, e)
    return result
