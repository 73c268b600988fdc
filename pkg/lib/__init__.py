"""Exact-arithmetic KR-theory toolkit."""

__version__ = "1.0.0"

from .errors import InputError, KRError, MathematicalMismatch
from .znf import FGAbelianGroup, GroupMap, IntegerMatrix, Presentation, smith_normal_form
from .chain import CochainComplex, ExactTemplate, GradedPieces, solve_exact
from .gmod import GComplex, InvolutiveModule, group_cohomology, hypercohomology, lemma54_check
from .realcx import RealComplex, build_model, sphere_retraction, twisted_cohomology
from .specseq import Page, SSMorphism, assemble_ahss, assemble_cartan_leray, compare
from .krtables import (
    brauer_severi_check,
    curve_affine_kr,
    curve_projective_kr,
    mod_m_table,
    mv_surface_kr,
    periodicity_check,
    simplicial_kr,
    sphere_ko,
)

__all__ = [
    "__version__",
    "KRError",
    "InputError",
    "MathematicalMismatch",
    "FGAbelianGroup",
    "GroupMap",
    "IntegerMatrix",
    "Presentation",
    "smith_normal_form",
    "CochainComplex",
    "ExactTemplate",
    "GradedPieces",
    "solve_exact",
    "GComplex",
    "InvolutiveModule",
    "group_cohomology",
    "hypercohomology",
    "lemma54_check",
    "RealComplex",
    "build_model",
    "sphere_retraction",
    "twisted_cohomology",
    "Page",
    "SSMorphism",
    "assemble_ahss",
    "assemble_cartan_leray",
    "compare",
    "brauer_severi_check",
    "curve_affine_kr",
    "curve_projective_kr",
    "mod_m_table",
    "mv_surface_kr",
    "periodicity_check",
    "simplicial_kr",
    "sphere_ko",
]
