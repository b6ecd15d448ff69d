"""Twisted conjugacy in low-dimensional almost-crystallographic groups."""

from __future__ import annotations

from .acgroup import ACElement, ACGroupSpec, Family, FiniteQuotient, holonomy
from .automorphisms import (
    GeneratorImages,
    InvalidAutomorphism,
    build_d3f2,
    build_d4_family,
    check_conditions_d3f2,
    is_automorphism,
)
from .linalg import Matrix, det
from .makelist import make_list, spectrum_from_rows, verify_tables, witness_check
from .nilgroup import NilParams
from .oracle import boxed_twisted_classes, oracle_compare_d3f2, twisted_classes_finite
from .reidemeister import (
    INFINITY,
    ResidueClassSet,
    averaging,
    averaging_for,
    r_number_d3f2,
    r_number_quotient,
    rinfty_check,
    rinfty_family_evidence,
    spectrum_d3f2,
)

__version__ = "0.1.0"

__all__ = [
    "ACElement",
    "ACGroupSpec",
    "Family",
    "FiniteQuotient",
    "GeneratorImages",
    "INFINITY",
    "InvalidAutomorphism",
    "Matrix",
    "NilParams",
    "ResidueClassSet",
    "averaging",
    "averaging_for",
    "boxed_twisted_classes",
    "build_d3f2",
    "build_d4_family",
    "check_conditions_d3f2",
    "det",
    "holonomy",
    "is_automorphism",
    "make_list",
    "oracle_compare_d3f2",
    "r_number_d3f2",
    "r_number_quotient",
    "rinfty_check",
    "rinfty_family_evidence",
    "spectrum_d3f2",
    "spectrum_from_rows",
    "twisted_classes_finite",
    "verify_tables",
    "witness_check",
]
