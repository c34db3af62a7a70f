"""Norm graphs over finite field towers and certificates for their K_{s,t}-freeness."""

from .gf import FieldCtx, FieldElement, FieldError, find_irreducible
from .graph import BitGraph, NormGraph, SizingError, build, kst_upper_bound
from .search import Certificate, SearchSpec, check_claim, max_common_nbhd, naive_oracle

__all__ = [
    "BitGraph",
    "Certificate",
    "FieldCtx",
    "FieldElement",
    "FieldError",
    "NormGraph",
    "SearchSpec",
    "SizingError",
    "build",
    "check_claim",
    "find_irreducible",
    "kst_upper_bound",
    "max_common_nbhd",
    "naive_oracle",
]
