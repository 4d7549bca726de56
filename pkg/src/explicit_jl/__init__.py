"""Explicit Johnson-Lindenstrauss generator with a short seed.

A plan (``plan_build``) fixes the dimensions; a seed then selects one
linear map ``G(y): R^n -> R^s`` that can be applied to whole vectors
(``generate_apply``) or queried entry by entry (``entry``).
"""
from .access import entry, stage_entry
from .errors import JLError
from .pipeline import MatrixHandle, cw_apply, generate_apply, pad_input, stage_apply
from .plan import Constants, JlPlan, plan_build
from .tape import BitString, SeedTape, SignTape, sign_at, sign_vector, tape_partition

__all__ = [
    "BitString", "Constants", "JLError", "JlPlan", "MatrixHandle", "SeedTape", "SignTape",
    "cw_apply", "entry", "generate_apply", "pad_input", "plan_build", "sign_at",
    "sign_vector", "stage_apply", "stage_entry", "tape_partition",
]
