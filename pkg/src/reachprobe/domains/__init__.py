"""Concrete domains, boundary sampling and local graph extraction."""

from .expr import CompiledExpression, ExpressionError, smooth_max
from .graph import LocalGraph, extract_local_graph
from .models import (
    BuiltinDomain,
    DomainModel,
    ExpressionDomain,
    ImplicitDomain,
    ParametricDomain,
    builtin,
    domain_from_dict,
    inside,
)
from .sampling import BoundarySample, realized_spacing, sample_boundary, sample_near

__all__ = [
    "BoundarySample",
    "BuiltinDomain",
    "CompiledExpression",
    "DomainModel",
    "ExpressionDomain",
    "ExpressionError",
    "ImplicitDomain",
    "LocalGraph",
    "ParametricDomain",
    "builtin",
    "domain_from_dict",
    "extract_local_graph",
    "inside",
    "realized_spacing",
    "sample_boundary",
    "sample_near",
    "smooth_max",
]
