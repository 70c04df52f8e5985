"""Exact toolkit for MC∞-algebras of monotone [0,1]-valued functions and
their duality with compact ordered spaces, at finite scale."""

from .algebra import Dual, FunctionAlgebra, Generated, Product, SabotagedScalar, Scalar
from .duality import max_of_generated, unit_epsilon, unit_eta
from .posets import FinPoset, FinPreorder, MonotoneMap, load_poset, load_preorder
from .stone_weierstrass import approximate, check_separation
from .terms import eval_exact, eval_with_precision, parse_term, render_term

__version__ = "0.1.0"

__all__ = [
    "Dual", "FunctionAlgebra", "Generated", "Product", "SabotagedScalar", "Scalar",
    "max_of_generated", "unit_epsilon", "unit_eta",
    "FinPoset", "FinPreorder", "MonotoneMap", "load_poset", "load_preorder",
    "approximate", "check_separation",
    "eval_exact", "eval_with_precision", "parse_term", "render_term",
]
