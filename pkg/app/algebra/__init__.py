from .domains import CoefficientDomain, DomainKind
from .context import RingContext, PRIME_TOKEN
from .orders import Monomial, MonomialOrder, OrderKind
from .polynomial import (
    Polynomial,
    poly_arith,
    substitute,
    exact_div_int,
    reduce_mod,
    fractional_relabel,
)
from .ideal import Ideal
from .parser import parse_poly

__all__ = [
    "CoefficientDomain",
    "DomainKind",
    "RingContext",
    "PRIME_TOKEN",
    "Monomial",
    "MonomialOrder",
    "OrderKind",
    "Polynomial",
    "poly_arith",
    "substitute",
    "exact_div_int",
    "reduce_mod",
    "fractional_relabel",
    "Ideal",
    "parse_poly",
]
