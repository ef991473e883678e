# app/algebra/orders.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Tuple

from sympy.polys.orderings import ProductOrder, grevlex, grlex, lex

Monomial = Tuple[int, ...]


class OrderKind(str, Enum):
    LEX = "lex"
    GREVLEX = "grevlex"
    ELIMINATION = "elimination"


@dataclass(frozen=True)
class MonomialOrder:
    """
    Monomial order on exponent tuples; `key(m)` sorts ascending.

    elimination(k) compares the first k variables by degree then lex, and breaks
    ties on the remaining variables by grevlex, so any monomial involving the
    first block beats every monomial free of it.
    """

    kind: OrderKind
    block_size: int = 0
    _key: Callable[[Monomial], Any] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        if self.kind == OrderKind.LEX:
            key = lex
        elif self.kind == OrderKind.GREVLEX:
            key = grevlex
        else:
            k = self.block_size
            key = ProductOrder(
                (grlex, lambda m: m[:k]),
                (grevlex, lambda m: m[k:]),
            )
        object.__setattr__(self, "_key", key)

    @classmethod
    def lex(cls) -> "MonomialOrder":
        return cls(OrderKind.LEX)

    @classmethod
    def grevlex(cls) -> "MonomialOrder":
        return cls(OrderKind.GREVLEX)

    @classmethod
    def elimination(cls, block_size: int) -> "MonomialOrder":
        return cls(OrderKind.ELIMINATION, block_size)

    @classmethod
    def parse(cls, name: str) -> "MonomialOrder":
        return cls(OrderKind(name.lower()))

    def key(self, m: Monomial) -> Any:
        return self._key(m)

    def leading(self, monomials) -> Monomial:
        return max(monomials, key=self._key)

    def __str__(self) -> str:
        if self.kind == OrderKind.ELIMINATION:
            return f"elimination({self.block_size})"
        return self.kind.value
