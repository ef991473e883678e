# app/algebra/domains.py
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from sympy import isprime

from ..core.errors import AlgebraError, DenominatorError, InputError

Coefficient = Union[int, Fraction]


class DomainKind(str, Enum):
    INTEGER = "ZZ"
    RATIONAL = "QQ"
    PRIME_FIELD = "GF"
    TRUNCATED_PADIC = "ZpN"


@dataclass(frozen=True)
class CoefficientDomain:
    """
    Exact coefficient domain: ℤ, ℚ, 𝔽_p or ℤ/p^N.

    Elements are plain Python ints (ℤ, 𝔽_p, ℤ/p^N, reduced to [0, modulus))
    or Fractions (ℚ).
    """

    kind: DomainKind
    p: Optional[int] = None
    N: Optional[int] = None

    def __post_init__(self):
        if self.kind in (DomainKind.PRIME_FIELD, DomainKind.TRUNCATED_PADIC):
            if self.p is None or not isprime(self.p):
                raise InputError(
                    f"{self.p} is not a prime", stage="domain", prime=self.p
                )
        if self.kind == DomainKind.TRUNCATED_PADIC and (self.N is None or self.N < 1):
            raise InputError(
                f"truncation exponent must be >= 1, got {self.N}", stage="domain"
            )

    @classmethod
    def integers(cls) -> "CoefficientDomain":
        return cls(DomainKind.INTEGER)

    @classmethod
    def rationals(cls) -> "CoefficientDomain":
        return cls(DomainKind.RATIONAL)

    @classmethod
    def prime_field(cls, p: int) -> "CoefficientDomain":
        return cls(DomainKind.PRIME_FIELD, p=p)

    @classmethod
    def truncated_padic(cls, p: int, N: int) -> "CoefficientDomain":
        return cls(DomainKind.TRUNCATED_PADIC, p=p, N=N)

    @property
    def modulus(self) -> Optional[int]:
        if self.kind == DomainKind.PRIME_FIELD:
            return self.p
        if self.kind == DomainKind.TRUNCATED_PADIC:
            return self.p**self.N
        return None

    @property
    def is_field(self) -> bool:
        return self.kind in (DomainKind.PRIME_FIELD, DomainKind.RATIONAL)

    @property
    def is_integers(self) -> bool:
        return self.kind == DomainKind.INTEGER

    def normalize(self, c: Coefficient) -> Coefficient:
        """Canonical representative of c in this domain"""
        if self.kind == DomainKind.RATIONAL:
            return Fraction(c)
        if self.kind == DomainKind.INTEGER:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise AlgebraError(
                        f"{c} is not an integer", operation="coerce", value=str(c)
                    )
                return c.numerator
            return int(c)
        m = self.modulus
        if isinstance(c, Fraction):
            try:
                inv = pow(c.denominator, -1, m)
            except ValueError:
                raise DenominatorError(c, m)
            return (c.numerator * inv) % m
        return int(c) % m

    def inverse(self, c: Coefficient) -> Coefficient:
        if self.kind == DomainKind.RATIONAL:
            return 1 / Fraction(c)
        if self.kind == DomainKind.INTEGER:
            if c in (1, -1):
                return c
            raise AlgebraError(f"{c} is not a unit in ZZ", operation="inverse")
        try:
            return pow(int(c), -1, self.modulus)
        except ValueError:
            raise AlgebraError(
                f"{c} is not a unit in {self}", operation="inverse", value=c
            )

    def divide(self, a: Coefficient, b: Coefficient) -> Coefficient:
        """Exact quotient a / b in this domain"""
        if self.kind == DomainKind.INTEGER:
            q, r = divmod(a, b)
            if r:
                raise AlgebraError(
                    f"{a} is not divisible by {b}", operation="divide", a=a, b=b
                )
            return q
        return self.normalize(a * self.inverse(b))

    def symmetric(self, c: Coefficient) -> Coefficient:
        """Representative in (-m/2, m/2] for modular domains, identity otherwise"""
        m = self.modulus
        if m is None:
            return c
        return c - m if c > m // 2 else c

    def __str__(self) -> str:
        if self.kind == DomainKind.PRIME_FIELD:
            return f"GF({self.p})"
        if self.kind == DomainKind.TRUNCATED_PADIC:
            return f"Z/{self.p}^{self.N}"
        return self.kind.value
