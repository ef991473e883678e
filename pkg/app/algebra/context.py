# app/algebra/context.py
import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Tuple

from sympy import isprime

from ..core.errors import InputError, LevelError, UnknownVariableError
from .domains import CoefficientDomain

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
PRIME_TOKEN = "p"


@dataclass(frozen=True)
class RingContext:
    """
    Polynomial ring over a coefficient domain.

    `level` e means stored exponents carry an implicit denominator prime^e; it only
    affects presentation. `prime` is what the literal `p` expands to.
    """

    variables: Tuple[str, ...]
    domain: CoefficientDomain
    level: int = 0
    prime: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        seen = set()
        for name in self.variables:
            if not IDENTIFIER.match(name):
                raise InputError(
                    f"'{name}' is not a valid variable name", stage="context", name=name
                )
            if name == PRIME_TOKEN:
                raise InputError(
                    "'p' is reserved for the prime", stage="context", name=name
                )
            if name in seen:
                raise InputError(
                    f"duplicate variable '{name}'", stage="context", name=name
                )
            seen.add(name)
        if self.level < 0:
            raise LevelError(f"level must be nonnegative, got {self.level}", self.level)
        prime = self.prime
        if prime is None:
            object.__setattr__(self, "prime", self.domain.p)
        elif not isprime(prime):
            raise InputError(f"{prime} is not a prime", stage="context", prime=prime)
        elif self.domain.p is not None and self.domain.p != prime:
            raise InputError(
                f"context prime {prime} differs from domain {self.domain}",
                stage="context",
            )

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownVariableError(name)

    def with_domain(self, domain: CoefficientDomain) -> "RingContext":
        prime = domain.p if domain.p is not None else self.prime
        return replace(self, domain=domain, prime=prime)

    def with_level(self, level: int) -> "RingContext":
        if level < 0:
            raise LevelError(f"resulting level {level} is negative", level)
        return replace(self, level=level)

    def with_variables(self, variables: Iterable[str]) -> "RingContext":
        return replace(self, variables=tuple(variables))

    def fresh_names(self, bases: Iterable[str], suffix: str = "") -> Tuple[str, ...]:
        """Names derived from `bases` that clash with no variable of this context"""
        taken = set(self.variables)
        names = []
        for base in bases:
            candidate = f"{base}{suffix}"
            while candidate in taken or candidate == PRIME_TOKEN:
                candidate += "_"
            taken.add(candidate)
            names.append(candidate)
        return tuple(names)

    def extended(self, names: Iterable[str], front: bool = False) -> "RingContext":
        names = tuple(names)
        variables = names + self.variables if front else self.variables + names
        return self.with_variables(variables)

    def __str__(self) -> str:
        ring = f"{self.domain}[{', '.join(self.variables)}]"
        return ring if self.level == 0 else f"{ring} @ level {self.level}"
