# app/algebra/ideal.py
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple

from ..core.errors import ContextMismatchError, InputError
from .context import RingContext
from .domains import CoefficientDomain
from .polynomial import Polynomial


@dataclass(frozen=True)
class Ideal:
    """Finitely generated ideal; zero generators pruned, duplicates dropped"""

    generators: Tuple[Polynomial, ...]
    ctx: RingContext

    def __post_init__(self):
        kept = []
        seen = set()
        for g in self.generators:
            if g.ctx != self.ctx:
                raise ContextMismatchError(g.ctx, self.ctx)
            if g.is_zero() or g in seen:
                continue
            seen.add(g)
            kept.append(g)
        object.__setattr__(self, "generators", tuple(kept))

    @classmethod
    def of(
        cls, generators: Iterable[Polynomial], ctx: Optional[RingContext] = None
    ) -> "Ideal":
        generators = tuple(generators)
        if ctx is None:
            if not generators:
                raise InputError("an empty ideal needs a context", stage="ideal")
            ctx = generators[0].ctx
        return cls(generators, ctx)

    @classmethod
    def parse(cls, texts: Sequence[str], ctx: RingContext) -> "Ideal":
        from .parser import parse_poly

        return cls(tuple(parse_poly(t, ctx) for t in texts), ctx)

    @classmethod
    def zero(cls, ctx: RingContext) -> "Ideal":
        return cls((), ctx)

    def is_zero(self) -> bool:
        return not self.generators

    def __iter__(self) -> Iterator[Polynomial]:
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ctx != self.ctx:
            raise ContextMismatchError(self.ctx, other.ctx)
        return Ideal(self.generators + other.generators, self.ctx)

    def with_generators(self, *extra: Polynomial) -> "Ideal":
        return Ideal(self.generators + tuple(extra), self.ctx)

    def reduce_mod(self, target: CoefficientDomain) -> "Ideal":
        return Ideal(
            tuple(g.reduce_mod(target) for g in self.generators),
            self.ctx.with_domain(target),
        )

    def change_context(self, ctx: RingContext) -> "Ideal":
        return Ideal(tuple(g.change_context(ctx) for g in self.generators), ctx)

    def fractional_relabel(self, delta_level: int) -> "Ideal":
        ctx = self.ctx.with_level(self.ctx.level + delta_level)
        return Ideal(
            tuple(g.fractional_relabel(delta_level) for g in self.generators), ctx
        )

    def format(self) -> str:
        if not self.generators:
            return "(0)"
        return "(" + ", ".join(g.format() for g in self.generators) + ")"

    def display(self) -> str:
        if not self.generators:
            return "(0)"
        return "(" + ", ".join(g.display() for g in self.generators) + ")"

    def strings(self):
        return [g.format() for g in self.generators]

    def __str__(self) -> str:
        return self.display()
