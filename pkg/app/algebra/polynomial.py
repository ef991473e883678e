# app/algebra/polynomial.py
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from sympy.polys.monomials import monomial_mul

from ..core.errors import (
    AlgebraError,
    ContextMismatchError,
    InputError,
    LevelError,
    MissingImageError,
    NegativeExponentError,
    NotDivisibleError,
)
from .context import RingContext
from .domains import Coefficient, CoefficientDomain, DomainKind
from .orders import Monomial, MonomialOrder

Scalar = Union[int, Fraction]

_DISPLAY_ORDER = MonomialOrder.grevlex()

# source kind -> target kinds reachable by coefficient reduction
_REDUCTIONS = {
    DomainKind.INTEGER: {
        DomainKind.INTEGER,
        DomainKind.RATIONAL,
        DomainKind.PRIME_FIELD,
        DomainKind.TRUNCATED_PADIC,
    },
    DomainKind.RATIONAL: {
        DomainKind.RATIONAL,
        DomainKind.PRIME_FIELD,
        DomainKind.TRUNCATED_PADIC,
    },
    DomainKind.TRUNCATED_PADIC: {DomainKind.PRIME_FIELD, DomainKind.TRUNCATED_PADIC},
    DomainKind.PRIME_FIELD: {DomainKind.PRIME_FIELD},
}


class Polynomial:
    """
    Sparse exact polynomial: exponent tuple -> nonzero coefficient.

    Instances are never mutated after construction.
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(
        self,
        terms: Mapping[Monomial, Coefficient],
        ctx: RingContext,
        _normalized: bool = False,
    ):
        self.ctx = ctx
        self._hash = None
        if _normalized:
            self.terms: Dict[Monomial, Coefficient] = dict(terms)
            return
        n = ctx.nvars
        normalize = ctx.domain.normalize
        clean: Dict[Monomial, Coefficient] = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != n:
                raise InputError(
                    f"monomial {m} has {len(m)} exponents, context has {n} variables",
                    stage="monomial",
                )
            if any(e < 0 for e in m):
                raise NegativeExponentError(min(m))
            c = normalize(c)
            if c:
                clean[m] = c
        self.terms = clean

    # construction -------------------------------------------------------

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Coefficient], ctx: RingContext) -> "Polynomial":
        """Normalize coefficients of an accumulated dict and drop zeros"""
        normalize = ctx.domain.normalize
        clean = {}
        for m, c in terms.items():
            c = normalize(c)
            if c:
                clean[m] = c
        return cls(clean, ctx, _normalized=True)

    @classmethod
    def zero(cls, ctx: RingContext) -> "Polynomial":
        return cls({}, ctx, _normalized=True)

    @classmethod
    def constant(cls, c: Scalar, ctx: RingContext) -> "Polynomial":
        return cls({(0,) * ctx.nvars: c}, ctx)

    @classmethod
    def one(cls, ctx: RingContext) -> "Polynomial":
        return cls.constant(1, ctx)

    @classmethod
    def monomial(
        cls, exponents: Iterable[int], ctx: RingContext, coeff: Scalar = 1
    ) -> "Polynomial":
        return cls({tuple(exponents): coeff}, ctx)

    @classmethod
    def variable(cls, name: str, ctx: RingContext) -> "Polynomial":
        exps = [0] * ctx.nvars
        exps[ctx.index(name)] = 1
        return cls.monomial(exps, ctx)

    @classmethod
    def gens(cls, ctx: RingContext) -> List["Polynomial"]:
        return [cls.variable(name, ctx) for name in ctx.variables]

    # inspection ---------------------------------------------------------

    @property
    def domain(self) -> CoefficientDomain:
        return self.ctx.domain

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self) -> Coefficient:
        return self.terms.get((0,) * self.ctx.nvars, 0)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def variables_used(self) -> Tuple[str, ...]:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return tuple(self.ctx.variables[i] for i in sorted(used))

    def sorted_terms(
        self, order: Optional[MonomialOrder] = None
    ) -> List[Tuple[Monomial, Coefficient]]:
        """Terms in descending order"""
        order = order or _DISPLAY_ORDER
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder) -> Tuple[Monomial, Coefficient]:
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term", operation="lt")
        m = order.leading(self.terms)
        return m, self.terms[m]

    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        return self.leading_term(order)[0]

    def leading_coefficient(self, order: MonomialOrder) -> Coefficient:
        return self.leading_term(order)[1]

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatchError(self.ctx, other.ctx)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.ctx)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial._raw(out, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self.terms.items()}, self.ctx)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) - c
        return Polynomial._raw(out, self.ctx)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: Dict[Monomial, Coefficient] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = monomial_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial._raw(out, self.ctx)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            raise NegativeExponentError(n)
        if len(self.terms) == 1:
            ((m, c),) = self.terms.items()
            return Polynomial._raw({tuple(e * n for e in m): c**n}, self.ctx)
        result = Polynomial.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Scalar) -> "Polynomial":
        return Polynomial._raw({m: a * c for m, a in self.terms.items()}, self.ctx)

    def mul_term(self, monomial: Monomial, c: Coefficient) -> "Polynomial":
        return Polynomial._raw(
            {monomial_mul(m, monomial): a * c for m, a in self.terms.items()}, self.ctx
        )

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Polynomial.constant(other, self.ctx).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # ring maps ----------------------------------------------------------

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Evaluate at the given variable images (a ring homomorphism in self)"""
        used = self.variables_used()
        for name in used:
            if name not in images:
                raise MissingImageError(name)
        targets = {img.ctx for img in images.values()}
        if len(targets) > 1:
            a, b = list(targets)[:2]
            raise ContextMismatchError(a, b)
        target = targets.pop() if targets else self.ctx
        cache: Dict[Tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in cache:
                cache[key] = images[self.ctx.variables[i]] ** e
            return cache[key]

        out: Dict[Monomial, Coefficient] = {}
        for m, c in self.terms.items():
            term = Polynomial.constant(c, target)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            for tm, tc in term.terms.items():
                out[tm] = out.get(tm, 0) + tc
        return Polynomial._raw(out, target)

    def exact_div_int(self, n: int) -> "Polynomial":
        if n == 0:
            raise AlgebraError("division by zero", operation="exact_div")
        kind = self.ctx.domain.kind
        if kind == DomainKind.RATIONAL:
            return self.scale(Fraction(1, n))
        if kind != DomainKind.INTEGER:
            raise AlgebraError(
                f"exact integer division is not defined over {self.ctx.domain}",
                operation="exact_div",
            )
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, n)
            if r:
                raise NotDivisibleError(c, self.ctx_monomial(m), n)
            out[m] = q
        return Polynomial(out, self.ctx, _normalized=True)

    def reduce_mod(self, target: CoefficientDomain) -> "Polynomial":
        source = self.ctx.domain
        allowed = _REDUCTIONS[source.kind]
        compatible = target.kind in allowed and (
            source.p is None or target.p == source.p
        )
        if source.kind == DomainKind.TRUNCATED_PADIC and target.N is not None:
            compatible = compatible and target.N <= source.N
        if not compatible:
            raise AlgebraError(
                f"cannot reduce coefficients from {source} to {target}",
                operation="reduce_mod",
            )
        return Polynomial(self.terms, self.ctx.with_domain(target))

    def fractional_relabel(self, delta_level: int) -> "Polynomial":
        level = self.ctx.level + delta_level
        if level < 0:
            raise LevelError(f"resulting level {level} is negative", level)
        return Polynomial(self.terms, self.ctx.with_level(level), _normalized=True)

    def change_context(self, ctx: RingContext) -> "Polynomial":
        """Re-embed by variable name into another context"""
        positions = [None] * self.ctx.nvars
        for i, name in enumerate(self.ctx.variables):
            if name in ctx.variables:
                positions[i] = ctx.variables.index(name)
        out: Dict[Monomial, Coefficient] = {}
        for m, c in self.terms.items():
            exps = [0] * ctx.nvars
            for i, e in enumerate(m):
                if e:
                    if positions[i] is None:
                        raise MissingImageError(self.ctx.variables[i])
                    exps[positions[i]] = e
            out[tuple(exps)] = c
        return Polynomial(out, ctx)

    def map_coefficients(self, fn: Callable[[Coefficient], Scalar]) -> "Polynomial":
        return Polynomial({m: fn(c) for m, c in self.terms.items()}, self.ctx)

    def monic(self, order: MonomialOrder) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coefficient(order)
        return self.scale(self.ctx.domain.inverse(lc))

    # printing -----------------------------------------------------------

    def ctx_monomial(self, m: Monomial) -> str:
        return _format_monomial(m, self.ctx.variables, None) or "1"

    def format(self, order: Optional[MonomialOrder] = None) -> str:
        """Render in the input grammar (parse(format(f)) == f at level 0)"""
        return self._render(order, fractional=False)

    def display(self, order: Optional[MonomialOrder] = None) -> str:
        """Render with level-shifted exponents as X^{a/b}"""
        return self._render(order, fractional=True)

    def _render(self, order: Optional[MonomialOrder], fractional: bool) -> str:
        if not self.terms:
            return "0"
        denominator = None
        if fractional and self.ctx.level and self.ctx.prime:
            denominator = self.ctx.prime**self.ctx.level
        modular = self.ctx.domain.modulus is not None
        pieces = []
        for idx, (m, c) in enumerate(self.sorted_terms(order)):
            negative = (not modular) and c < 0
            magnitude = -c if negative else c
            mono = _format_monomial(m, self.ctx.variables, denominator)
            if not mono:
                body = str(magnitude)
            elif magnitude == 1:
                body = mono
            else:
                body = f"{magnitude}*{mono}"
            if idx == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.display()

    def __repr__(self) -> str:
        return f"Polynomial({self.format()!r}, {self.ctx})"


def _format_monomial(
    m: Monomial, variables: Tuple[str, ...], denominator: Optional[int]
) -> str:
    factors = []
    for name, e in zip(variables, m):
        if not e:
            continue
        if denominator:
            q = Fraction(e, denominator)
            if q.denominator == 1:
                e_str = str(q.numerator)
            else:
                e_str = f"{{{q.numerator}/{q.denominator}}}"
        else:
            e_str = str(e)
        factors.append(name if e_str == "1" else f"{name}^{e_str}")
    return "*".join(factors)


# module-level operations -----------------------------------------------------

_ARITH = {
    "add": lambda f, g: f + g,
    "sub": lambda f, g: f - g,
    "mul": lambda f, g: f * g,
    "pow": lambda f, n: f**n,
}


def poly_arith(op: str, f: Polynomial, g: Union[Polynomial, int]) -> Polynomial:
    try:
        fn = _ARITH[op]
    except KeyError:
        raise InputError(f"unknown operation '{op}'", stage="arith", op=op)
    return fn(f, g)


def substitute(f: Polynomial, images: Mapping[str, Polynomial]) -> Polynomial:
    return f.substitute(images)


def exact_div_int(f: Polynomial, n: int) -> Polynomial:
    return f.exact_div_int(n)


def reduce_mod(f: Polynomial, target: CoefficientDomain) -> Polynomial:
    return f.reduce_mod(target)


def fractional_relabel(f: Polynomial, delta_level: int) -> Polynomial:
    return f.fractional_relabel(delta_level)
