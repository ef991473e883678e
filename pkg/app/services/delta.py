# app/services/delta.py
"""
δ-ring calculus on polynomial rings over ℤ.

A Frobenius lift φ with φ(X) ≡ X^p mod p determines δ(f) = (φ(f) − f^p)/p.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from math import factorial
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from ..algebra import Ideal, Monomial, MonomialOrder, Polynomial, RingContext
from ..algebra.domains import CoefficientDomain, DomainKind
from ..core.errors import (
    InconclusiveMembershipError,
    InputError,
    InvalidLiftError,
    NotPhiMonomialError,
    NotStabilizedError,
    UnknownVariableError,
    UnsupportedOperationError,
)
from .ideals import IdealService, MembershipMode

logger = logging.getLogger(__name__)


class LiftKind(str, Enum):
    MONOMIAL = "monomial"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FrobeniusLiftSpec:
    """
    Frobenius lift given by variable images; variables without an image map to X^p.
    """

    prime: int
    kind: LiftKind = LiftKind.MONOMIAL
    images: Tuple[Tuple[str, Polynomial], ...] = ()

    @classmethod
    def monomial(cls, prime: int) -> "FrobeniusLiftSpec":
        return cls(prime)

    @classmethod
    def custom(cls, prime: int, images: Mapping[str, Polynomial]) -> "FrobeniusLiftSpec":
        if not images:
            return cls.monomial(prime)
        return cls(prime, LiftKind.CUSTOM, tuple(sorted(images.items())))

    @property
    def is_monomial(self) -> bool:
        return self.kind == LiftKind.MONOMIAL

    def image_map(self, ctx: RingContext) -> Dict[str, Polynomial]:
        custom = dict(self.images)
        result = {}
        for name in ctx.variables:
            image = custom.get(name)
            if image is None:
                result[name] = Polynomial.variable(name, ctx) ** self.prime
            else:
                result[name] = image.change_context(ctx)
        return result

    def to_payload(self) -> Dict[str, Any]:
        if self.is_monomial:
            return {"kind": self.kind.value, "prime": self.prime}
        return {
            "kind": self.kind.value,
            "prime": self.prime,
            "images": {name: image.format() for name, image in self.images},
        }


@dataclass(frozen=True)
class PhiMonomialDecomposition:
    parts: Tuple[Tuple[int, Monomial], ...]
    ctx: RingContext

    def __len__(self) -> int:
        return len(self.parts)

    def reconstruct(self) -> Polynomial:
        return Polynomial({m: k for k, m in self.parts}, self.ctx)

    def to_payload(self) -> List[Dict[str, Any]]:
        return [
            {"coefficient": k, "monomial": Polynomial.monomial(m, self.ctx).format()}
            for k, m in self.parts
        ]


@dataclass(frozen=True)
class StabilizationStep:
    iteration: int
    generator: Polynomial
    image: Polynomial
    member: bool
    tier: str


@dataclass(frozen=True)
class StabilizationResult:
    generators: Tuple[Polynomial, ...]
    ctx: RingContext
    delta_height: Optional[int]
    trace: Tuple[StabilizationStep, ...]

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.generators, self.ctx)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "generators": [g.format() for g in self.generators],
            "delta_height": self.delta_height,
            "trace": [
                {
                    "iteration": step.iteration,
                    "generator": step.generator.format(),
                    "delta": step.image.format(),
                    "member": step.member,
                    "tier": step.tier,
                }
                for step in self.trace
            ],
        }


# lift validation and the δ-operator -------------------------------------


def _check_prime(spec: FrobeniusLiftSpec, ctx: RingContext):
    if ctx.prime is not None and ctx.prime != spec.prime:
        raise InputError(
            f"lift prime {spec.prime} differs from context prime {ctx.prime}",
            stage="lift",
        )


def validate_frobenius_lift(spec: FrobeniusLiftSpec, ctx: RingContext) -> None:
    """
    Check φ(X) − X^p ≡ 0 mod p for every variable.

    Raises:
        InvalidLiftError: first coefficient prime to p
    """
    _check_prime(spec, ctx)
    if spec.is_monomial:
        return
    p = spec.prime
    for name, image in spec.images:
        if name not in ctx.variables:
            raise UnknownVariableError(name)
        if image.ctx.domain.kind != DomainKind.INTEGER:
            raise InputError(
                f"lift image of '{name}' must have integer coefficients",
                stage="lift",
                variable=name,
            )
        image = image.change_context(ctx)
        difference = image - Polynomial.variable(name, ctx) ** p
        for m, c in difference.sorted_terms():
            if c % p:
                raise InvalidLiftError(name, c, difference.ctx_monomial(m))


def _require_lift_ring(f: Polynomial):
    if f.ctx.domain.kind not in (DomainKind.INTEGER, DomainKind.RATIONAL):
        raise UnsupportedOperationError(
            f"δ is computed over ZZ, got {f.ctx.domain}", domain=str(f.ctx.domain)
        )


def phi_pow(f: Polynomial, i: int, spec: FrobeniusLiftSpec) -> Polynomial:
    """φ^i(f); monomial lifts scale exponents by p^i"""
    if i < 0:
        raise InputError(f"phi power must be nonnegative, got {i}", stage="phi_pow")
    if i == 0:
        return f
    if spec.is_monomial:
        scale = spec.prime**i
        return Polynomial(
            {tuple(e * scale for e in m): c for m, c in f.terms.items()},
            f.ctx,
            _normalized=True,
        )
    images = spec.image_map(f.ctx)
    for _ in range(i):
        f = f.substitute(images)
    return f


def delta_of(f: Polynomial, spec: FrobeniusLiftSpec) -> Polynomial:
    """δ(f) = (φ(f) − f^p)/p"""
    _require_lift_ring(f)
    _check_prime(spec, f.ctx)
    return (phi_pow(f, 1, spec) - f**spec.prime).exact_div_int(spec.prime)


def phi_monomial_decomposition(
    f: Polynomial, spec: FrobeniusLiftSpec
) -> PhiMonomialDecomposition:
    """Split f into integer multiples of φ-monomials"""
    ctx = f.ctx
    images = None if spec.is_monomial else spec.image_map(ctx)
    parts = []
    for m, c in f.sorted_terms():
        if images is not None:
            M = Polynomial.monomial(m, ctx)
            if M.substitute(images) != M**spec.prime:
                raise NotPhiMonomialError(M.format())
        parts.append((int(c), m))
    return PhiMonomialDecomposition(tuple(parts), ctx)


# the Fermat family f = X_1^{n_1} + ... + X_m^{n_m} ------------------------


def fermat_context(m: int, prime: int) -> RingContext:
    return RingContext(
        tuple(f"X{i}" for i in range(1, m + 1)),
        CoefficientDomain.integers(),
        prime=prime,
    )


def fermat_polynomial(exponents: Sequence[int], ctx: RingContext) -> Polynomial:
    n = ctx.nvars
    terms = {}
    for i, e in enumerate(exponents):
        m = [0] * n
        m[i] = e
        terms[tuple(m)] = 1
    return Polynomial(terms, ctx)


def _bounded_compositions(total: int, parts: int, cap: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in _bounded_compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def beta_poly(
    p: int,
    m: int,
    exponents: Sequence[int],
    ctx: Optional[RingContext] = None,
) -> Polynomial:
    """
    Closed form β with δ(X_1^{n_1} + ... + X_m^{n_m}) ≡ β mod f, in X_2..X_m.

    Evaluates −Σ (p−1)!/(f!·e!) (−1)^{Σf} Π X_j^{n_j(e_j + f_j)} over
    0 ≤ e_j, f_j ≤ p − 1 with Σe + Σf = p and Σf ≤ p − 1.

    Args:
        p: prime
        m: number of variables of f, at least 3
        exponents: (n_2, ..., n_m)
        ctx: target context containing X2..Xm (a fresh ℤ-context when omitted)
    """
    if m < 3:
        raise InputError(f"m must be at least 3, got {m}", stage="beta", m=m)
    exponents = tuple(exponents)
    if len(exponents) != m - 1 or any(n < 1 for n in exponents):
        raise InputError(
            f"expected {m - 1} positive exponents, got {exponents}", stage="beta"
        )
    names = tuple(f"X{j}" for j in range(2, m + 1))
    if ctx is None:
        ctx = RingContext(names, CoefficientDomain.integers(), prime=p)
    k = m - 1
    positions = [ctx.index(name) for name in names]
    p_fact = factorial(p)
    terms: Dict[Monomial, int] = {}
    for parts in _bounded_compositions(p, 2 * k, p - 1):
        fs, es = parts[:k], parts[k:]
        if sum(fs) > p - 1:
            continue
        denominator = 1
        for part in parts:
            denominator *= factorial(part)
        coefficient = p_fact // denominator // p
        sign = -1 if sum(fs) % 2 == 0 else 1
        exps = [0] * ctx.nvars
        for pos, n, fj, ej in zip(positions, exponents, fs, es):
            exps[pos] = n * (fj + ej)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + sign * coefficient
    return Polynomial(terms, ctx)


@dataclass(frozen=True)
class FermatInitialIdeal:
    exponents: Tuple[int, ...]
    prime: int
    computed: Ideal
    predicted: Ideal
    agrees: bool

    def to_payload(self) -> Dict[str, Any]:
        return {
            "exponents": list(self.exponents),
            "computed": self.computed.strings(),
            "predicted": self.predicted.strings(),
            "agrees": self.agrees,
        }


@dataclass(frozen=True)
class ReducednessPrediction:
    reduced: bool
    witness: Optional[Polynomial] = None


def _check_fermat_shape(exponents: Sequence[int], p: int) -> Tuple[int, ...]:
    exponents = tuple(exponents)
    if len(exponents) != p + 1 or any(n < 1 for n in exponents):
        raise InputError(
            f"expected {p + 1} positive exponents for p={p}, got {exponents}",
            stage="fermat",
        )
    return exponents


def reducedness_prediction(
    exponents: Sequence[int], p: int, ctx: Optional[RingContext] = None
) -> ReducednessPrediction:
    """
    F_p[X]/(f)_δ is reduced iff at most one n_i is divisible by p (p ∈ {2, 3}).

    For p = 2 with two even exponents n_a, n_b the witness
    X_a^{n_a} + X_a^{n_a/2}X_b^{n_b/2} + X_b^{n_b} squares to β.
    """
    exponents = _check_fermat_shape(exponents, p)
    divisible = [i for i, n in enumerate(exponents) if n % p == 0]
    if len(divisible) <= 1:
        return ReducednessPrediction(True)
    if p != 2:
        return ReducednessPrediction(False)
    ctx = ctx or fermat_context(len(exponents), p)
    a, b = divisible[:2]
    na, nb = exponents[a], exponents[b]
    zero = [0] * ctx.nvars

    def mono(ea: int, eb: int) -> Monomial:
        m = list(zero)
        m[a], m[b] = ea, eb
        return tuple(m)

    witness = Polynomial(
        {mono(na, 0): 1, mono(na // 2, nb // 2): 1, mono(0, nb): 1}, ctx
    )
    return ReducednessPrediction(False, witness)


class DeltaService:
    """δ-height, δ-stabilization and δ-stability on top of IdealService"""

    def __init__(self, ideals: Optional[IdealService] = None, max_iter: int = 8):
        self.ideals = ideals or IdealService()
        self.max_iter = max_iter

    def delta_stabilize(
        self,
        J: Ideal,
        spec: FrobeniusLiftSpec,
        max_iter: Optional[int] = None,
    ) -> StabilizationResult:
        """
        Adjoin δ of each new generator until every δ-image is already a member.

        Returns:
            StabilizationResult with delta_height = number of rounds that added generators

        Raises:
            NotStabilizedError: still growing after max_iter rounds
            InconclusiveMembershipError: a membership test could not be decided
        """
        max_iter = self.max_iter if max_iter is None else max_iter
        validate_frobenius_lift(spec, J.ctx)
        generators: List[Polynomial] = list(J.generators)
        frontier = list(generators)
        trace: List[StabilizationStep] = []
        for iteration in range(max_iter + 1):
            current = Ideal(tuple(generators), J.ctx)
            added: List[Polynomial] = []
            for g in frontier:
                image = delta_of(g, spec)
                certificate = self.ideals.membership(
                    image, current, MembershipMode.ZP_LOCAL
                )
                if not certificate.conclusive:
                    raise InconclusiveMembershipError(
                        image.format(), certificate.reason or "undecided"
                    )
                trace.append(
                    StabilizationStep(
                        iteration, g, image, certificate.member, certificate.tier.value
                    )
                )
                if not certificate.member and image not in added:
                    added.append(image)
            logger.debug(
                f"stabilization round {iteration}: {len(added)} generators adjoined"
            )
            if not added:
                result = StabilizationResult(
                    tuple(generators), J.ctx, iteration, tuple(trace)
                )
                logger.info(
                    f"δ-stabilization finished with height {iteration} and "
                    f"{len(generators)} generators"
                )
                return result
            generators.extend(added)
            frontier = added
        raise NotStabilizedError(
            max_iter,
            partial=StabilizationResult(tuple(generators), J.ctx, None, tuple(trace)),
        )

    def delta_height_bound(
        self, f: Polynomial, spec: FrobeniusLiftSpec, max_iter: Optional[int] = None
    ) -> int:
        """δ-height of Σ k_i t_i in ℤ[t_1..t_m] with δ(t_i) = 0, an upper bound for f"""
        decomposition = phi_monomial_decomposition(f, spec)
        m = len(decomposition)
        if m == 0 or (m == 1 and decomposition.parts[0][0] % spec.prime != 0):
            return 0
        template_ctx = RingContext(
            tuple(f"t{i}" for i in range(1, m + 1)),
            CoefficientDomain.integers(),
            prime=spec.prime,
        )
        template = Polynomial(
            {
                tuple(1 if j == i else 0 for j in range(m)): k
                for i, (k, _) in enumerate(decomposition.parts)
            },
            template_ctx,
        )
        result = self.delta_stabilize(
            Ideal((template,), template_ctx),
            FrobeniusLiftSpec.monomial(spec.prime),
            max_iter,
        )
        return result.delta_height

    def first_unstable(
        self, J: Ideal, spec: FrobeniusLiftSpec
    ) -> Optional[Tuple[Polynomial, Polynomial]]:
        """(g, δ(g)) for the first generator whose δ is not a member, else None"""
        validate_frobenius_lift(spec, J.ctx)
        for g in J.generators:
            image = delta_of(g, spec)
            if not self.ideals.membership(image, J, MembershipMode.ZP_LOCAL).require():
                return g, image
        return None

    def is_delta_stable(self, J: Ideal, spec: FrobeniusLiftSpec) -> bool:
        return self.first_unstable(J, spec) is None

    def fermat_initial_ideal(
        self, exponents: Sequence[int], p: int
    ) -> FermatInitialIdeal:
        """Lex initial ideal of (f, δ(f)) over F_p next to its closed-form prediction"""
        exponents = _check_fermat_shape(exponents, p)
        ctx = fermat_context(len(exponents), p)
        f = fermat_polynomial(exponents, ctx)
        field = CoefficientDomain.prime_field(p)
        pair = Ideal((f, delta_of(f, FrobeniusLiftSpec.monomial(p))), ctx).reduce_mod(
            field
        )
        computed = self.ideals.initial_ideal(pair, MonomialOrder.lex())
        fctx = pair.ctx
        n1, n2 = exponents[0], exponents[1]
        zero = [0] * fctx.nvars
        first = list(zero)
        first[0] = n1
        second = list(zero)
        if p == 2:
            second[1] = 2 * n2
        else:
            second[1] = n2 * (p - 1)
            second[2] = 1
        predicted = Ideal(
            (Polynomial.monomial(first, fctx), Polynomial.monomial(second, fctx)), fctx
        )
        agrees = self.ideals.ideal_equal(computed, predicted)
        return FermatInitialIdeal(exponents, p, computed, predicted, agrees)
