# app/services/ideals.py
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

from ..algebra import Ideal, MonomialOrder, Polynomial, RingContext
from ..algebra.domains import CoefficientDomain
from ..core.errors import (
    AlgebraError,
    ContextMismatchError,
    InconclusiveMembershipError,
    InputError,
    ResourceLimitError,
    UnsupportedOperationError,
)
from .groebner import GroebnerBasis, GroebnerEngine

logger = logging.getLogger(__name__)


class MembershipMode(str, Enum):
    FP = "Fp"
    Q = "Q"
    Z = "Z"
    ZP_LOCAL = "Zp_local"


class MembershipVerdict(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non_member"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MembershipCertificate:
    """
    Outcome of a membership test.

    When `cofactors` is set, denominator·element == Σ cofactors[i]·generators[i]
    holds exactly in the generators' context.
    """

    element: Polynomial
    generators: Tuple[Polynomial, ...]
    verdict: MembershipVerdict
    tier: MembershipMode
    denominator: int = 1
    cofactors: Optional[Tuple[Polynomial, ...]] = None
    reason: Optional[str] = None

    @property
    def member(self) -> bool:
        return self.verdict == MembershipVerdict.MEMBER

    @property
    def conclusive(self) -> bool:
        return self.verdict != MembershipVerdict.INCONCLUSIVE

    def verify(self) -> bool:
        """Re-check the cofactor identity by exact arithmetic"""
        if not self.member or self.cofactors is None:
            return False
        ctx = self.generators[0].ctx if self.generators else self.element.ctx
        lhs = self.element.change_context(ctx).scale(self.denominator)
        rhs = Polynomial.zero(ctx)
        for q, g in zip(self.cofactors, self.generators):
            rhs = rhs + q * g
        return lhs == rhs

    def require(self) -> bool:
        """Boolean verdict; raises when inconclusive"""
        if not self.conclusive:
            raise InconclusiveMembershipError(self.element.format(), self.reason or "")
        return self.member

    def to_payload(self) -> Dict[str, Any]:
        payload = {
            "element": self.element.format(),
            "verdict": self.verdict.value,
            "tier": self.tier.value,
            "denominator": self.denominator,
        }
        if self.cofactors is not None:
            payload["cofactors"] = [q.format() for q in self.cofactors]
        if self.reason:
            payload["reason"] = self.reason
        return payload


class IdealService:
    """Ideal-theoretic operations on top of a GroebnerEngine"""

    def __init__(self, engine: Optional[GroebnerEngine] = None):
        self.engine = engine or GroebnerEngine()

    # membership ---------------------------------------------------------

    def membership(
        self,
        f: Polynomial,
        ideal: Ideal,
        mode: Optional[MembershipMode] = None,
        with_cofactors: bool = False,
    ) -> MembershipCertificate:
        """
        Decide f ∈ ideal.

        Args:
            f: element, same context as the ideal
            ideal: generators
            mode: Fp, Q, Z or Zp_local; defaults to Z over ℤ and to the field itself
            with_cofactors: attach a re-verifiable cofactor identity when member

        Returns:
            MembershipCertificate
        """
        if f.ctx != ideal.ctx:
            raise ContextMismatchError(f.ctx, ideal.ctx)
        domain = ideal.ctx.domain
        if mode is None:
            mode = MembershipMode.Z if domain.is_integers else None
        mode = MembershipMode(mode) if mode is not None else None

        if mode is None:
            if not domain.is_field:
                raise UnsupportedOperationError(
                    f"membership over {domain} is not supported"
                )
            return self._field_membership(f, ideal, mode_tag(domain), with_cofactors)
        if mode == MembershipMode.FP:
            prime = self._require_prime(ideal.ctx)
            target = CoefficientDomain.prime_field(prime)
            return self._field_membership(
                f.reduce_mod(target), ideal.reduce_mod(target), mode, with_cofactors
            )
        if mode == MembershipMode.Q:
            target = CoefficientDomain.rationals()
            return self._field_membership(
                f.reduce_mod(target), ideal.reduce_mod(target), mode, with_cofactors
            )
        self._require_integers(ideal.ctx, mode)
        if mode == MembershipMode.Z:
            return self._integer_membership(f, ideal, with_cofactors)
        return self._local_membership(f, ideal, with_cofactors)

    def contains(
        self, ideal: Ideal, f: Polynomial, mode: Optional[MembershipMode] = None
    ) -> bool:
        return self.membership(f, ideal, mode).require()

    def _field_membership(
        self,
        f: Polynomial,
        ideal: Ideal,
        tier: MembershipMode,
        with_cofactors: bool,
    ) -> MembershipCertificate:
        G = self.engine.basis(ideal, with_cofactors=with_cofactors)
        remainder, quotients = self.engine.divide(f, G)
        member = remainder.is_zero()
        cofactors = None
        if member and with_cofactors:
            cofactors = self._generator_cofactors(G, quotients)
        return MembershipCertificate(
            element=f,
            generators=ideal.generators,
            verdict=MembershipVerdict.MEMBER if member else MembershipVerdict.NON_MEMBER,
            tier=tier,
            cofactors=cofactors,
        )

    def _integer_membership(
        self, f: Polynomial, ideal: Ideal, with_cofactors: bool, scale: int = 1
    ) -> MembershipCertificate:
        G = self.engine.strong_groebner_int(ideal, with_cofactors=with_cofactors)
        target = f.scale(scale)
        remainder, quotients = self.engine.divide(target, G)
        member = remainder.is_zero()
        cofactors = None
        if member and with_cofactors:
            cofactors = self._generator_cofactors(G, quotients)
        return MembershipCertificate(
            element=f,
            generators=ideal.generators,
            verdict=MembershipVerdict.MEMBER if member else MembershipVerdict.NON_MEMBER,
            tier=MembershipMode.Z if scale == 1 else MembershipMode.ZP_LOCAL,
            denominator=scale,
            cofactors=cofactors,
        )

    def _local_membership(
        self, f: Polynomial, ideal: Ideal, with_cofactors: bool
    ) -> MembershipCertificate:
        """
        Membership in the ideal generated over ℤ_(p).

        {c : c·f ∈ I} is a principal ideal (c0) of ℤ; f is a ℤ_(p)-member iff p ∤ c0.
        Any c from the ℚ tier is a multiple of c0, so its prime-to-p part decides.
        """
        p = self._require_prime(ideal.ctx)
        integer_failure = None
        try:
            certificate = self._integer_membership(f, ideal, with_cofactors)
            if certificate.member:
                return certificate
        except ResourceLimitError as e:
            integer_failure = e

        rational = self._field_membership(
            f.reduce_mod(CoefficientDomain.rationals()),
            ideal.reduce_mod(CoefficientDomain.rationals()),
            MembershipMode.Q,
            with_cofactors=True,
        )
        if not rational.member:
            return MembershipCertificate(
                element=f,
                generators=ideal.generators,
                verdict=MembershipVerdict.NON_MEMBER,
                tier=MembershipMode.Q,
            )
        if integer_failure is not None:
            return MembershipCertificate(
                element=f,
                generators=ideal.generators,
                verdict=MembershipVerdict.INCONCLUSIVE,
                tier=MembershipMode.ZP_LOCAL,
                reason=f"rational member, integer check stopped: {integer_failure}",
            )

        denominator = 1
        for q in rational.cofactors:
            for c in q.terms.values():
                denominator = lcm(denominator, Fraction(c).denominator)
        prime_free = denominator
        while prime_free % p == 0:
            prime_free //= p
        logger.debug(
            f"local membership of {f.format()}: denominator {denominator}, "
            f"prime-to-{p} part {prime_free}"
        )
        if prime_free == 1:
            return MembershipCertificate(
                element=f,
                generators=ideal.generators,
                verdict=MembershipVerdict.NON_MEMBER,
                tier=MembershipMode.ZP_LOCAL,
                denominator=denominator,
                reason=f"every admissible denominator is divisible by {p}",
            )
        try:
            scaled = self._integer_membership(f, ideal, with_cofactors, scale=prime_free)
        except ResourceLimitError as e:
            return MembershipCertificate(
                element=f,
                generators=ideal.generators,
                verdict=MembershipVerdict.INCONCLUSIVE,
                tier=MembershipMode.ZP_LOCAL,
                denominator=prime_free,
                reason=str(e),
            )
        if scaled.member:
            return scaled
        return MembershipCertificate(
            element=f,
            generators=ideal.generators,
            verdict=MembershipVerdict.NON_MEMBER,
            tier=MembershipMode.ZP_LOCAL,
            denominator=denominator,
            reason=f"every admissible denominator is divisible by {p}",
        )

    def _generator_cofactors(
        self, G: GroebnerBasis, quotients: Dict[int, Polynomial]
    ) -> Tuple[Polynomial, ...]:
        ctx = G.ctx
        cofactors = [Polynomial.zero(ctx) for _ in G.source]
        for k, q in quotients.items():
            for j, r in enumerate(G.cofactors[k]):
                cofactors[j] = cofactors[j] + q * r
        return tuple(cofactors)

    # subideals and equality --------------------------------------------

    def is_subideal(
        self, I: Ideal, J: Ideal, mode: Optional[MembershipMode] = None
    ) -> bool:
        """I ⊆ J"""
        return self.first_non_member(I.generators, J, mode) is None

    def first_non_member(
        self,
        candidates: Iterable[Polynomial],
        ideal: Ideal,
        mode: Optional[MembershipMode] = None,
    ) -> Optional[Polynomial]:
        for g in candidates:
            if not self.contains(ideal, g, mode):
                return g
        return None

    def ideal_equal(
        self, I: Ideal, J: Ideal, mode: Optional[MembershipMode] = None
    ) -> bool:
        """Mutual membership of generators"""
        if I.ctx != J.ctx:
            raise ContextMismatchError(I.ctx, J.ctx)
        return self.is_subideal(I, J, mode) and self.is_subideal(J, I, mode)

    # elimination and friends -------------------------------------------

    def eliminate(self, ideal: Ideal, drop: Sequence[str]) -> Ideal:
        """
        I ∩ R[remaining variables], returned in the original context.

        Uses a block elimination order with the dropped variables first; over ℤ the
        strong basis has the same elimination property.
        """
        ctx = ideal.ctx
        drop = tuple(dict.fromkeys(drop))
        for name in drop:
            ctx.index(name)
        if not drop or ideal.is_zero():
            return ideal
        keep = tuple(v for v in ctx.variables if v not in drop)
        ectx = ctx.with_variables(drop + keep)
        k = len(drop)
        G = self.engine.basis(
            ideal.change_context(ectx), MonomialOrder.elimination(k)
        )
        kept = [
            g for g in G.elements if all(not any(m[:k]) for m in g.terms)
        ]
        logger.debug(f"eliminated {drop}: {len(kept)} of {len(G)} basis elements kept")
        return Ideal(tuple(g.change_context(ctx) for g in kept), ctx)

    def intersect(self, I: Ideal, J: Ideal) -> Ideal:
        """I ∩ J as (t·I + (1 − t)·J) ∩ R"""
        if I.ctx != J.ctx:
            raise ContextMismatchError(I.ctx, J.ctx)
        ctx = I.ctx
        if I.is_zero() or J.is_zero():
            return Ideal.zero(ctx)
        (t_name,) = ctx.fresh_names(["t"])
        tctx = ctx.extended((t_name,), front=True)
        t = Polynomial.variable(t_name, tctx)
        gens = [t * g.change_context(tctx) for g in I] + [
            (1 - t) * h.change_context(tctx) for h in J
        ]
        eliminated = self.eliminate(Ideal(tuple(gens), tctx), [t_name])
        return Ideal(tuple(g.change_context(ctx) for g in eliminated), ctx)

    def colon(self, ideal: Ideal, f: Polynomial) -> Ideal:
        """(I : f) = (I ∩ (f)) / f"""
        if f.ctx != ideal.ctx:
            raise ContextMismatchError(f.ctx, ideal.ctx)
        if f.is_zero():
            raise AlgebraError("colon by the zero polynomial", operation="colon")
        if ideal.is_zero():
            return ideal
        meet = self.intersect(ideal, Ideal((f,), ideal.ctx))
        return Ideal(tuple(self.exact_quotient(g, f) for g in meet), ideal.ctx)

    def exact_quotient(self, g: Polynomial, f: Polynomial) -> Polynomial:
        """q with g = q·f; AlgebraError when f does not divide g"""
        order = self.engine.default_order
        single = GroebnerBasis(
            elements=(f,),
            order=order,
            ctx=f.ctx,
            reduced=False,
            strong=f.ctx.domain.is_integers,
        )
        remainder, quotients = self.engine.divide(g, single)
        if not remainder.is_zero():
            raise AlgebraError(
                f"{f.format()} does not divide {g.format()}", operation="exact_quotient"
            )
        return quotients.get(0, Polynomial.zero(f.ctx))

    def initial_ideal(self, ideal: Ideal, order: Optional[MonomialOrder] = None) -> Ideal:
        """Monomial ideal of leading monomials of the reduced basis"""
        if not ideal.ctx.domain.is_field:
            raise UnsupportedOperationError(
                f"initial ideals are computed over fields, not {ideal.ctx.domain}"
            )
        G = self.engine.groebner_field(ideal, order)
        ctx = ideal.ctx
        return Ideal(
            tuple(Polynomial.monomial(m, ctx) for m, _ in G.leading_terms()), ctx
        )

    def contract_to_pth_powers(self, ideal: Ideal) -> Ideal:
        """
        {x : x^p ∈ I} over 𝔽_p, as the p-th root of I ∩ 𝔽_p[X_1^p, ..., X_n^p].
        """
        ctx = ideal.ctx
        domain = ctx.domain
        if not domain.is_field or domain.p is None:
            raise UnsupportedOperationError(
                f"p-th power contraction needs a prime field, got {domain}"
            )
        if ideal.is_zero():
            return ideal
        p = domain.p
        n = ctx.nvars
        roots = ctx.fresh_names(ctx.variables)
        ectx = ctx.extended(roots)
        relations = [
            Polynomial.variable(y, ectx) - Polynomial.variable(x, ectx) ** p
            for x, y in zip(ctx.variables, roots)
        ]
        lifted = Ideal(
            tuple(g.change_context(ectx) for g in ideal) + tuple(relations), ectx
        )
        contracted = self.eliminate(lifted, ctx.variables)
        relabeled = tuple(
            Polynomial({m[n:]: c for m, c in g.terms.items()}, ctx) for g in contracted
        )
        return Ideal(relabeled, ctx)

    # helpers ------------------------------------------------------------

    def _require_prime(self, ctx: RingContext) -> int:
        if ctx.prime is None:
            raise InputError(
                "this membership mode needs a context prime", stage="membership"
            )
        return ctx.prime

    def _require_integers(self, ctx: RingContext, mode: MembershipMode):
        if not ctx.domain.is_integers:
            raise UnsupportedOperationError(
                f"membership mode {mode.value} needs ZZ coefficients, got {ctx.domain}"
            )


def mode_tag(domain: CoefficientDomain) -> MembershipMode:
    return MembershipMode.FP if domain.p is not None else MembershipMode.Q
