# app/services/prism.py
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from ..algebra import Ideal, MonomialOrder, Polynomial, RingContext
from ..algebra.domains import CoefficientDomain
from ..core.errors import (
    AlgebraError,
    ContextMismatchError,
    InputError,
    UnknownVariableError,
    UnsupportedOperationError,
)
from ..schemas.certificates import (
    HypothesisCertificate,
    LevelCheck,
    RootClosureCertificate,
    RootClosureVerdict,
    Verdict,
)
from .charp import CharPService
from .delta import DeltaService, FrobeniusLiftSpec, delta_of, validate_frobenius_lift
from .ideals import MembershipMode
from .semigroup import SemigroupService, SemigroupSpec

logger = logging.getLogger(__name__)

REGULAR_SEQUENCE_NOTE = (
    "p, d is checked as a regular sequence in this order only; without derived "
    "completeness the order may matter"
)


class PrismFlavor(str, Enum):
    ZARISKIAN = "zariskian"
    CRYSTALLINE = "crystalline"


@dataclass(frozen=True)
class PrismSpec:
    """
    Oriented prism (A/J, (d)) with A = ℤ_(p)[X] and a Frobenius lift on A.

    `shift` moves the maximal ideal used for unit checks to (p, X_1, ..., X_n),
    e.g. q ↦ q + 1 for the q-de Rham prism.
    """

    ctx: RingContext
    J: Ideal
    lift: FrobeniusLiftSpec
    d: Polynomial
    flavor: PrismFlavor = PrismFlavor.ZARISKIAN
    shift: Tuple[Tuple[str, Polynomial], ...] = ()
    name: str = ""

    def __post_init__(self):
        ctx = self.ctx
        if not ctx.domain.is_integers:
            raise InputError(f"prisms live over ZZ, got {ctx.domain}", stage="prism")
        if ctx.prime is None:
            raise InputError("a prism needs a prime", stage="prism")
        if self.J.ctx != ctx:
            raise ContextMismatchError(self.J.ctx, ctx)
        if self.d.ctx != ctx:
            raise ContextMismatchError(self.d.ctx, ctx)
        if self.lift.prime != ctx.prime:
            raise InputError(
                f"lift prime {self.lift.prime} differs from {ctx.prime}", stage="prism"
            )
        flavor = PrismFlavor(self.flavor)
        object.__setattr__(self, "flavor", flavor)
        if flavor == PrismFlavor.CRYSTALLINE and self.d != Polynomial.constant(
            ctx.prime, ctx
        ):
            raise InputError(
                f"a crystalline prism has orientation p, got {self.d.format()}",
                stage="prism",
            )
        for name, image in self.shift:
            if name not in ctx.variables:
                raise UnknownVariableError(name)
            if image.ctx != ctx:
                raise ContextMismatchError(image.ctx, ctx)
        validate_frobenius_lift(self.lift, ctx)

    @classmethod
    def build(
        cls,
        ctx: RingContext,
        J: Ideal,
        d: Polynomial,
        lift: Optional[FrobeniusLiftSpec] = None,
        flavor: PrismFlavor = PrismFlavor.ZARISKIAN,
        shift: Optional[Mapping[str, Polynomial]] = None,
        name: str = "",
    ) -> "PrismSpec":
        lift = lift or FrobeniusLiftSpec.monomial(ctx.prime)
        return cls(ctx, J, lift, d, flavor, tuple(sorted((shift or {}).items())), name)

    @property
    def prime(self) -> int:
        return self.ctx.prime

    @property
    def is_crystalline(self) -> bool:
        return self.flavor == PrismFlavor.CRYSTALLINE

    @property
    def residue_field(self) -> CoefficientDomain:
        return CoefficientDomain.prime_field(self.prime)

    @property
    def Jbar(self) -> Ideal:
        return self.J.reduce_mod(self.residue_field)

    @property
    def dbar(self) -> Polynomial:
        return self.d.reduce_mod(self.residue_field)

    def apply_shift(self, f: Polynomial) -> Polynomial:
        if not self.shift:
            return f
        images = {name: Polynomial.variable(name, self.ctx) for name in self.ctx.variables}
        images.update(dict(self.shift))
        return f.substitute(images)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "prime": self.prime,
            "variables": list(self.ctx.variables),
            "ideal": self.J.strings(),
            "orientation": self.d.format(),
            "flavor": self.flavor.value,
            "lift": self.lift.to_payload(),
            "shift": {name: image.format() for name, image in self.shift},
        }


@dataclass(frozen=True)
class GenericDegree:
    rank: int
    prime: int
    degree: int
    transition_degree: int
    support: Tuple[str, ...] = ()

    @classmethod
    def of_rank(cls, rank: int, prime: int, support: Tuple[str, ...] = ()):
        degree = prime**rank
        return cls(rank, prime, degree, prime * degree, support)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "deg_phi": self.degree,
            "transition_degree": self.transition_degree,
        }


class PrismService:
    """Hypothesis checks for prisms and lattice-index generic degrees"""

    def __init__(
        self,
        delta: Optional[DeltaService] = None,
        charp: Optional[CharPService] = None,
        semigroups: Optional[SemigroupService] = None,
    ):
        self.delta = delta or DeltaService()
        self.ideals = self.delta.ideals
        self.charp = charp or CharPService(self.ideals)
        self.semigroups = semigroups or SemigroupService(self.ideals, self.delta)

    # preprism -----------------------------------------------------------

    def delta_stable_verdict(self, spec: PrismSpec) -> Verdict:
        unstable = self.delta.first_unstable(spec.J, spec.lift)
        if unstable is None:
            return Verdict.ok("delta_stable")
        g, image = unstable
        return Verdict.fail(
            "delta_stable",
            witness=image.format(),
            detail=f"δ({g.format()}) is not in J",
        )

    def _orientation_verdict(self, spec: PrismSpec) -> Verdict:
        if spec.d.is_zero():
            return Verdict.fail("orientation", witness="0", detail="degenerate orientation")
        if self.ideals.contains(spec.J, spec.d, MembershipMode.ZP_LOCAL):
            return Verdict.fail(
                "orientation", witness=spec.d.format(), detail="orientation lies in J"
            )
        return Verdict.ok("orientation")

    def validate_preprism(self, spec: PrismSpec) -> HypothesisCertificate:
        """δ-stability of J and d ∉ J; the other components stay empty"""
        stable = self.delta_stable_verdict(spec)
        orientation = self._orientation_verdict(spec)
        return HypothesisCertificate(
            delta_stable=stable,
            orientation=orientation,
            flavor=spec.flavor.value,
            overall=stable.passed and orientation.passed,
        )

    # distinguished element ----------------------------------------------

    def distinguished_unit_check(self, spec: PrismSpec) -> Verdict:
        """
        δ(d) is a unit at the maximal ideal (p, X_1, ..., X_n) after the shift.

        The shifted relations and orientation must lie in that maximal ideal.
        """
        p = spec.prime
        for g in spec.J:
            residue = spec.apply_shift(g).constant_term() % p
            if residue:
                return Verdict.fail(
                    "distinguished",
                    witness=g.format(),
                    detail="relation is a unit at the maximal ideal; declare a shift",
                )
        if spec.apply_shift(spec.d).constant_term() % p:
            return Verdict.fail(
                "distinguished",
                witness=spec.d.format(),
                detail="orientation is a unit at the maximal ideal",
            )
        delta_d = spec.apply_shift(delta_of(spec.d, spec.lift))
        residue = delta_d.constant_term() % p
        if residue == 0:
            return Verdict.fail(
                "distinguished",
                witness=delta_d.format(),
                detail="δ(d) vanishes at the maximal ideal",
            )
        return Verdict.ok("distinguished", detail=f"residue of δ(d) is {residue} mod {p}")

    # transversality -----------------------------------------------------

    def p_torsion_free_check(self, J: Ideal) -> Verdict:
        """(J : p) ⊆ J over ℤ_(p)"""
        if J.is_zero():
            return Verdict.ok("p_torsion_free", detail="J = 0")
        prime = J.ctx.prime
        quotient = self.ideals.colon(J, Polynomial.constant(prime, J.ctx))
        witness = self.ideals.first_non_member(
            quotient.generators, J, MembershipMode.ZP_LOCAL
        )
        if witness is None:
            return Verdict.ok("p_torsion_free")
        return Verdict.fail(
            "p_torsion_free",
            witness=witness.format(),
            detail=f"{prime}·({witness.format()}) lies in J",
        )

    def d_nzd_mod_p_check(self, spec: PrismSpec) -> Verdict:
        if spec.is_crystalline:
            return Verdict.ok("d_nzd_mod_p", method="not-applicable", detail="d = p")
        witness = self.charp.zero_divisor_witness(spec.dbar, spec.Jbar)
        if witness is None:
            return Verdict.ok("d_nzd_mod_p")
        return Verdict.fail(
            "d_nzd_mod_p",
            witness=witness.format(),
            detail="d is a zero-divisor modulo (p, J)",
        )

    def transversal_check(self, spec: PrismSpec) -> Tuple[Verdict, Verdict]:
        return self.p_torsion_free_check(spec.J), self.d_nzd_mod_p_check(spec)

    # root closedness ----------------------------------------------------

    def root_closed_certificate(self, spec: PrismSpec, k: int) -> RootClosureCertificate:
        if not spec.is_crystalline:
            return self.charp.p_root_closed_certificate(spec.Jbar, spec.dbar, k)
        Jbar = spec.Jbar
        result = self.charp.pth_power_injective(Jbar, Jbar)
        witness = result.witness.format() if result.witness is not None else None
        check = LevelCheck(level=0, injective=result.injective, witness=witness)
        if result.injective:
            return RootClosureCertificate(
                levels_checked=0,
                per_level=[check],
                verdict=RootClosureVerdict.CERTIFIED_UP_TO,
            )
        return RootClosureCertificate(
            levels_checked=0,
            per_level=[check],
            verdict=RootClosureVerdict.FAILED_AT,
            failed_level=0,
            witness=witness,
        )

    def theorem_hypotheses(self, spec: PrismSpec, k: int) -> HypothesisCertificate:
        """All hypotheses of the tower construction for levels 0..k"""
        if k < 0:
            raise InputError(f"levels must be nonnegative, got {k}", stage="levels")
        preprism = self.validate_preprism(spec)
        distinguished = self.distinguished_unit_check(spec)
        torsion, nzd = self.transversal_check(spec)
        root_closed = self.root_closed_certificate(spec, k)
        notes = [REGULAR_SEQUENCE_NOTE]
        if spec.is_crystalline:
            notes.append("crystalline: root closedness reduces to A/pA being reduced")
        else:
            notes.append(f"root closedness certified at polynomial level for levels 0..{k}")
        overall = (
            preprism.overall
            and distinguished.passed
            and torsion.passed
            and nzd.passed
            and root_closed.passed
        )
        certificate = HypothesisCertificate(
            delta_stable=preprism.delta_stable,
            orientation=preprism.orientation,
            distinguished=distinguished,
            p_torsion_free=torsion,
            d_nzd_mod_p=nzd,
            root_closed=root_closed,
            flavor=spec.flavor.value,
            levels=k,
            overall=overall,
            notes=notes,
        )
        failure = certificate.first_failure()
        logger.info(
            f"hypotheses for {spec.name or spec.d.format()}: "
            + ("pass" if overall else f"fail at {failure}")
        )
        return certificate

    # generic degree -----------------------------------------------------

    def quotient_dimension(self, ideal: Ideal) -> Tuple[int, Tuple[str, ...]]:
        """
        Krull dimension of 𝔽_p[X]/I with a maximal independent set of variables,
        read off the initial ideal.
        """
        ctx = ideal.ctx
        initial = self.ideals.initial_ideal(ideal, MonomialOrder.grevlex())
        supports = [
            {i for i, e in enumerate(next(iter(g.terms))) if e} for g in initial
        ]
        if any(not s for s in supports):
            raise AlgebraError("the quotient ring is zero", operation="generic_degree")
        for size in range(ctx.nvars, -1, -1):
            for subset in combinations(range(ctx.nvars), size):
                chosen = set(subset)
                if not any(s <= chosen for s in supports):
                    return size, tuple(ctx.variables[i] for i in subset)
        return 0, ()

    def generic_degree_monomial(
        self,
        spec: Union[PrismSpec, SemigroupSpec],
        prime: Optional[int] = None,
    ) -> GenericDegree:
        """deg φ = p^rank for a monomial lift; the tower transition has degree p·deg φ"""
        if isinstance(spec, SemigroupSpec):
            if prime is None:
                raise InputError("a semigroup degree needs a prime", stage="generic_degree")
            rank = self.semigroups.simplicial_rank(spec).rank
            return GenericDegree.of_rank(rank, prime)
        if not spec.lift.is_monomial:
            raise UnsupportedOperationError(
                "generic degrees are computed for monomial lifts only"
            )
        rank, support = self.quotient_dimension(spec.Jbar)
        return GenericDegree.of_rank(rank, spec.prime, support)

