# app/services/tower.py
"""
Towers A/(J, d) → A/(J, φ(d)) → A/(J, φ²(d)) → ... attached to an oriented prism,
with their Frobenius projections, pillars, tilts and axiom checks.

Every object here is a finite presentation; limits and completions appear only as
labels.
"""
import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..algebra import Ideal, Polynomial, RingContext
from ..core.errors import HypothesisError, UnsupportedOperationError
from ..schemas.certificates import (
    AxiomCertificate,
    AxiomMethod,
    AxiomVerdict,
    HypothesisCertificate,
    Verdict,
)
from .delta import FrobeniusLiftSpec, LiftKind, delta_of, phi_pow
from .ideals import MembershipMode
from .prism import PrismFlavor, PrismService, PrismSpec

logger = logging.getLogger(__name__)

PURELY_INSEPARABLE_TAG = "purely-inseparable-only if (b) fails"


class RootsKind(str, Enum):
    ROOTS_OF_P = "p"
    ROOTS_OF_UNITY = "unity"


@dataclass(frozen=True)
class TowerLevel:
    index: int
    relations: Ideal
    presentation_level: int
    transition: str
    lift_kind: LiftKind = LiftKind.MONOMIAL

    @property
    def prime(self) -> int:
        return self.relations.ctx.prime

    def ring(self) -> str:
        ctx = self.relations.ctx
        level = self.presentation_level
        if level == 0:
            names = ctx.variables
        else:
            denominator = self.prime**level
            names = tuple(f"{name}^{{1/{denominator}}}" for name in ctx.variables)
        base = f"Z_({self.prime})"
        return f"{base}[{', '.join(names)}]" if names else base

    def display(self) -> str:
        return f"{self.ring()}/{self.relations.display()}"

    def to_payload(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "relations": self.relations.strings(),
            "presentation_level": self.presentation_level,
            "display": self.display(),
            "transition": self.transition,
        }


@dataclass(frozen=True)
class ProjectionKernel:
    """ker(π_i) = kernel/ambient inside 𝔽_p[X]/ambient"""

    index: int
    kernel: Ideal
    ambient: Ideal
    trivial: bool

    def to_payload(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "kernel": self.kernel.strings(),
            "ambient": self.ambient.strings(),
            "trivial": self.trivial,
        }


@dataclass(frozen=True)
class PillarLevel:
    index: int
    generator: Polynomial
    relations: Ideal


@dataclass(frozen=True)
class PillarReport:
    """
    Pillars f_i = d in A/(J, φ^i(d)) with the unit u = −δ(d)/φ(δ(d)) as a pair.
    """

    levels: Tuple[PillarLevel, ...]
    unit_numerator: Polynomial
    unit_denominator: Polynomial
    denominator_residue: int
    identity_verified: bool
    congruence_verified: bool

    def to_payload(self) -> Dict[str, Any]:
        return {
            "levels": [
                {
                    "index": level.index,
                    "pillar": level.generator.format(),
                    "relations": level.relations.strings(),
                }
                for level in self.levels
            ],
            "unit": {
                "numerator": self.unit_numerator.format(),
                "denominator": self.unit_denominator.format(),
                "denominator_residue": self.denominator_residue,
            },
            "identity_verified": self.identity_verified,
            "congruence_verified": self.congruence_verified,
        }


@dataclass(frozen=True)
class TiltReport:
    prime: int
    variables: Tuple[str, ...]
    relations: Ideal
    completion: Optional[Polynomial]
    transition: str = "F"
    extra_variable: Optional[str] = None

    def display(self) -> str:
        ring = f"F_{self.prime}[{', '.join(self.variables)}]" if self.variables else (
            f"F_{self.prime}"
        )
        quotient = ring if self.relations.is_zero() else f"{ring}/{self.relations.display()}"
        if self.completion is None:
            return quotient
        return f"({quotient})^({self.completion.display()})"

    def to_payload(self) -> Dict[str, Any]:
        return {
            "display": self.display(),
            "relations": self.relations.strings(),
            "completion": self.completion.format() if self.completion is not None else None,
            "transition": self.transition,
            "extra_variable": self.extra_variable,
            "small_tilt_pillar": (
                f"({self.completion.format()})" if self.completion is not None else None
            ),
        }


@dataclass(frozen=True)
class RootsTower:
    base_change: PrismSpec
    levels: Tuple[TowerLevel, ...]
    presentations: Tuple[TowerLevel, ...]
    tilt: TiltReport
    checks: Tuple[Verdict, ...]

    def to_payload(self) -> Dict[str, Any]:
        return {
            "base_change": self.base_change.to_payload(),
            "levels": [level.to_payload() for level in self.levels],
            "fractional": [level.to_payload() for level in self.presentations],
            "tilt": self.tilt.to_payload(),
            "checks": [check.model_dump() for check in self.checks],
        }


class TowerService:
    def __init__(
        self,
        prisms: Optional[PrismService] = None,
        spot_checks: int = 32,
        seed: int = 0,
    ):
        self.prisms = prisms or PrismService()
        self.ideals = self.prisms.ideals
        self.charp = self.prisms.charp
        self.spot_checks = spot_checks
        self.seed = seed

    # levels -------------------------------------------------------------

    def build_tower(
        self,
        spec: PrismSpec,
        k: int,
        force: bool = False,
        hypotheses: Optional[HypothesisCertificate] = None,
    ) -> List[TowerLevel]:
        """
        Levels 0..k with relations (J, φ^i(d)).

        Raises:
            HypothesisError: the hypotheses fail and force is not set
        """
        if hypotheses is None and not force:
            hypotheses = self.prisms.theorem_hypotheses(spec, k)
        if hypotheses is not None and not hypotheses.overall:
            component = hypotheses.first_failure()
            if not force:
                raise HypothesisError(
                    f"hypothesis '{component}' fails; use --force to build anyway",
                    component=component,
                )
            logger.warning(f"building tower despite failed hypothesis '{component}'")
        return self._levels(spec, k)

    def _levels(self, spec: PrismSpec, k: int) -> List[TowerLevel]:
        levels = []
        orientation = spec.d
        for i in range(k + 1):
            if i:
                orientation = phi_pow(orientation, 1, spec.lift)
            transition = "base" if i == 0 else f"phi: level {i - 1} -> level {i}"
            levels.append(
                TowerLevel(
                    index=i,
                    relations=spec.J.with_generators(orientation),
                    presentation_level=0,
                    transition=transition,
                    lift_kind=spec.lift.kind,
                )
            )
        return levels

    def fractional_presentation(self, level: TowerLevel, p: int) -> TowerLevel:
        """
        Relabel X ↦ X^{1/p^i}: (J, φ^i(d)) reads as (J^{1/p^i}, d), and φ becomes
        the inclusion.
        """
        if level.lift_kind != LiftKind.MONOMIAL:
            raise UnsupportedOperationError(
                "fractional presentations need a monomial lift"
            )
        if level.prime != p:
            raise UnsupportedOperationError(
                f"level prime {level.prime} differs from {p}", prime=p
            )
        i = level.index
        transition = "base" if i == 0 else f"inclusion: level {i - 1} -> level {i}"
        return TowerLevel(
            index=i,
            relations=level.relations.fractional_relabel(i - level.presentation_level),
            presentation_level=i,
            transition=transition,
            lift_kind=level.lift_kind,
        )

    # Frobenius projections ----------------------------------------------

    def _mod_p_relations(self, spec: PrismSpec, exponent: int) -> Ideal:
        """(J̄, d̄^{exponent})"""
        return spec.Jbar.with_generators(spec.dbar**exponent)

    def projection_kernel(self, spec: PrismSpec, i: int) -> ProjectionKernel:
        """Kernel of π_i: A/(p, J, d^{p^{i+1}}) ↠ A/(p, J, d^{p^i})"""
        p = spec.prime
        kernel = self._mod_p_relations(spec, p**i)
        ambient = self._mod_p_relations(spec, p ** (i + 1))
        trivial = self.ideals.is_subideal(kernel, ambient)
        return ProjectionKernel(i, kernel, ambient, trivial)

    def frobenius_kernel(self, spec: PrismSpec, i: int) -> Ideal:
        """{x : x^p = 0} in A/(p, J, d^{p^{i+1}}), computed by contraction to p-th powers"""
        return self.charp.frobenius_preimage(
            self._mod_p_relations(spec, spec.prime ** (i + 1))
        )

    # pillars and tilts --------------------------------------------------

    def pillars(self, spec: PrismSpec, k: int) -> PillarReport:
        """
        Raises:
            HypothesisError: φ(δ(d)) is not a unit at the maximal ideal
        """
        p = spec.prime
        delta_d = delta_of(spec.d, spec.lift)
        phi_d = phi_pow(spec.d, 1, spec.lift)
        numerator = -delta_d
        denominator = phi_pow(delta_d, 1, spec.lift)
        residue = spec.apply_shift(denominator).constant_term() % p
        if residue == 0:
            raise HypothesisError(
                f"φ(δ(d)) = {denominator.format()} is not a unit at the maximal ideal",
                component="distinguished",
            )
        identity = (spec.d**p + delta_d.scale(p) - phi_d).is_zero()
        # f_1^p ≡ p·(−δ(d)) modulo (J, φ(d))
        congruence = self.ideals.contains(
            spec.J.with_generators(phi_d),
            spec.d**p - numerator.scale(p),
            MembershipMode.ZP_LOCAL,
        )
        levels = tuple(
            PillarLevel(level.index, spec.d, level.relations)
            for level in self._levels(spec, k)
            if level.index >= 1
        )
        return PillarReport(levels, numerator, denominator, residue, identity, congruence)

    def tilt(self, spec: PrismSpec, extra_variable: Optional[str] = None) -> TiltReport:
        """(A/pA)^∧d with Frobenius transitions"""
        dbar = spec.dbar
        return TiltReport(
            prime=spec.prime,
            variables=spec.ctx.variables,
            relations=spec.Jbar,
            completion=None if dbar.is_zero() else dbar,
            extra_variable=extra_variable,
        )

    # δ-ring towers by base change ---------------------------------------

    def base_change(
        self, ctx: RingContext, J: Ideal, lift: FrobeniusLiftSpec, kind: RootsKind
    ) -> Tuple[PrismSpec, str]:
        """R ⊗ (ℤ_(p)[T], p − T) or R ⊗ (ℤ_(p)[q], [p]_q) with the lift extended by X^p"""
        kind = RootsKind(kind)
        p = ctx.prime
        (name,) = ctx.fresh_names(["T" if kind == RootsKind.ROOTS_OF_P else "q"])
        ectx = ctx.extended((name,))
        relations = J.change_context(ectx)
        if lift.is_monomial:
            extended = FrobeniusLiftSpec.monomial(p)
        else:
            extended = FrobeniusLiftSpec.custom(
                p, {v: image.change_context(ectx) for v, image in lift.images}
            )
        t = Polynomial.variable(name, ectx)
        if kind == RootsKind.ROOTS_OF_P:
            spec = PrismSpec.build(
                ectx, relations, p - t, extended, name=f"roots of {p}"
            )
        else:
            cyclotomic = sum((t**j for j in range(1, p)), Polynomial.one(ectx))
            spec = PrismSpec.build(
                ectx,
                relations,
                cyclotomic,
                extended,
                shift={name: t + 1},
                name="roots of unity",
            )
        return spec, name

    def adjoin_roots_tower(
        self,
        ctx: RingContext,
        J: Ideal,
        lift: FrobeniusLiftSpec,
        kind: RootsKind,
        k: int,
    ) -> RootsTower:
        """
        Tower R^{1/p^i} ⊗ ℤ[p^{1/p^i}] (or ⊗ ℤ[ζ_{p^{i+1}}]) for a δ-ring R = A/J.

        Raises:
            HypothesisError: R is not δ-stable, has p-torsion or is not reduced mod p
        """
        spec, name = self.base_change(ctx, J, lift, kind)
        base = PrismSpec.build(
            ctx, J, Polynomial.constant(ctx.prime, ctx), lift, PrismFlavor.CRYSTALLINE
        )
        stable = self.prisms.delta_stable_verdict(base)
        torsion = self.prisms.p_torsion_free_check(J)
        witness = self.charp.nilpotent_witness(base.Jbar) if not J.is_zero() else None
        reduced = (
            Verdict.ok("reduced_mod_p")
            if witness is None
            else Verdict.fail(
                "reduced_mod_p", witness=witness.format(), detail="R/pR is not reduced"
            )
        )
        checks = (stable, torsion, reduced)
        for check in checks:
            if not check.passed:
                raise HypothesisError(
                    f"{check.name} fails for the base ring (witness {check.witness})",
                    component=check.name,
                    witness=check.witness,
                )
        levels = self._levels(spec, k)
        presentations: Tuple[TowerLevel, ...] = ()
        if spec.lift.is_monomial:
            presentations = tuple(
                self.fractional_presentation(level, spec.prime) for level in levels
            )
        logger.info(f"adjoined {RootsKind(kind).value}-roots tower with {k + 1} levels")
        return RootsTower(
            spec, tuple(levels), presentations, self.tilt(spec, name), checks
        )

    # axioms -------------------------------------------------------------

    def _random_poly(self, rng: random.Random, ctx: RingContext, degree: int) -> Polynomial:
        p = ctx.prime
        terms = {}
        for _ in range(rng.randint(1, 3)):
            steps = rng.randint(0, degree)
            exps = [0] * ctx.nvars
            for _ in range(steps):
                if ctx.nvars:
                    exps[rng.randrange(ctx.nvars)] += 1
            terms[tuple(exps)] = rng.randrange(1, p)
        return Polynomial(terms, ctx)

    def _frobenius_spot_check(
        self, spec: PrismSpec, k: int
    ) -> Tuple[bool, Optional[str]]:
        """x^p depends only on π_i(x): (x + y)^p − x^p ∈ level i+1 for y ∈ ker π_i"""
        rng = random.Random(self.seed)
        p = spec.prime
        ctx = spec.Jbar.ctx
        for n in range(self.spot_checks):
            i = n % (k + 1)
            kernel = self.projection_kernel(spec, i)
            x = self._random_poly(rng, ctx, 4)
            y = Polynomial.zero(ctx)
            for g in kernel.kernel:
                y = y + self._random_poly(rng, ctx, 2) * g
            difference = (x + y) ** p - x**p
            if not self.ideals.contains(kernel.ambient, difference):
                return False, difference.format()
        return True, None

    def axiom_certificate(
        self,
        spec: PrismSpec,
        k: int,
        hypotheses: Optional[HypothesisCertificate] = None,
    ) -> AxiomCertificate:
        """Axioms (a)–(g) for levels 0..k; failures are recorded, never raised"""
        p = spec.prime
        levels = list(range(k + 1))
        axioms = [
            AxiomVerdict(
                axiom="a",
                method=AxiomMethod.PROVED,
                passed=True,
                detail="level 0 is A/(J, d) and p lies in (p, d)",
            )
        ]

        failed_levels, witness = [], None
        for i in levels:
            lower = self._mod_p_relations(spec, p**i)
            upper = self._mod_p_relations(spec, p ** (i + 1))
            result = self.charp.pth_power_injective(lower, upper)
            if not result.injective:
                failed_levels.append(i)
                if witness is None:
                    witness = result.witness.format()
        axioms.append(
            AxiomVerdict(
                axiom="b",
                method=AxiomMethod.CHECKED,
                passed=not failed_levels,
                levels=failed_levels or levels,
                witness=witness,
                detail=(
                    "transition maps injective modulo (p, d)"
                    if not failed_levels
                    else f"x -> x^{p} not injective at levels {failed_levels}"
                ),
            )
        )

        spot_ok, spot_witness = self._frobenius_spot_check(spec, k)
        axioms.append(
            AxiomVerdict(
                axiom="c",
                method=AxiomMethod.PROVED,
                passed=spot_ok,
                levels=levels,
                witness=spot_witness,
                detail=f"Frobenius factors through the projection; {self.spot_checks} spot checks",
            )
        )
        axioms.append(
            AxiomVerdict(
                axiom="d",
                method=AxiomMethod.PROVED,
                passed=True,
                levels=levels,
                detail="Frobenius projections are quotient maps",
            )
        )
        axioms.append(
            AxiomVerdict(
                axiom="e",
                method=AxiomMethod.PROVED,
                passed=True,
                detail=f"{spec.flavor.value} prism localized at (p, {', '.join(spec.ctx.variables) or 'd'})",
            )
        )

        kernel_failures, kernel_witness = [], None
        for i in levels:
            pillar_power = self.projection_kernel(spec, i).kernel
            frobenius_kernel = self.frobenius_kernel(spec, i)
            if not self.ideals.ideal_equal(frobenius_kernel, pillar_power):
                kernel_failures.append(i)
                extra = self.ideals.first_non_member(
                    frobenius_kernel.generators, pillar_power
                )
                if kernel_witness is None and extra is not None:
                    kernel_witness = extra.format()
        axioms.append(
            AxiomVerdict(
                axiom="f",
                method=AxiomMethod.CHECKED,
                passed=not kernel_failures,
                levels=kernel_failures or levels,
                witness=kernel_witness,
                detail=(
                    "Frobenius kernels generated by powers of the first pillar"
                    if not kernel_failures
                    else f"Frobenius kernel exceeds the pillar power at levels {kernel_failures}"
                ),
            )
        )

        torsion = (
            hypotheses.p_torsion_free
            if hypotheses is not None and hypotheses.p_torsion_free is not None
            else self.prisms.p_torsion_free_check(spec.J)
        )
        axioms.append(
            AxiomVerdict(
                axiom="g",
                method=AxiomMethod.CHECKED,
                passed=torsion.passed,
                witness=torsion.witness,
                detail="p-torsion-free, so the torsion parts vanish",
            )
        )

        tags = [] if not failed_levels else [PURELY_INSEPARABLE_TAG]
        certificate = AxiomCertificate(levels=k, axioms=axioms, tags=tags)
        logger.info(f"axiom certificate for levels 0..{k}: overall={certificate.overall}")
        return certificate
