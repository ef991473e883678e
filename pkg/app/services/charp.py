# app/services/charp.py
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from ..algebra import Ideal, Polynomial
from ..core.errors import AlgebraError, ContextMismatchError, UnsupportedOperationError
from ..schemas.certificates import (
    LevelCheck,
    RootClosureCertificate,
    RootClosureVerdict,
)
from .ideals import IdealService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InjectivityResult:
    injective: bool
    witness: Optional[Polynomial] = None

    def __bool__(self) -> bool:
        return self.injective

    def to_payload(self) -> Dict[str, Any]:
        return {
            "injective": self.injective,
            "witness": self.witness.format() if self.witness is not None else None,
        }


class CharPService:
    """Characteristic-p checks over 𝔽_p[X]"""

    def __init__(self, ideals: Optional[IdealService] = None):
        self.ideals = ideals or IdealService()

    def _prime(self, ideal: Ideal) -> int:
        domain = ideal.ctx.domain
        if not domain.is_field or domain.p is None:
            raise UnsupportedOperationError(
                f"characteristic-p checks need a prime field, got {domain}"
            )
        return domain.p

    def frobenius_preimage(self, ideal: Ideal) -> Ideal:
        """K = {x : x^p ∈ I}"""
        self._prime(ideal)
        return self.ideals.contract_to_pth_powers(ideal)

    def nilpotent_witness(self, ideal: Ideal) -> Optional[Polynomial]:
        """A generator of the Frobenius preimage outside I, or None when I is radical"""
        preimage = self.frobenius_preimage(ideal)
        return self.ideals.first_non_member(preimage.generators, ideal)

    def is_reduced(self, ideal: Ideal) -> bool:
        return self.nilpotent_witness(ideal) is None

    def pth_power_injective(self, I1: Ideal, I2: Ideal) -> InjectivityResult:
        """
        Injectivity of R/I1 → R/I2, x ↦ x^p.

        Raises:
            AlgebraError: the map is not well defined (some g^p with g ∈ I1 lies outside I2)
        """
        if I1.ctx != I2.ctx:
            raise ContextMismatchError(I1.ctx, I2.ctx)
        p = self._prime(I1)
        for g in I1.generators:
            if not self.ideals.contains(I2, g**p):
                raise AlgebraError(
                    f"x -> x^{p} is not well defined: {g.format()}^{p} is not in "
                    f"{I2.format()}",
                    operation="pth_power_map",
                    generator=g.format(),
                )
        preimage = self.frobenius_preimage(I2)
        witness = self.ideals.first_non_member(preimage.generators, I1)
        return InjectivityResult(witness is None, witness)

    def zero_divisor_witness(self, f: Polynomial, ideal: Ideal) -> Optional[Polynomial]:
        """g ∉ I with g·f ∈ I, or None when f is a non-zero-divisor mod I"""
        if f.is_zero():
            return Polynomial.one(f.ctx)
        quotient = self.ideals.colon(ideal, f)
        return self.ideals.first_non_member(quotient.generators, ideal)

    def is_nonzerodivisor(self, f: Polynomial, ideal: Ideal) -> bool:
        return self.zero_divisor_witness(f, ideal) is None

    def p_root_closed_certificate(
        self, Jbar: Ideal, d: Polynomial, k: int
    ) -> RootClosureCertificate:
        """
        Injectivity of (J̄, d^{p^i}) → (J̄, d^{p^{i+1}}) under x ↦ x^p for i = 0..k.

        A zero-divisor d, or d ∈ J̄, is reported as a failed precondition.
        """
        p = self._prime(Jbar)
        if d.ctx != Jbar.ctx:
            raise ContextMismatchError(d.ctx, Jbar.ctx)
        if self.ideals.contains(Jbar, d):
            return RootClosureCertificate(
                levels_checked=k,
                verdict=RootClosureVerdict.PRECONDITION_FAILED,
                witness=d.format(),
                precondition="orientation vanishes modulo the relations",
            )
        zero_divisor = self.zero_divisor_witness(d, Jbar)
        if zero_divisor is not None:
            return RootClosureCertificate(
                levels_checked=k,
                verdict=RootClosureVerdict.PRECONDITION_FAILED,
                witness=zero_divisor.format(),
                precondition="orientation is a zero-divisor modulo the relations",
            )
        per_level: List[LevelCheck] = []
        for i in range(k + 1):
            lower = Jbar.with_generators(d ** (p**i))
            upper = Jbar.with_generators(d ** (p ** (i + 1)))
            result = self.pth_power_injective(lower, upper)
            witness = result.witness.format() if result.witness is not None else None
            per_level.append(LevelCheck(level=i, injective=result.injective, witness=witness))
            logger.debug(f"root closure level {i}: injective={result.injective}")
            if not result.injective:
                return RootClosureCertificate(
                    levels_checked=k,
                    per_level=per_level,
                    verdict=RootClosureVerdict.FAILED_AT,
                    failed_level=i,
                    witness=witness,
                )
        return RootClosureCertificate(
            levels_checked=k,
            per_level=per_level,
            verdict=RootClosureVerdict.CERTIFIED_UP_TO,
        )
