# app/services/semigroup.py
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, Optional, Sequence, Tuple

from sympy import Matrix

from ..algebra import Ideal, Polynomial, RingContext
from ..algebra.domains import CoefficientDomain
from ..core.errors import InputError, ResourceLimitError
from .delta import DeltaService, FrobeniusLiftSpec
from .ideals import IdealService

logger = logging.getLogger(__name__)

SUBSET_CAP = 8


@dataclass(frozen=True)
class SemigroupSpec:
    """Affine semigroup generated by nonzero vectors a_1..a_r of ℕ^n"""

    generators: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in a) for a in self.generators)
        if not gens:
            raise InputError("a semigroup needs at least one generator", stage="semigroup")
        n = len(gens[0])
        for a in gens:
            if len(a) != n:
                raise InputError(
                    f"generator {a} has dimension {len(a)}, expected {n}",
                    stage="semigroup",
                )
            if any(x < 0 for x in a) or not any(a):
                raise InputError(
                    f"generator {a} must be nonnegative and nonzero", stage="semigroup"
                )
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "SemigroupSpec":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dimension(self) -> int:
        return len(self.generators[0])

    @property
    def size(self) -> int:
        return len(self.generators)

    def matrix(self) -> Matrix:
        """n × r matrix with the generators as columns"""
        return Matrix(self.generators).T

    def to_payload(self) -> Dict[str, Any]:
        return {"generators": [list(a) for a in self.generators]}


@dataclass(frozen=True)
class SimplicialRank:
    rank: int
    simplicial: bool
    extremal: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class ToricPresentation:
    ctx: RingContext
    ideal: Ideal
    lift: FrobeniusLiftSpec
    delta_stable: bool

    def to_payload(self) -> Dict[str, Any]:
        return {
            "variables": list(self.ctx.variables),
            "ideal": self.ideal.strings(),
            "lift": self.lift.to_payload(),
            "delta_stable": self.delta_stable,
        }


class SemigroupService:
    def __init__(
        self,
        ideals: Optional[IdealService] = None,
        delta: Optional[DeltaService] = None,
    ):
        self.ideals = ideals or IdealService()
        self.delta = delta or DeltaService(self.ideals)

    def toric_ideal(self, sg: SemigroupSpec, prime: int) -> ToricPresentation:
        """
        Kernel of u_j ↦ t^{a_j}, with the monomial lift u_j ↦ u_j^p attached.

        The elimination runs over ℚ, where the reduced basis of a toric ideal consists
        of binomials with coefficients ±1; those are carried back to ℤ unchanged.
        """
        r, n = sg.size, sg.dimension
        u_names = tuple(f"u{j}" for j in range(1, r + 1))
        t_names = tuple(f"t{i}" for i in range(1, n + 1))
        qctx = RingContext(t_names + u_names, CoefficientDomain.rationals(), prime=prime)
        relations = []
        for j, a in enumerate(sg.generators):
            u = [0] * (n + r)
            u[n + j] = 1
            relations.append(
                Polynomial({tuple(u): 1, tuple(a) + (0,) * r: -1}, qctx)
            )
        eliminated = self.ideals.eliminate(Ideal(tuple(relations), qctx), t_names)
        zctx = RingContext(u_names, CoefficientDomain.integers(), prime=prime)
        uctx = qctx.with_variables(u_names)
        generators = tuple(
            Polynomial(g.change_context(uctx).terms, zctx) for g in eliminated
        )
        ideal = Ideal(generators, zctx)
        lift = FrobeniusLiftSpec.monomial(prime)
        stable = self.delta.is_delta_stable(ideal, lift)
        logger.info(f"toric ideal of {sg.generators}: {len(ideal)} binomials")
        return ToricPresentation(zctx, ideal, lift, stable)

    def vanishes_on_monomial_map(self, sg: SemigroupSpec, f: Polynomial) -> bool:
        """f(t^{a_1}, ..., t^{a_r}) == 0"""
        t_names = tuple(f"t{i}" for i in range(1, sg.dimension + 1))
        tctx = RingContext(t_names, f.ctx.domain, prime=f.ctx.prime)
        images = {
            name: Polynomial.monomial(a, tctx)
            for name, a in zip(f.ctx.variables, sg.generators)
        }
        return f.substitute(images).is_zero()

    def simplicial_rank(self, sg: SemigroupSpec) -> SimplicialRank:
        """
        Rank of the generator matrix and whether some rank-sized subset spans a cone
        containing every generator with nonnegative coordinates.
        """
        if sg.size > SUBSET_CAP:
            raise ResourceLimitError("subsets", sg.size, SUBSET_CAP)
        M = sg.matrix()
        rank = M.rank()
        for subset in combinations(range(sg.size), rank):
            sub = M[:, list(subset)]
            if sub.rank() < rank:
                continue
            if all(self._nonnegative_coordinates(sub, M[:, j]) for j in range(sg.size)):
                return SimplicialRank(rank, True, subset)
        return SimplicialRank(rank, False)

    @staticmethod
    def _nonnegative_coordinates(sub: Matrix, column: Matrix) -> bool:
        try:
            solution, params = sub.gauss_jordan_solve(column)
        except ValueError:
            return False
        if params.shape[0]:
            solution = solution.subs({s: 0 for s in params})
        return all(x >= 0 for x in solution)
