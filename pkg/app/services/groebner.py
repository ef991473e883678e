# app/services/groebner.py
import logging
from collections import OrderedDict
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Dict, Iterable, List, Optional, Set, Tuple

from sympy import igcdex, ilcm
from sympy.polys.monomials import (
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
)

from ..algebra import Ideal, Monomial, MonomialOrder, Polynomial, RingContext
from ..algebra.domains import Coefficient, CoefficientDomain
from ..config import EngineLimits, get_settings
from ..core.errors import (
    ContextMismatchError,
    LevelError,
    ResourceLimitError,
    UnsupportedOperationError,
    log_performance,
)

logger = logging.getLogger(__name__)

Terms = Dict[Monomial, Coefficient]


@dataclass(frozen=True)
class GroebnerBasis:
    """
    Gröbner basis of `source` under `order`, sorted by leading monomial (descending).

    `cofactors[k][j]` is the coefficient of source generator j in elements[k] when the
    basis was computed with cofactor tracking.
    """

    elements: Tuple[Polynomial, ...]
    order: MonomialOrder
    ctx: RingContext
    reduced: bool
    strong: bool
    source: Tuple[Polynomial, ...] = ()
    cofactors: Optional[Tuple[Tuple[Polynomial, ...], ...]] = None

    @property
    def domain(self) -> CoefficientDomain:
        return self.ctx.domain

    def leading_terms(self) -> List[Tuple[Monomial, Coefficient]]:
        return [g.leading_term(self.order) for g in self.elements]

    def is_unit(self) -> bool:
        return any(
            g.is_constant() and (self.domain.is_field or g.constant_term() in (1, -1))
            for g in self.elements
        )

    def ideal(self) -> Ideal:
        return Ideal(self.elements, self.ctx)

    def format(self) -> str:
        return "{" + ", ".join(g.format() for g in self.elements) + "}"

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class EngineStats:
    pairs_processed: int = 0
    bases_computed: int = 0
    cache_hits: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {
            "pairs_processed": self.pairs_processed,
            "bases_computed": self.bases_computed,
            "cache_hits": self.cache_hits,
        }


@dataclass
class _Element:
    terms: Terms
    lm: Monomial
    lc: Coefficient
    rep: Optional[List[Polynomial]] = None

    @property
    def degree(self) -> int:
        return max(sum(m) for m in self.terms)


def _sub_scaled(
    target: Terms, terms: Terms, shift: Monomial, coef: Coefficient, normalize
) -> None:
    """target -= coef * x^shift * terms, in place"""
    for m, c in terms.items():
        mm = monomial_mul(m, shift)
        v = normalize(target.get(mm, 0) - coef * c)
        if v:
            target[mm] = v
        else:
            target.pop(mm, None)


def _add_scaled(
    target: Terms, terms: Terms, shift: Monomial, coef: Coefficient, normalize
) -> None:
    _sub_scaled(target, terms, shift, -coef, normalize)


class GroebnerEngine:
    """
    Buchberger engine over 𝔽_p and ℚ, strong bases over ℤ.

    Bases are cached per (context, generators, order, cofactor tracking); the
    cache keeps the most recently used limits.cache_size bases, and it and the
    counters belong to this engine instance.
    """

    def __init__(
        self,
        limits: Optional[EngineLimits] = None,
        default_order: Optional[MonomialOrder] = None,
    ):
        self.limits = limits or get_settings().limits
        self.default_order = default_order or MonomialOrder.grevlex()
        self.stats = EngineStats()
        self._cache: "OrderedDict[tuple, GroebnerBasis]" = OrderedDict()

    # public API ---------------------------------------------------------

    def basis(
        self,
        ideal: Ideal,
        order: Optional[MonomialOrder] = None,
        with_cofactors: bool = False,
    ) -> GroebnerBasis:
        """Field basis or strong ℤ basis, depending on the context domain"""
        domain = ideal.ctx.domain
        if domain.is_field:
            return self.groebner_field(ideal, order, with_cofactors)
        if domain.is_integers:
            return self.strong_groebner_int(ideal, order, with_cofactors)
        raise UnsupportedOperationError(
            f"Gröbner bases over {domain} are not supported", domain=str(domain)
        )

    def groebner_field(
        self,
        ideal: Ideal,
        order: Optional[MonomialOrder] = None,
        with_cofactors: bool = False,
    ) -> GroebnerBasis:
        """
        Reduced Gröbner basis over a field.

        Args:
            ideal: generators over 𝔽_p or ℚ, level 0
            order: monomial order (engine default when omitted)
            with_cofactors: track each element as a combination of the generators

        Returns:
            GroebnerBasis with reduced=True
        """
        order = order or self.default_order
        if not ideal.ctx.domain.is_field:
            raise UnsupportedOperationError(
                f"groebner_field needs a field, got {ideal.ctx.domain}"
            )
        cached = self._lookup("field", ideal, order, with_cofactors)
        if cached is not None:
            return cached
        start = datetime.now(timezone.utc)
        elements = self._buchberger_field(ideal, order, with_cofactors)
        basis = self._finish(ideal, order, elements, strong=False, track=with_cofactors)
        self._store("field", ideal, order, with_cofactors, basis)
        log_performance(
            "groebner_field", start, generators=len(ideal), basis=len(basis)
        )
        return basis

    def strong_groebner_int(
        self,
        ideal: Ideal,
        order: Optional[MonomialOrder] = None,
        with_cofactors: bool = False,
    ) -> GroebnerBasis:
        """Strong Gröbner basis over ℤ from S-pairs and G-pairs"""
        order = order or self.default_order
        if not ideal.ctx.domain.is_integers:
            raise UnsupportedOperationError(
                f"strong_groebner_int needs ZZ, got {ideal.ctx.domain}"
            )
        cached = self._lookup("int", ideal, order, with_cofactors)
        if cached is not None:
            return cached
        start = datetime.now(timezone.utc)
        elements = self._buchberger_int(ideal, order, with_cofactors)
        basis = self._finish(ideal, order, elements, strong=True, track=with_cofactors)
        self._store("int", ideal, order, with_cofactors, basis)
        log_performance(
            "strong_groebner_int", start, generators=len(ideal), basis=len(basis)
        )
        return basis

    def normal_form(self, f: Polynomial, G: GroebnerBasis) -> Polynomial:
        """Remainder of f with no term reducible by G (coefficient divisibility over ℤ)"""
        remainder, _ = self.divide(f, G)
        return remainder

    def divide(
        self, f: Polynomial, G: GroebnerBasis
    ) -> Tuple[Polynomial, Dict[int, Polynomial]]:
        """Remainder of f and quotients indexed by position in G.elements"""
        if f.ctx != G.ctx:
            raise ContextMismatchError(f.ctx, G.ctx)
        elements = [self._element(g.terms, None, G.order, G.domain) for g in G.elements]
        remainder, quotients = self._reduce(
            dict(f.terms), elements, G.order, G.domain, track=True
        )
        return (
            Polynomial(remainder, f.ctx, _normalized=True),
            {k: Polynomial(q, f.ctx, _normalized=True) for k, q in quotients.items()},
        )

    def contains(self, f: Polynomial, G: GroebnerBasis) -> bool:
        return self.normal_form(f, G).is_zero()

    def cached_bases(self) -> Tuple[GroebnerBasis, ...]:
        return tuple(self._cache.values())

    def verify_basis(self, G: GroebnerBasis) -> bool:
        """Post-hoc Buchberger criterion (plus G-pairs over ℤ)"""
        elements = [self._element(g.terms, None, G.order, G.domain) for g in G.elements]
        for j in range(len(elements)):
            for i in range(j):
                candidates = [self._spoly(elements[i], elements[j], G.domain)[0]]
                if G.strong:
                    gpoly = self._gpoly(elements[i], elements[j])
                    if gpoly is not None:
                        candidates.append(gpoly[0])
                for terms in candidates:
                    r, _ = self._reduce(terms, elements, G.order, G.domain, track=False)
                    if r:
                        return False
        return True

    # element helpers ----------------------------------------------------

    def _element(
        self,
        terms: Terms,
        rep: Optional[List[Polynomial]],
        order: MonomialOrder,
        domain: CoefficientDomain,
        normalize_lc: bool = False,
    ) -> _Element:
        lm = order.leading(terms)
        lc = terms[lm]
        if normalize_lc:
            if domain.is_field and lc != 1:
                inv = domain.inverse(lc)
                terms = {m: domain.normalize(c * inv) for m, c in terms.items()}
                rep = [r.scale(inv) for r in rep] if rep is not None else None
                lc = 1
            elif domain.is_integers and lc < 0:
                terms = {m: -c for m, c in terms.items()}
                rep = [-r for r in rep] if rep is not None else None
                lc = -lc
        return _Element(terms, lm, lc, rep)

    def _check_ideal(self, ideal: Ideal):
        if ideal.ctx.level != 0:
            raise LevelError(
                "Gröbner computations run at level 0 only", ideal.ctx.level
            )

    def _check_degree(self, element: _Element):
        degree = element.degree
        if degree > self.limits.max_degree:
            raise ResourceLimitError("degree", degree, self.limits.max_degree)

    def _count_pair(self, processed: int):
        self.stats.pairs_processed += 1
        if processed > self.limits.max_pairs:
            raise ResourceLimitError("pairs", processed, self.limits.max_pairs)

    def _initial(
        self, ideal: Ideal, order: MonomialOrder, track: bool
    ) -> Iterable[_Element]:
        self._check_ideal(ideal)
        ctx = ideal.ctx
        n = len(ideal.generators)
        zero = Polynomial.zero(ctx)
        one = Polynomial.one(ctx)
        for k, g in enumerate(ideal.generators):
            rep = [one if j == k else zero for j in range(n)] if track else None
            element = self._element(
                dict(g.terms), rep, order, ctx.domain, normalize_lc=True
            )
            self._check_degree(element)
            yield element

    def _combine_rep(
        self,
        ctx: RingContext,
        parts: Iterable[Tuple[Monomial, Coefficient, Optional[List[Polynomial]]]],
    ) -> Optional[List[Polynomial]]:
        """Σ coef * x^shift * rep over the given parts"""
        result = None
        for shift, coef, rep in parts:
            if rep is None:
                return None
            scaled = [r.mul_term(shift, coef) for r in rep]
            result = scaled if result is None else [a + b for a, b in zip(result, scaled)]
        return result

    def _spoly(
        self, f: _Element, g: _Element, domain: CoefficientDomain
    ) -> Tuple[Terms, List[Tuple[Monomial, Coefficient, Optional[List[Polynomial]]]]]:
        lcm = monomial_lcm(f.lm, g.lm)
        sf = monomial_div(lcm, f.lm)
        sg = monomial_div(lcm, g.lm)
        if domain.is_integers:
            c = ilcm(f.lc, g.lc)
            cf, cg = c // f.lc, -(c // g.lc)
        else:
            cf = domain.inverse(f.lc)
            cg = domain.normalize(-domain.inverse(g.lc))
        terms: Terms = {}
        _add_scaled(terms, f.terms, sf, cf, domain.normalize)
        _add_scaled(terms, g.terms, sg, cg, domain.normalize)
        return terms, [(sf, cf, f.rep), (sg, cg, g.rep)]

    def _gpoly(
        self, f: _Element, g: _Element
    ) -> Optional[
        Tuple[Terms, List[Tuple[Monomial, Coefficient, Optional[List[Polynomial]]]]]
    ]:
        if f.lc % g.lc == 0 or g.lc % f.lc == 0:
            return None
        u, v, _ = igcdex(f.lc, g.lc)
        lcm = monomial_lcm(f.lm, g.lm)
        sf = monomial_div(lcm, f.lm)
        sg = monomial_div(lcm, g.lm)
        terms: Terms = {}
        _add_scaled(terms, f.terms, sf, int(u), int)
        _add_scaled(terms, g.terms, sg, int(v), int)
        return terms, [(sf, int(u), f.rep), (sg, int(v), g.rep)]

    def _reduce(
        self,
        terms: Terms,
        basis: List[_Element],
        order: MonomialOrder,
        domain: CoefficientDomain,
        track: bool,
    ) -> Tuple[Terms, Dict[int, Terms]]:
        """
        Full division of `terms` by `basis`. Over ℤ a term is reducible only when the
        divisor's leading coefficient divides its coefficient.
        """
        normalize = domain.normalize
        integers = domain.is_integers
        key = order.key
        p = dict(terms)
        remainder: Terms = {}
        quotients: Dict[int, Terms] = {}
        while p:
            m = max(p, key=key)
            c = p[m]
            for idx, g in enumerate(basis):
                shift = monomial_div(m, g.lm)
                if shift is None:
                    continue
                if integers:
                    if c % g.lc:
                        continue
                    coef = c // g.lc
                else:
                    coef = normalize(c * domain.inverse(g.lc))
                _sub_scaled(p, g.terms, shift, coef, normalize)
                if track:
                    q = quotients.setdefault(idx, {})
                    v = normalize(q.get(shift, 0) + coef)
                    if v:
                        q[shift] = v
                    else:
                        q.pop(shift, None)
                break
            else:
                remainder[m] = c
                del p[m]
        return remainder, quotients

    def _reduced_element(
        self,
        terms: Terms,
        parts,
        basis: List[_Element],
        ctx: RingContext,
        order: MonomialOrder,
        track: bool,
    ) -> Optional[_Element]:
        remainder, quotients = self._reduce(terms, basis, order, ctx.domain, track)
        if not remainder:
            return None
        rep = None
        if track:
            rep = self._combine_rep(ctx, parts)
            for idx, q in quotients.items():
                qpoly = Polynomial(q, ctx, _normalized=True)
                rep = [r - qpoly * b for r, b in zip(rep, basis[idx].rep)]
        element = self._element(remainder, rep, order, ctx.domain, normalize_lc=True)
        self._check_degree(element)
        return element

    # field Buchberger ---------------------------------------------------

    def _update(
        self,
        G: List[_Element],
        P: Set[Tuple[int, int]],
        f: _Element,
        order: MonomialOrder,
    ) -> Set[Tuple[int, int]]:
        """Gebauer–Möller pair update; appends f to G"""
        lmf = f.lm
        lms = [g.lm for g in G]

        def pair_lcm(pair):
            return monomial_lcm(lms[pair[0]], lms[pair[1]])

        kept = {
            pair
            for pair in P
            if (
                not monomial_divides(lmf, pair_lcm(pair))
                or pair_lcm(pair) == monomial_lcm(lms[pair[0]], lmf)
                or pair_lcm(pair) == monomial_lcm(lms[pair[1]], lmf)
            )
        }
        lcm_dict: Dict[Monomial, List[int]] = {}
        for i in range(len(G)):
            lcm_dict.setdefault(monomial_lcm(lms[i], lmf), []).append(i)
        minimalized = []
        for L in sorted(lcm_dict, key=order.key):
            if all(not monomial_divides(L_, L) for L_ in minimalized):
                minimalized.append(L)
        new = set()
        for L in minimalized:
            if not any(
                monomial_lcm(lms[i], lmf) == monomial_mul(lms[i], lmf)
                for i in lcm_dict[L]
            ):
                new.add((min(lcm_dict[L]), len(G)))
        G.append(f)
        return kept | new

    def _buchberger_field(
        self, ideal: Ideal, order: MonomialOrder, track: bool
    ) -> List[_Element]:
        ctx = ideal.ctx
        G: List[_Element] = []
        P: Set[Tuple[int, int]] = set()
        for element in self._initial(ideal, order, track):
            P = self._update(G, P, element, order)
        processed = 0
        while P:
            i, j = min(
                P,
                key=lambda pair: (
                    order.key(monomial_lcm(G[pair[0]].lm, G[pair[1]].lm)),
                    pair,
                ),
            )
            P.remove((i, j))
            processed += 1
            self._count_pair(processed)
            terms, parts = self._spoly(G[i], G[j], ctx.domain)
            element = self._reduced_element(terms, parts, G, ctx, order, track)
            if element is not None:
                P = self._update(G, P, element, order)
                logger.debug(f"basis grew to {len(G)} elements, {len(P)} pairs pending")
        return G

    # strong ℤ Buchberger ------------------------------------------------

    def _buchberger_int(
        self, ideal: Ideal, order: MonomialOrder, track: bool
    ) -> List[_Element]:
        ctx = ideal.ctx
        G: List[_Element] = []
        P: Set[Tuple[str, int, int]] = set()

        def add(element: _Element):
            n = len(G)
            for i in range(n):
                P.add(("G", i, n))
                P.add(("S", i, n))
            G.append(element)

        for element in self._initial(ideal, order, track):
            add(element)
        processed = 0
        while P:
            kind, i, j = min(
                P,
                key=lambda pair: (
                    order.key(monomial_lcm(G[pair[1]].lm, G[pair[2]].lm)),
                    pair,
                ),
            )
            P.remove((kind, i, j))
            if kind == "G":
                combination = self._gpoly(G[i], G[j])
                if combination is None:
                    continue
            else:
                combination = self._spoly(G[i], G[j], ctx.domain)
            processed += 1
            self._count_pair(processed)
            terms, parts = combination
            element = self._reduced_element(terms, parts, G, ctx, order, track)
            if element is not None:
                add(element)
                logger.debug(f"strong basis grew to {len(G)} elements")
        return G

    # minimalization / interreduction ------------------------------------

    def _finish(
        self,
        ideal: Ideal,
        order: MonomialOrder,
        G: List[_Element],
        strong: bool,
        track: bool,
    ) -> GroebnerBasis:
        ctx = ideal.ctx
        self.stats.bases_computed += 1
        minimal = self._minimalize(G, order, strong)
        reduced = []
        for idx, g in enumerate(minimal):
            others = minimal[:idx] + minimal[idx + 1 :]
            tail = dict(g.terms)
            del tail[g.lm]
            remainder, quotients = self._reduce(tail, others, order, ctx.domain, track)
            remainder[g.lm] = g.lc
            rep = g.rep
            if track:
                for k, q in quotients.items():
                    qpoly = Polynomial(q, ctx, _normalized=True)
                    rep = [r - qpoly * b for r, b in zip(rep, others[k].rep)]
            reduced.append(_Element(remainder, g.lm, g.lc, rep))
        reduced.sort(key=lambda e: order.key(e.lm), reverse=True)
        elements = tuple(Polynomial(e.terms, ctx, _normalized=True) for e in reduced)
        cofactors = tuple(tuple(e.rep) for e in reduced) if track else None
        return GroebnerBasis(
            elements=elements,
            order=order,
            ctx=ctx,
            reduced=True,
            strong=strong,
            source=ideal.generators,
            cofactors=cofactors,
        )

    def _minimalize(
        self, G: List[_Element], order: MonomialOrder, strong: bool
    ) -> List[_Element]:
        """Drop elements whose leading term is divisible by another's"""
        kept: List[_Element] = []
        for f in sorted(G, key=lambda h: (order.key(h.lm), abs(h.lc))):
            redundant = any(
                monomial_divides(g.lm, f.lm) and (not strong or f.lc % g.lc == 0)
                for g in kept
            )
            if not redundant:
                kept.append(f)
        return kept

    # cache ----------------------------------------------------------------

    def _key(self, kind: str, ideal: Ideal, order: MonomialOrder, track: bool):
        return (kind, ideal.ctx, ideal.generators, order, track)

    def _lookup(
        self, kind: str, ideal: Ideal, order: MonomialOrder, track: bool
    ) -> Optional[GroebnerBasis]:
        for flag in (track, True) if not track else (True,):
            key = self._key(kind, ideal, order, flag)
            hit = self._cache.get(key)
            if hit is not None:
                self._cache.move_to_end(key)
                self.stats.cache_hits += 1
                return hit
        return None

    def _store(
        self,
        kind: str,
        ideal: Ideal,
        order: MonomialOrder,
        track: bool,
        basis: GroebnerBasis,
    ):
        key = self._key(kind, ideal, order, track)
        self._cache[key] = basis
        self._cache.move_to_end(key)
        while len(self._cache) > self.limits.cache_size:
            self._cache.popitem(last=False)
