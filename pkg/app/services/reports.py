# app/services/reports.py
"""
Command implementations shared by the CLI and the HTTP router.

Each method returns a Report whose content depends only on its input, so reruns
are byte-identical; timing goes to the log.
"""
import hashlib
import json
import logging
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..algebra import CoefficientDomain, Ideal, Polynomial, RingContext, parse_poly
from ..core.errors import AlgebraError, NotPhiMonomialError, log_performance
from ..schemas.certificates import Report
from ..utils.specfile import RingSpecFile
from . import Services, build_services
from .delta import (
    delta_of,
    phi_monomial_decomposition,
    phi_pow,
    reducedness_prediction,
    validate_frobenius_lift,
)
from .prism import PrismFlavor
from .semigroup import SemigroupSpec
from .tower import RootsKind

logger = logging.getLogger(__name__)


def matrix_digest(rows: Sequence[Sequence[int]], prime: int) -> str:
    canonical = json.dumps({"semigroup": [list(r) for r in rows], "p": prime})
    return hashlib.sha256(canonical.encode()).hexdigest()


def fermat_exponents(J: Ideal, p: int) -> Optional[Tuple[int, ...]]:
    """(n_1, ..., n_{p+1}) when J = (X_1^{n_1} + ... + X_{p+1}^{n_{p+1}})"""
    if len(J) != 1 or J.ctx.nvars != p + 1:
        return None
    (f,) = J.generators
    exponents = [0] * J.ctx.nvars
    for m, c in f.terms.items():
        powered = [i for i, e in enumerate(m) if e]
        if c != 1 or len(powered) != 1 or exponents[powered[0]]:
            return None
        exponents[powered[0]] = m[powered[0]]
    if not all(exponents):
        return None
    return tuple(exponents)


def _rename(ideal: Ideal, ctx: RingContext) -> Ideal:
    """Same exponent vectors in another context with as many variables"""
    return Ideal(tuple(Polynomial(g.terms, ctx) for g in ideal), ctx)


class ReportService:
    def __init__(self, services: Optional[Services] = None):
        self.services = services or build_services()

    def _report(
        self,
        command: str,
        digest: str,
        verdicts: Dict[str, Any],
        outputs: Dict[str, Any],
        exit_code: int,
        start: datetime,
    ) -> Report:
        log_performance(command, start, exit_code=exit_code)
        return Report(
            command=command,
            input_digest=digest,
            verdicts=verdicts,
            outputs=outputs,
            resource_usage=self.services.engine.stats.as_dict(),
            exit_code=exit_code,
        )

    # commands -----------------------------------------------------------

    def delta(self, spec: RingSpecFile, poly: str) -> Report:
        start = datetime.now(timezone.utc)
        ctx = spec.context()
        lift = spec.lift(ctx)
        validate_frobenius_lift(lift, ctx)
        f = parse_poly(poly, ctx)
        delta_f = delta_of(f, lift)
        phi_f = phi_pow(f, 1, lift)
        outputs: Dict[str, Any] = {
            "f": f.format(),
            "delta": delta_f.format(),
            "phi": phi_f.format(),
        }
        try:
            outputs["decomposition"] = phi_monomial_decomposition(f, lift).to_payload()
        except NotPhiMonomialError as e:
            outputs["decomposition"] = None
            logger.debug(f"no φ-monomial decomposition: {e}")
        identity = phi_f == f**spec.p + delta_f.scale(spec.p)
        return self._report(
            "delta", spec.digest(), {"phi_identity": identity}, outputs, 0, start
        )

    def stabilize(self, spec: RingSpecFile, max_iter: Optional[int] = None) -> Report:
        start = datetime.now(timezone.utc)
        services = self.services
        ctx = spec.context()
        J = spec.relations(ctx)
        lift = spec.lift(ctx)
        result = services.delta.delta_stabilize(J, lift, max_iter)
        stabilized = result.ideal
        outputs: Dict[str, Any] = {"stabilization": result.to_payload()}
        verdicts: Dict[str, Any] = {
            "delta_stable": services.delta.is_delta_stable(stabilized, lift),
            "contains_input": services.ideals.is_subideal(J, stabilized),
        }
        if len(J) == 1:
            outputs["height_bound"] = services.delta.delta_height_bound(
                J.generators[0], lift, max_iter
            )
        exponents = fermat_exponents(J, spec.p) if lift.is_monomial else None
        if exponents is not None:
            outputs["fermat"] = self._fermat_block(exponents, spec.p, stabilized)
        return self._report("stabilize", spec.digest(), verdicts, outputs, 0, start)

    def _fermat_block(
        self, exponents: Tuple[int, ...], p: int, stabilized: Ideal
    ) -> Dict[str, Any]:
        services = self.services
        initial = services.delta.fermat_initial_ideal(exponents, p)
        reduced_ideal = stabilized.reduce_mod(CoefficientDomain.prime_field(p))
        reduced_ctx = reduced_ideal.ctx
        prediction = reducedness_prediction(exponents, p, stabilized.ctx)
        reduced = services.charp.is_reduced(reduced_ideal)
        return {
            "exponents": list(exponents),
            "initial_ideal": _rename(initial.computed, reduced_ctx).strings(),
            "predicted_initial_ideal": _rename(initial.predicted, reduced_ctx).strings(),
            "initial_agrees": initial.agrees,
            "reduced_mod_p": reduced,
            "predicted_reduced": prediction.reduced,
            "nilpotent_witness": (
                prediction.witness.format() if prediction.witness is not None else None
            ),
        }

    def check_prism(self, spec: RingSpecFile, levels: int) -> Report:
        start = datetime.now(timezone.utc)
        prism = spec.prism_spec()
        certificate = self.services.prisms.theorem_hypotheses(prism, levels)
        outputs: Dict[str, Any] = {"prism": prism.to_payload()}
        if prism.lift.is_monomial:
            try:
                degree = self.services.prisms.generic_degree_monomial(prism)
                outputs["generic_degree"] = degree.to_payload()
            except AlgebraError as e:
                logger.debug(f"generic degree skipped: {e}")
        return self._report(
            "check-prism",
            spec.digest(),
            {"hypotheses": certificate.model_dump(mode="json")},
            outputs,
            0 if certificate.overall else 1,
            start,
        )

    def tower(
        self,
        spec: RingSpecFile,
        levels: int,
        fractional: bool = False,
        tilt: bool = False,
        pillars: bool = False,
        axioms: bool = False,
        force: bool = False,
    ) -> Report:
        start = datetime.now(timezone.utc)
        towers = self.services.towers
        prism = spec.prism_spec()
        certificate = self.services.prisms.theorem_hypotheses(prism, levels)
        built = towers.build_tower(prism, levels, force=force, hypotheses=certificate)
        outputs: Dict[str, Any] = {"levels": [level.to_payload() for level in built]}
        verdicts: Dict[str, Any] = {"hypotheses": certificate.overall}
        tags: List[str] = []
        if not certificate.overall:
            tags.append(f"forced past failed hypothesis '{certificate.first_failure()}'")
        if fractional:
            outputs["fractional"] = [
                towers.fractional_presentation(level, prism.prime).to_payload()
                for level in built
            ]
            outputs["kernels"] = [
                towers.projection_kernel(prism, i).to_payload() for i in range(levels)
            ]
        if tilt:
            outputs["tilt"] = towers.tilt(prism).to_payload()
        if pillars:
            outputs["pillars"] = towers.pillars(prism, levels).to_payload()
        exit_code = 0 if certificate.overall else 1
        if axioms:
            axiom_certificate = towers.axiom_certificate(prism, levels, certificate)
            verdicts["axioms"] = axiom_certificate.model_dump(mode="json")
            tags.extend(axiom_certificate.tags)
            if not axiom_certificate.overall:
                exit_code = 1
        outputs["tags"] = tags
        return self._report("tower", spec.digest(), verdicts, outputs, exit_code, start)

    def toric(self, rows: Sequence[Sequence[int]], prime: int) -> Report:
        start = datetime.now(timezone.utc)
        services = self.services
        sg = SemigroupSpec.of(rows)
        presentation = services.semigroups.toric_ideal(sg, prime)
        vanishes = all(
            services.semigroups.vanishes_on_monomial_map(sg, g)
            for g in presentation.ideal
        )
        rank = services.semigroups.simplicial_rank(sg)
        degree = services.prisms.generic_degree_monomial(sg, prime)
        outputs = {
            "semigroup": sg.to_payload(),
            "toric": presentation.to_payload(),
            "rank": rank.rank,
            "simplicial": rank.simplicial,
            "extremal": list(rank.extremal) if rank.extremal is not None else None,
            "generic_degree": degree.to_payload(),
        }
        verdicts = {"delta_stable": presentation.delta_stable, "vanishes": vanishes}
        exit_code = 0 if presentation.delta_stable and vanishes else 1
        return self._report(
            "toric", matrix_digest(rows, prime), verdicts, outputs, exit_code, start
        )

    def roots(self, spec: RingSpecFile, kind: RootsKind, levels: int) -> Report:
        start = datetime.now(timezone.utc)
        if spec.semigroup:
            presentation = self.services.semigroups.toric_ideal(
                spec.semigroup_spec(), spec.p
            )
            ctx, J, lift = presentation.ctx, presentation.ideal, presentation.lift
        else:
            ctx = spec.context()
            J, lift = spec.relations(ctx), spec.lift(ctx)
        tower = self.services.towers.adjoin_roots_tower(ctx, J, lift, kind, levels)
        verdicts = {check.name: check.passed for check in tower.checks}
        return self._report(
            "roots", spec.digest(), verdicts, tower.to_payload(), 0, start
        )

    def corpus_entry(self, spec: RingSpecFile, levels: int) -> Report:
        """check-prism when oriented, toric for semigroups, stabilize otherwise"""
        if spec.orientation is not None or spec.flavor == PrismFlavor.CRYSTALLINE:
            return self.check_prism(spec, levels)
        if spec.semigroup:
            return self.toric(spec.semigroup, spec.p)
        return self.stabilize(spec)


def render_text(report: Report) -> str:
    lines = [f"{report.command}  [{report.input_digest[:12]}]"]

    def walk(value: Any, indent: int):
        pad = "  " * indent
        if isinstance(value, dict):
            for key, item in value.items():
                if isinstance(item, (dict, list)) and item:
                    lines.append(f"{pad}{key}:")
                    walk(item, indent + 1)
                else:
                    lines.append(f"{pad}{key}: {item}")
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, (dict, list)):
                    lines.append(f"{pad}-")
                    walk(item, indent + 1)
                else:
                    lines.append(f"{pad}- {item}")
        else:
            lines.append(f"{pad}{value}")

    for section in ("verdicts", "outputs", "resource_usage"):
        content = getattr(report, section)
        if content:
            lines.append(f"{section}:")
            walk(content, 1)
    lines.append(f"exit_code: {report.exit_code}")
    return "\n".join(lines)
