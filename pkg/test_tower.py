import pytest

from app.algebra import Ideal
from app.core.errors import HypothesisError, UnsupportedOperationError
from app.schemas.certificates import AxiomMethod
from app.services.delta import FrobeniusLiftSpec
from app.services.prism import PrismFlavor, PrismSpec
from app.services.tower import PURELY_INSEPARABLE_TAG, RootsKind
from conftest import assert_bases_verified, ideal, poly, ring

MONOMIAL_2 = FrobeniusLiftSpec.monomial(2)


@pytest.fixture
def towers(services):
    return services.towers


def roots_of_p_prism():
    ctx = ring("T", 2)
    return PrismSpec.build(ctx, Ideal.zero(ctx), poly("2 - T", ctx))


def square_free_prism():
    ctx = ring("X Y Z W", 2)
    return PrismSpec.build(ctx, ideal(["X*Y"], ctx), poly("p - Z*W", ctx))


def non_reduced_prism():
    ctx = ring("X Y", 2)
    return PrismSpec.build(ctx, ideal(["X^2"], ctx), poly("2 - Y", ctx))


# levels ---------------------------------------------------------------------


def test_roots_of_p_levels(towers):
    spec = roots_of_p_prism()
    levels = towers.build_tower(spec, 4)
    assert [level.index for level in levels] == [0, 1, 2, 3, 4]
    for level in levels:
        expected = poly(f"2 - T^{2 ** level.index}", spec.ctx)
        assert level.relations.generators == (expected,)
    assert levels[0].transition == "base"
    assert levels[3].transition == "phi: level 2 -> level 3"


def test_square_free_levels_keep_relations(towers):
    spec = square_free_prism()
    levels = towers.build_tower(spec, 2)
    assert levels[2].relations.generators[0] == poly("X*Y", spec.ctx)
    assert levels[2].relations.generators[1] == poly("2 - Z^4*W^4", spec.ctx)


def test_failed_hypotheses_need_force(towers):
    spec = non_reduced_prism()
    with pytest.raises(HypothesisError) as exc:
        towers.build_tower(spec, 1)
    assert exc.value.component == "root_closed"
    assert exc.value.exit_code == 1
    assert len(towers.build_tower(spec, 1, force=True)) == 2


def test_fractional_presentation(towers):
    spec = roots_of_p_prism()
    levels = towers.build_tower(spec, 2)
    fractional = [towers.fractional_presentation(level, 2) for level in levels]
    assert fractional[2].ring() == "Z_(2)[T^{1/4}]"
    assert fractional[2].relations.generators[0].display() == "-T + 2"
    assert fractional[2].transition == "inclusion: level 1 -> level 2"
    assert fractional[0].ring() == "Z_(2)[T]"


def test_fractional_presentation_of_fermat_level(towers):
    ctx = ring("X Y Z", 2)
    spec = PrismSpec.build(ctx, Ideal.zero(ctx), poly("X^3 + Y^4 + Z^5", ctx))
    level = towers.build_tower(spec, 2, force=True)[2]
    relabeled = towers.fractional_presentation(level, 2)
    assert relabeled.relations.generators[0].display() == "Z^5 + Y^4 + X^3"


def test_fractional_presentation_needs_monomial_lift(towers):
    ctx = ring("X Y", 2)
    lift = FrobeniusLiftSpec.custom(2, {"X": poly("X^2 + 2*Y", ctx)})
    spec = PrismSpec.build(ctx, Ideal.zero(ctx), poly("2 - Y", ctx), lift)
    level = towers.build_tower(spec, 1, force=True)[1]
    with pytest.raises(UnsupportedOperationError):
        towers.fractional_presentation(level, 2)
    with pytest.raises(UnsupportedOperationError):
        towers.fractional_presentation(towers.build_tower(roots_of_p_prism(), 0)[0], 3)


# projections, pillars and tilts ---------------------------------------------


def test_projection_kernel(towers, ideals):
    spec = square_free_prism()
    kernel = towers.projection_kernel(spec, 0)
    ctx = kernel.kernel.ctx
    assert ideals.ideal_equal(kernel.kernel, ideal(["X*Y", "Z*W"], ctx))
    assert ideals.ideal_equal(kernel.ambient, ideal(["X*Y", "Z^2*W^2"], ctx))
    assert not kernel.trivial
    assert kernel.to_payload()["index"] == 0


def test_frobenius_kernel_matches_pillar_power(towers, ideals, engine):
    spec = square_free_prism()
    for i in range(3):
        projection = towers.projection_kernel(spec, i)
        kernel = towers.frobenius_kernel(spec, i)
        assert ideals.ideal_equal(kernel, projection.kernel), i
        expected = ideal(["X*Y", f"Z^{2**i}*W^{2**i}"], projection.kernel.ctx)
        assert ideals.ideal_equal(kernel, expected), i
    assert_bases_verified(engine)


def test_frobenius_kernel_of_non_reduced_prism(towers, ideals):
    spec = non_reduced_prism()
    kernel = towers.frobenius_kernel(spec, 0)
    assert ideals.ideal_equal(kernel, ideal(["X", "Y"], kernel.ctx))
    assert not ideals.is_subideal(kernel, towers.projection_kernel(spec, 0).kernel)


def test_pillars_roots_of_p(towers):
    spec = roots_of_p_prism()
    report = towers.pillars(spec, 2)
    assert [level.index for level in report.levels] == [1, 2]
    assert all(level.generator == spec.d for level in report.levels)
    assert report.unit_numerator == poly("1 - 2*T + T^2", spec.ctx)
    assert report.unit_denominator == poly("-1 + 2*T^2 - T^4", spec.ctx)
    assert report.denominator_residue == 1
    assert report.identity_verified
    assert report.congruence_verified


def test_pillars_square_free(towers):
    report = towers.pillars(square_free_prism(), 1)
    assert report.identity_verified
    assert report.congruence_verified
    assert report.to_payload()["unit"]["denominator_residue"] == 1


def test_pillars_need_distinguished_orientation(towers):
    ctx = ring("T", 2)
    spec = PrismSpec.build(ctx, Ideal.zero(ctx), poly("4", ctx))
    with pytest.raises(HypothesisError) as exc:
        towers.pillars(spec, 1)
    assert exc.value.component == "distinguished"


def test_tilt(towers):
    report = towers.tilt(square_free_prism())
    assert report.completion.format() == "Z*W"
    assert report.display().startswith("(F_2[X, Y, Z, W]/")
    assert report.to_payload()["small_tilt_pillar"] == "(Z*W)"


def test_crystalline_tilt_has_no_completion(towers):
    ctx = ring("X", 3)
    spec = PrismSpec.build(
        ctx, Ideal.zero(ctx), poly("p", ctx), flavor=PrismFlavor.CRYSTALLINE
    )
    report = towers.tilt(spec)
    assert report.completion is None
    assert report.display() == "F_3[X]"


# roots towers ---------------------------------------------------------------


def test_adjoin_roots_of_p(towers):
    ctx = ring("X Y", 2)
    tower = towers.adjoin_roots_tower(ctx, ideal(["X*Y"], ctx), MONOMIAL_2, RootsKind.ROOTS_OF_P, 2)
    spec = tower.base_change
    assert spec.ctx.variables == ("X", "Y", "T")
    assert spec.d == poly("2 - T", spec.ctx)
    assert tower.levels[2].relations.generators == (
        poly("X*Y", spec.ctx),
        poly("2 - T^4", spec.ctx),
    )
    assert len(tower.presentations) == 3
    assert tower.tilt.extra_variable == "T"
    assert all(check.passed for check in tower.checks)
    assert tower.to_payload()["tilt"]["extra_variable"] == "T"


def test_adjoin_roots_uses_fresh_name(towers):
    ctx = ring("T", 2)
    tower = towers.adjoin_roots_tower(ctx, Ideal.zero(ctx), MONOMIAL_2, RootsKind.ROOTS_OF_P, 1)
    assert len(tower.base_change.ctx.variables) == 2
    assert tower.tilt.extra_variable != "T"


def test_adjoin_roots_of_unity(towers, services):
    ctx = ring("X", 2)
    tower = towers.adjoin_roots_tower(ctx, Ideal.zero(ctx), MONOMIAL_2, RootsKind.ROOTS_OF_UNITY, 1)
    spec = tower.base_change
    assert spec.d == poly("1 + q", spec.ctx)
    assert services.prisms.distinguished_unit_check(spec).passed
    assert tower.levels[1].relations.generators == (poly("1 + q^2", spec.ctx),)


def test_adjoin_roots_rejects_non_reduced_base(towers):
    ctx = ring("X", 2)
    with pytest.raises(HypothesisError) as exc:
        towers.adjoin_roots_tower(ctx, ideal(["X^2"], ctx), MONOMIAL_2, RootsKind.ROOTS_OF_P, 1)
    assert exc.value.component == "reduced_mod_p"


def test_adjoin_roots_rejects_unstable_base(towers):
    ctx = ring("X", 2)
    with pytest.raises(HypothesisError) as exc:
        towers.adjoin_roots_tower(ctx, ideal(["X + 2"], ctx), MONOMIAL_2, RootsKind.ROOTS_OF_P, 1)
    assert exc.value.component == "delta_stable"


# axioms ---------------------------------------------------------------------


def test_axiom_certificate_square_free(towers):
    certificate = towers.axiom_certificate(square_free_prism(), 1)
    assert certificate.overall
    assert [a.axiom for a in certificate.axioms] == list("abcdefg")
    assert certificate.verdict("a").method == AxiomMethod.PROVED
    assert certificate.verdict("b").method == AxiomMethod.CHECKED
    assert certificate.verdict("b").levels == [0, 1]
    assert certificate.tags == []


def test_axiom_certificate_tags_failed_injectivity(towers):
    certificate = towers.axiom_certificate(non_reduced_prism(), 0)
    b = certificate.verdict("b")
    assert not b.passed
    assert b.levels == [0]
    assert b.witness is not None
    assert certificate.tags == [PURELY_INSEPARABLE_TAG]
    assert certificate.verdict("c").passed
    assert not certificate.overall


def test_axiom_certificate_checks_frobenius_kernels(towers):
    passing = towers.axiom_certificate(square_free_prism(), 1).verdict("f")
    assert passing.passed
    assert passing.method == AxiomMethod.CHECKED
    assert passing.levels == [0, 1]
    failing = towers.axiom_certificate(non_reduced_prism(), 0).verdict("f")
    assert not failing.passed
    assert failing.levels == [0]
    assert failing.witness == "X"


def test_axiom_certificate_records_torsion(towers):
    ctx = ring("X Y", 2)
    spec = PrismSpec.build(ctx, ideal(["2*X"], ctx), poly("2 - Y", ctx))
    certificate = towers.axiom_certificate(spec, 0)
    assert not certificate.verdict("g").passed
    assert certificate.verdict("g").witness == "X"
