import pytest

from app.algebra import CoefficientDomain, Ideal, Polynomial
from app.core.errors import AlgebraError, InputError, UnsupportedOperationError
from app.schemas.certificates import RootClosureVerdict
from app.services.delta import FrobeniusLiftSpec
from app.services.prism import PrismFlavor, PrismSpec
from app.services.semigroup import SemigroupSpec
from conftest import ideal, poly, ring


@pytest.fixture
def prisms(services):
    return services.prisms


def roots_of_p_prism():
    ctx = ring("T", 2)
    return PrismSpec.build(ctx, Ideal.zero(ctx), poly("2 - T", ctx), name="Z_(2)[T]")


def square_free_prism():
    ctx = ring("X Y Z W", 2)
    return PrismSpec.build(ctx, ideal(["X*Y"], ctx), poly("p - Z*W", ctx))


def non_reduced_prism():
    ctx = ring("X Y", 2)
    return PrismSpec.build(ctx, ideal(["X^2"], ctx), poly("2 - Y", ctx))


def q_de_rham_prism(shifted=True):
    ctx = ring("q", 2)
    shift = {"q": poly("q + 1", ctx)} if shifted else None
    return PrismSpec.build(ctx, Ideal.zero(ctx), poly("1 + q", ctx), shift=shift)


# construction ---------------------------------------------------------------


def test_prism_needs_integer_coefficients():
    ctx = ring("X", 2, CoefficientDomain.rationals())
    with pytest.raises(InputError):
        PrismSpec.build(ctx, Ideal.zero(ctx), poly("X", ctx))


def test_crystalline_orientation_must_be_p():
    ctx = ring("X", 3)
    with pytest.raises(InputError):
        PrismSpec.build(
            ctx, Ideal.zero(ctx), poly("X", ctx), flavor=PrismFlavor.CRYSTALLINE
        )


def test_payload_lists_the_presentation():
    payload = square_free_prism().to_payload()
    assert payload["ideal"] == ["X*Y"]
    assert payload["flavor"] == "zariskian"
    assert payload["prime"] == 2


# preprism -------------------------------------------------------------------


@pytest.mark.parametrize("build", [roots_of_p_prism, square_free_prism])
def test_validate_preprism_passes(prisms, build):
    certificate = prisms.validate_preprism(build())
    assert certificate.overall
    assert certificate.distinguished is None


def test_zero_orientation_fails(prisms):
    ctx = ring("T", 2)
    certificate = prisms.validate_preprism(
        PrismSpec.build(ctx, Ideal.zero(ctx), Polynomial.zero(ctx))
    )
    assert not certificate.overall
    assert certificate.orientation.witness == "0"


def test_orientation_inside_relations_fails(prisms):
    ctx = ring("X Y", 2)
    spec = PrismSpec.build(ctx, ideal(["X*Y"], ctx), poly("3*X*Y", ctx))
    assert not prisms.validate_preprism(spec).orientation.passed


def test_unstable_relations_report_delta_witness(prisms):
    ctx = ring("X", 2)
    spec = PrismSpec.build(ctx, ideal(["X + 2"], ctx), poly("X", ctx))
    certificate = prisms.validate_preprism(spec)
    assert not certificate.delta_stable.passed
    assert certificate.delta_stable.witness == "-2*X"
    assert certificate.first_failure() == "delta_stable"


# distinguished element ------------------------------------------------------


def test_distinguished_roots_of_p(prisms):
    verdict = prisms.distinguished_unit_check(roots_of_p_prism())
    assert verdict.passed
    assert "1 mod 2" in verdict.detail


def test_distinguished_q_de_rham_needs_shift(prisms):
    assert prisms.distinguished_unit_check(q_de_rham_prism()).passed
    unshifted = prisms.distinguished_unit_check(q_de_rham_prism(shifted=False))
    assert not unshifted.passed
    assert unshifted.witness == "q + 1"


def test_distinguished_fails_for_p_squared(prisms):
    ctx = ring("T", 2)
    spec = PrismSpec.build(ctx, Ideal.zero(ctx), poly("4", ctx))
    assert not prisms.distinguished_unit_check(spec).passed


# transversality -------------------------------------------------------------


def test_p_torsion_free(prisms):
    ctx = ring("X Y", 2)
    assert prisms.p_torsion_free_check(ideal(["X*Y"], ctx)).passed
    assert prisms.p_torsion_free_check(Ideal.zero(ctx)).passed
    torsion = prisms.p_torsion_free_check(ideal(["2*X"], ctx))
    assert not torsion.passed
    assert torsion.witness == "X"


def test_d_nzd_mod_p(prisms):
    assert prisms.d_nzd_mod_p_check(square_free_prism()).passed
    ctx = ring("X Y", 2)
    spec = PrismSpec.build(ctx, ideal(["X*Y"], ctx), poly("2 - X", ctx))
    verdict = prisms.d_nzd_mod_p_check(spec)
    assert not verdict.passed
    assert verdict.witness == "Y"


def test_d_nzd_not_applicable_for_crystalline(prisms):
    ctx = ring("X", 3)
    spec = PrismSpec.build(
        ctx, Ideal.zero(ctx), poly("3", ctx), flavor=PrismFlavor.CRYSTALLINE
    )
    verdict = prisms.d_nzd_mod_p_check(spec)
    assert verdict.passed
    assert verdict.method == "not-applicable"


def test_transversal_check_pairs_both_verdicts(prisms):
    torsion, nzd = prisms.transversal_check(square_free_prism())
    assert torsion.passed and nzd.passed


# full hypotheses ------------------------------------------------------------


def test_theorem_hypotheses_square_free(prisms):
    certificate = prisms.theorem_hypotheses(square_free_prism(), 1)
    assert certificate.overall
    assert certificate.root_closed.verdict == RootClosureVerdict.CERTIFIED_UP_TO
    assert certificate.levels == 1
    assert any("regular sequence" in note for note in certificate.notes)


def test_theorem_hypotheses_roots_of_p(prisms):
    certificate = prisms.theorem_hypotheses(roots_of_p_prism(), 2)
    assert certificate.overall
    assert certificate.first_failure() is None


def test_theorem_hypotheses_crystalline(prisms):
    ctx = ring("X", 3)
    spec = PrismSpec.build(
        ctx, Ideal.zero(ctx), poly("p", ctx), flavor=PrismFlavor.CRYSTALLINE
    )
    certificate = prisms.theorem_hypotheses(spec, 2)
    assert certificate.overall
    assert certificate.root_closed.levels_checked == 0


def test_crystalline_root_closure_fails_when_not_reduced(prisms):
    ctx = ring("X", 3)
    spec = PrismSpec.build(
        ctx, ideal(["X^3"], ctx), poly("p", ctx), flavor=PrismFlavor.CRYSTALLINE
    )
    certificate = prisms.root_closed_certificate(spec, 1)
    assert certificate.verdict == RootClosureVerdict.FAILED_AT
    assert certificate.witness == "X"


def test_theorem_hypotheses_reports_first_failure(prisms):
    certificate = prisms.theorem_hypotheses(non_reduced_prism(), 1)
    assert not certificate.overall
    assert certificate.first_failure() == "root_closed"


@pytest.mark.parametrize(
    "build", [square_free_prism, roots_of_p_prism, non_reduced_prism]
)
def test_theorem_hypotheses_monotone_in_levels(prisms, build):
    spec = build()
    overall = [prisms.theorem_hypotheses(spec, k).overall for k in range(3)]
    assert overall == sorted(overall, reverse=True)


def test_theorem_hypotheses_negative_levels(prisms):
    with pytest.raises(InputError):
        prisms.theorem_hypotheses(square_free_prism(), -1)


# generic degree -------------------------------------------------------------


def test_generic_degree_of_square_free_prism(prisms):
    degree = prisms.generic_degree_monomial(square_free_prism())
    assert degree.rank == 3
    assert degree.degree == 8
    assert degree.transition_degree == 16
    assert len(degree.support) == 3


def test_generic_degree_of_polynomial_ring(prisms):
    degree = prisms.generic_degree_monomial(roots_of_p_prism())
    assert (degree.rank, degree.degree) == (1, 2)


def test_generic_degree_of_semigroup(prisms):
    sg = SemigroupSpec.of([[1, 0], [1, 1], [1, 3], [1, 4]])
    degree = prisms.generic_degree_monomial(sg, prime=3)
    assert degree.rank == 2
    assert degree.degree == 9
    with pytest.raises(InputError):
        prisms.generic_degree_monomial(sg)


def test_generic_degree_needs_monomial_lift(prisms):
    ctx = ring("X Y", 2)
    lift = FrobeniusLiftSpec.custom(2, {"X": poly("X^2 + 2*Y", ctx)})
    spec = PrismSpec.build(ctx, Ideal.zero(ctx), poly("2 - Y", ctx), lift)
    with pytest.raises(UnsupportedOperationError):
        prisms.generic_degree_monomial(spec)


def test_generic_degree_of_zero_quotient(prisms):
    ctx = ring("X", 2)
    spec = PrismSpec.build(ctx, ideal(["1 + 2*X"], ctx), poly("2", ctx))
    with pytest.raises(AlgebraError):
        prisms.generic_degree_monomial(spec)
