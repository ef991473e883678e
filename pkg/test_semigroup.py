import pytest

from app.core.errors import InputError, ResourceLimitError
from app.services.semigroup import SemigroupSpec
from conftest import ideal, poly

QUARTIC = [[1, 0], [1, 1], [1, 3], [1, 4]]


@pytest.fixture
def semigroups(services):
    return services.semigroups


def test_numerical_semigroup_toric_ideal(semigroups, ideals):
    presentation = semigroups.toric_ideal(SemigroupSpec.of([[2], [3]]), 2)
    ctx = presentation.ctx
    assert ctx.variables == ("u1", "u2")
    assert ctx.domain.is_integers
    assert ideals.ideal_equal(presentation.ideal, ideal(["u1^3 - u2^2"], ctx))
    assert presentation.delta_stable


def test_quartic_binomials_vanish_and_are_stable(semigroups, ideals):
    sg = SemigroupSpec.of(QUARTIC)
    presentation = semigroups.toric_ideal(sg, 3)
    for g in presentation.ideal:
        assert semigroups.vanishes_on_monomial_map(sg, g)
        assert set(abs(c) for c in g.terms.values()) == {1}
    assert ideals.contains(presentation.ideal, poly("u1*u4 - u2*u3", presentation.ctx))
    assert ideals.contains(presentation.ideal, poly("u2^3 - u1^2*u3", presentation.ctx))
    assert presentation.delta_stable
    assert presentation.to_payload()["lift"]


def test_vanishing_detects_non_relations(semigroups):
    sg = SemigroupSpec.of([[2], [3]])
    presentation = semigroups.toric_ideal(sg, 2)
    assert not semigroups.vanishes_on_monomial_map(sg, poly("u1 - u2", presentation.ctx))


def test_simplicial_rank_of_numerical_semigroup(semigroups):
    result = semigroups.simplicial_rank(SemigroupSpec.of([[2], [3]]))
    assert result.rank == 1
    assert result.simplicial


def test_simplicial_rank_of_quartic(semigroups):
    result = semigroups.simplicial_rank(SemigroupSpec.of(QUARTIC))
    assert result.rank == 2
    assert result.simplicial
    assert result.extremal == (0, 3)


def test_cone_over_a_square_is_not_simplicial(semigroups):
    square = SemigroupSpec.of([[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]])
    result = semigroups.simplicial_rank(square)
    assert result.rank == 3
    assert not result.simplicial
    assert result.extremal is None


@pytest.mark.parametrize(
    "rows", [[], [[1, 0], [1]], [[0, 0]], [[-1, 2]]], ids=["empty", "ragged", "zero", "negative"]
)
def test_semigroup_input_validation(rows):
    with pytest.raises(InputError):
        SemigroupSpec.of(rows)


def test_subset_cap(semigroups):
    sg = SemigroupSpec.of([[i] for i in range(1, 10)])
    with pytest.raises(ResourceLimitError) as exc:
        semigroups.simplicial_rank(sg)
    assert exc.value.limit == "subsets"
