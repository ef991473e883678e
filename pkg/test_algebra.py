import random
from fractions import Fraction

import pytest

from app.algebra import (
    CoefficientDomain,
    MonomialOrder,
    Polynomial,
    RingContext,
    exact_div_int,
    fractional_relabel,
    poly_arith,
    reduce_mod,
    substitute,
)
from app.core.errors import (
    ContextMismatchError,
    DenominatorError,
    InputError,
    LevelError,
    MissingImageError,
    NegativeExponentError,
    NotDivisibleError,
    PolynomialSyntaxError,
    UnknownVariableError,
)
from conftest import poly, ring


def random_poly(rng, ctx, degree=4, terms=4):
    out = {}
    for _ in range(terms):
        exps = [0] * ctx.nvars
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(ctx.nvars)] += 1
        out[tuple(exps)] = rng.randint(-5, 5)
    return Polynomial(out, ctx)


# parsing --------------------------------------------------------------------


def test_parse_fermat_polynomial():
    ctx = ring("X Y Z")
    f = poly("X^3 + Y^4 + Z^5", ctx)
    assert f.terms == {(3, 0, 0): 1, (0, 4, 0): 1, (0, 0, 5): 1}


def test_parse_prime_literal():
    ctx = ring("X Y Z W", 2)
    f = poly("p - Z*W", ctx)
    assert f.terms == {(0, 0, 0, 0): 2, (0, 0, 1, 1): -1}


def test_parse_rejects_negative_exponent():
    with pytest.raises(NegativeExponentError):
        poly("X^-1", ring("X"))


def test_parse_unknown_variable():
    with pytest.raises(UnknownVariableError) as exc:
        poly("X + Q", ring("X Y"))
    assert exc.value.name == "Q"


def test_parse_syntax_error_has_position():
    with pytest.raises(PolynomialSyntaxError) as exc:
        poly("X + * Y", ring("X Y"))
    assert exc.value.position >= 0
    assert exc.value.exit_code == 2


def test_parse_parentheses_and_division():
    ctx = ring("X Y")
    assert poly("(X + Y)^2", ctx) == poly("X^2 + 2*X*Y + Y^2", ctx)
    assert poly("(2*X + 4)/2", ctx) == poly("X + 2", ctx)


def test_parse_division_over_rationals():
    ctx = ring("X", 2, CoefficientDomain.rationals())
    assert poly("X/3", ctx).terms == {(1,): Fraction(1, 3)}


def test_format_round_trip():
    rng = random.Random(7)
    ctx = ring("X Y Z")
    for _ in range(25):
        f = random_poly(rng, ctx)
        assert poly(f.format(), ctx) == f


def test_zero_formats_as_zero():
    ctx = ring("X")
    assert Polynomial.zero(ctx).format() == "0"
    assert poly("0", ctx).is_zero()


# arithmetic -----------------------------------------------------------------


def test_poly_arith_examples():
    ctx = ring("X Y")
    x, y = Polynomial.gens(ctx)
    assert poly_arith("pow", x + y, 2) == poly("X^2 + 2*X*Y + Y^2", ctx)
    assert poly_arith("mul", x + y, Polynomial.zero(ctx)).is_zero()
    assert poly_arith("mul", x + y, x - y) == poly("X^2 - Y^2", ctx)
    assert poly_arith("sub", x, x).is_zero()


def test_poly_arith_rejects_mismatched_contexts():
    with pytest.raises(ContextMismatchError):
        poly_arith("add", poly("X", ring("X")), poly("X", ring("X Y")))


def test_poly_arith_negative_power():
    with pytest.raises(NegativeExponentError):
        poly_arith("pow", poly("X + 1", ring("X")), -1)


def test_poly_arith_unknown_operation():
    with pytest.raises(InputError):
        poly_arith("div", poly("X", ring("X")), 2)


@pytest.mark.parametrize(
    "domain",
    [
        CoefficientDomain.integers(),
        CoefficientDomain.rationals(),
        CoefficientDomain.prime_field(3),
        CoefficientDomain.truncated_padic(2, 4),
    ],
    ids=str,
)
def test_ring_axioms(domain):
    rng = random.Random(11)
    ctx = RingContext(("X", "Y", "Z"), domain, prime=domain.p or 3)
    for _ in range(10):
        f, g, h = (random_poly(rng, ctx) for _ in range(3))
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        assert f * g == g * f
        assert f + g == g + f


def test_modular_domains_reduce_coefficients():
    ctx = ring("X", 3, CoefficientDomain.prime_field(3))
    assert poly("3*X + 4", ctx) == poly("1", ctx)
    padic = ring("X", 2, CoefficientDomain.truncated_padic(2, 3))
    assert poly("9*X", padic) == poly("X", padic)


# ring maps ------------------------------------------------------------------


def test_substitute_frobenius_images():
    ctx = ring("X Y")
    images = {"X": poly("X^2", ctx), "Y": poly("Y^2 + 2*X", ctx)}
    assert substitute(poly("X*Y", ctx), images) == poly("X^2*Y^2 + 2*X^3", ctx)
    assert substitute(poly("X", ctx), images) == poly("X^2", ctx)


def test_substitute_is_a_ring_map():
    rng = random.Random(3)
    ctx = ring("X Y")
    images = {"X": poly("X^2 + 2*Y", ctx), "Y": poly("Y^2", ctx)}
    for _ in range(10):
        f, g = random_poly(rng, ctx, 3), random_poly(rng, ctx, 3)
        assert substitute(f * g, images) == substitute(f, images) * substitute(g, images)
        assert substitute(f + g, images) == substitute(f, images) + substitute(g, images)


def test_substitute_needs_every_used_variable():
    ctx = ring("X Y")
    with pytest.raises(MissingImageError):
        substitute(poly("X*Y", ctx), {"X": poly("X", ctx)})


# division and reduction -----------------------------------------------------


def test_exact_div_int():
    ctx = ring("X Y")
    assert exact_div_int(poly("4*X^2 - 2*Y", ctx), 2) == poly("2*X^2 - Y", ctx)
    with pytest.raises(NotDivisibleError):
        exact_div_int(poly("X + 2", ctx), 2)


def test_exact_div_int_round_trip():
    rng = random.Random(5)
    ctx = ring("X Y Z")
    for n in (2, 3, -7):
        f = random_poly(rng, ctx)
        assert exact_div_int(f.scale(n), n) == f


def test_reduce_mod():
    ctx = ring("X Y", 2)
    gf2 = CoefficientDomain.prime_field(2)
    reduced = reduce_mod(poly("X^2 + 2*X*Y + X", ctx), gf2)
    assert reduced.terms == {(2, 0): 1, (1, 0): 1}
    assert reduced.ctx.domain == gf2


def test_reduce_mod_commutes_with_products():
    rng = random.Random(9)
    ctx = ring("X Y", 3)
    gf3 = CoefficientDomain.prime_field(3)
    for _ in range(10):
        f, g = random_poly(rng, ctx), random_poly(rng, ctx)
        assert reduce_mod(f * g, gf3) == reduce_mod(f, gf3) * reduce_mod(g, gf3)


def test_rational_denominator_divisible_by_p():
    ctx = ring("X", 2, CoefficientDomain.rationals())
    with pytest.raises(DenominatorError):
        reduce_mod(poly("X/2", ctx), CoefficientDomain.prime_field(2))


# fractional presentations ---------------------------------------------------


def test_fractional_relabel_display():
    ctx = ring("X")
    assert fractional_relabel(poly("X^3", ctx), 1).display() == "X^{3/2}"


def test_fractional_relabel_fermat_levels():
    ctx = ring("X Y Z")
    f = poly("X^3 + Y^4 + Z^5", ctx)
    assert f.fractional_relabel(2).display() == "Z^{5/4} + Y + X^{3/4}"


def test_fractional_relabel_round_trip():
    f = poly("X^3 + X*Y", ring("X Y"))
    assert f.fractional_relabel(2).fractional_relabel(-2) == f


def test_fractional_relabel_negative_level():
    with pytest.raises(LevelError):
        poly("X", ring("X")).fractional_relabel(-1)


def test_context_validation():
    with pytest.raises(InputError):
        RingContext(("X", "X"), CoefficientDomain.integers())
    with pytest.raises(InputError):
        RingContext(("p",), CoefficientDomain.integers(), prime=2)
    with pytest.raises(InputError):
        RingContext(("X",), CoefficientDomain.integers(), prime=4)


# monomial orders ------------------------------------------------------------


@pytest.mark.parametrize(
    "order",
    [MonomialOrder.lex(), MonomialOrder.grevlex(), MonomialOrder.elimination(2)],
    ids=str,
)
def test_monomial_orders_are_multiplicative_total_and_well_founded(order):
    rng = random.Random(5)
    one = (0, 0, 0, 0)
    for _ in range(200):
        a, b, c = (tuple(rng.randint(0, 3) for _ in range(4)) for _ in range(3))
        if a != b:
            assert order.key(a) != order.key(b)
        if order.key(a) < order.key(b):
            ac = tuple(x + y for x, y in zip(a, c))
            bc = tuple(x + y for x, y in zip(b, c))
            assert order.key(ac) < order.key(bc)
        if a != one:
            assert order.key(one) < order.key(a)


def test_elimination_order_blocks():
    order = MonomialOrder.elimination(1)
    assert order.key((1, 0, 0, 0)) > order.key((0, 5, 5, 5))
    # the remaining block is graded reverse lex
    assert order.key((0, 0, 2, 1)) > order.key((0, 1, 0, 2))
    two = MonomialOrder.elimination(2)
    # the eliminated block is graded, ties broken lex by variable index
    assert two.key((0, 3, 0, 0)) > two.key((2, 0, 5, 0))
    assert two.key((2, 0, 0, 0)) > two.key((1, 1, 0, 9))
