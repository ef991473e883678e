# app/algebra/parser.py
"""
Polynomial expression parser.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' uint))*
    factor := atom ('^' uint)?
    atom   := uint | 'p' | ident | '(' expr ')'

The literal `p` expands to the context prime. `/ uint` divides by an integer
(inverse in fields, exact division over ZZ).
"""
from fractions import Fraction
from functools import lru_cache

import pyparsing as pp

from ..core.errors import (
    NegativeExponentError,
    PolynomialSyntaxError,
    UnknownVariableError,
)
from .context import PRIME_TOKEN, RingContext
from .domains import DomainKind
from .polynomial import Polynomial


def _divide(value: Polynomial, n: int, text: str, loc: int) -> Polynomial:
    if n == 0:
        raise PolynomialSyntaxError("division by zero", text, loc)
    if value.ctx.domain.kind == DomainKind.INTEGER:
        return value.exact_div_int(n)
    return value.scale(Fraction(1, n))


@lru_cache(maxsize=64)
def _grammar(ctx: RingContext) -> pp.ParserElement:
    def on_int(s, loc, toks):
        return Polynomial.constant(int(toks[0]), ctx)

    def on_ident(s, loc, toks):
        name = toks[0]
        if name == PRIME_TOKEN:
            if ctx.prime is None:
                raise PolynomialSyntaxError(
                    "the literal 'p' needs a context prime", s, loc
                )
            return Polynomial.constant(ctx.prime, ctx)
        if name not in ctx.variables:
            raise UnknownVariableError(name, loc)
        return Polynomial.variable(name, ctx)

    def on_exponent(s, loc, toks):
        value = int(toks[0].replace(" ", ""))
        if value < 0:
            raise NegativeExponentError(value, loc)
        return value

    def on_factor(s, loc, toks):
        base = toks[0]
        return base ** toks[1] if len(toks) > 1 else base

    def on_term(s, loc, toks):
        acc = toks[0]
        for i in range(1, len(toks), 2):
            op, operand = toks[i], toks[i + 1]
            acc = acc * operand if op == "*" else _divide(acc, operand, s, loc)
        return acc

    def on_expr(s, loc, toks):
        acc = None
        op = "+"
        for item in toks:
            if isinstance(item, str):
                op = item
                continue
            value = item if op == "+" else -item
            acc = value if acc is None else acc + value
            op = "+"
        return acc

    expr = pp.Forward()
    integer = pp.Regex(r"\d+").set_name("integer").set_parse_action(on_int)
    ident = (
        pp.Regex(r"[A-Za-z][A-Za-z0-9_]*")
        .set_name("identifier")
        .set_parse_action(on_ident)
    )
    atom = integer | ident | (pp.Suppress("(") + expr + pp.Suppress(")"))
    exponent = pp.Regex(r"-\s*\d+|\d+").set_name("exponent")
    exponent.set_parse_action(on_exponent)
    factor = (atom + pp.Optional(pp.Suppress("^") + exponent)).set_parse_action(
        on_factor
    )
    divisor = pp.Regex(r"\d+").set_name("divisor").set_parse_action(
        lambda s, loc, toks: int(toks[0])
    )
    term = (
        factor + pp.ZeroOrMore((pp.Literal("*") + factor) | (pp.Literal("/") + divisor))
    ).set_parse_action(on_term)
    sign = pp.one_of("+ -")
    expr <<= (pp.Optional(sign) + term + pp.ZeroOrMore(sign + term)).set_parse_action(
        on_expr
    )
    return expr


def parse_poly(text: str, ctx: RingContext) -> Polynomial:
    """
    Parse `text` into a canonical polynomial of `ctx`.

    Raises:
        PolynomialSyntaxError: malformed text (with position)
        UnknownVariableError: identifier not in ctx
        NegativeExponentError: `^-n`
    """
    try:
        result = _grammar(ctx).parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise PolynomialSyntaxError(f"syntax error: {e.msg}", text, e.loc)
    return result[0]
