import pytest
import sympy as sp

from odesym.exprcore import COEF_Q, JET, PARAMS, SOL_U, X, canon
from odesym.grammar import ParseError, parse, render
from odesym import maxsym


def test_parse_basic():
    assert parse("y2 + q*y") == JET[2] + COEF_Q[0] * JET[0]
    assert parse("x^2 - k1/2") == X**2 - PARAMS["k1"] / 2
    assert parse("ln(y) + exp(x) - sqrt(u)") == sp.log(JET[0]) + sp.exp(X) - sp.sqrt(SOL_U[0])


def test_parse_precedence_and_unary():
    assert parse("-y^2") == -JET[0] ** 2
    assert parse("2*y^-2") == 2 * JET[0] ** -2
    assert parse("y^2^3") == JET[0] ** 8  # right associative
    assert parse("1 - 2 - 3") == -4


def test_parse_decimal_is_exact():
    assert parse("0.5*y") == sp.Rational(1, 2) * JET[0]


def test_parse_unknown_identifier():
    with pytest.raises(ParseError) as err:
        parse("y2 + zz")
    assert err.value.col == 6


def test_parse_reports_position():
    with pytest.raises(ParseError) as err:
        parse("y1 + )")
    assert err.value.line == 1
    assert err.value.col == 6


def test_parse_unexpected_character():
    with pytest.raises(ParseError):
        parse("y1 ? y2")


@pytest.mark.parametrize(
    "text",
    [
        "y2 + q*y",
        "2*q*y^2 - y1^2/2 + y*y2",
        "(y1^2 - y*y2)^2 / (2*y^4)",
        "ln(k1 - 2*x) + sqrt(2*x - k1)",
        "exp(k1*x)/k2 - lam*theta + alpha*a0 + a1 + a2 + a3",
        "u^3 + u^2*v + 3*u*u1*y",
        "-1/2*y3^2 + q1*y*y3",
    ],
)
def test_round_trip_corpus(text):
    e = parse(text)
    assert canon(parse(render(e)) - e) == 0


def test_round_trip_library_outputs():
    ctx = maxsym.SourceContext.make_symbolic()
    produced = [
        maxsym.build_lode(4, ctx).delta,
        maxsym.reference_first_integral_homogeneity(5),
        maxsym.transformed_lagrangian(4, ctx).density,
        maxsym.natural_lagrangian(4, ctx).density,
    ]
    gens = maxsym.generators(4)
    produced.extend(vf.psi for vf in gens)
    for e in produced:
        assert canon(parse(render(canon(e))) - e) == 0
