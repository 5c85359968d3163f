from fractions import Fraction

import pytest

from hornred.algebra import Poly, RatFun
from hornred.horn import LinearParam
from hornred.syntax import SyntaxErrorAt, parse_poly, parse_ratfun, parse_rational


@pytest.mark.parametrize("text,value", [("-3/4", Fraction(-3, 4)), ("7", Fraction(7)), (" 2/6 ", Fraction(1, 3))])
def test_rationals(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize(
    "text,const,slope",
    [("1/2+2eps", Fraction(1, 2), 2), ("3", 3, 0), ("-eps", 0, -1), ("1/2 - eps/3", Fraction(1, 2), Fraction(-1, 3)), ("2*eps-1", -1, 2)],
)
def test_linear_params(text, const, slope):
    p = LinearParam.parse(text)
    assert (p.const, p.slope) == (Fraction(const), Fraction(slope))
    assert LinearParam.parse(str(p)) == p


def test_unicode_epsilon_and_powers():
    assert parse_poly("ε^2 + z**3") == parse_poly("eps^2+z^3")
    assert parse_ratfun("z^-1") == RatFun.var("z").inverse()


def test_implicit_multiplication():
    assert parse_poly("2z eps") == Poly.var("z") * Poly.var("eps").scale(2)


@pytest.mark.parametrize("bad", ["1/", "eps^", "(z", "q", "eps^eps", "1//2", ""])
def test_errors(bad):
    with pytest.raises((SyntaxErrorAt, ValueError)):
        parse_ratfun(bad)


@pytest.mark.parametrize("bad", ["eps^2", "z", "1/eps"])
def test_linear_param_rejects_nonlinear(bad):
    with pytest.raises(ValueError):
        LinearParam.parse(bad)
