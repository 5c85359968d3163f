import math
from fractions import Fraction

import numpy as np
import pytest

from hornred.algebra import RatFun
from hornred.horn import LinearParam, eval_numeric, pochhammer
from hornred.mellin_barnes import (
    ContourError,
    GammaFactor,
    HigherOrderPole,
    MBIntegrand,
    UnsupportedDimension,
    binomial_integrand,
    contour_quadrature,
    default_contour,
    direct_residues,
    enumerate_poles,
    gauss_integrand,
    residue_sum,
)


def _consts(locs):
    return [p.const for p in locs]


def test_pole_enumeration_examples():
    mb = MBIntegrand(1, (GammaFactor((-1,), 0),), contour=(Fraction(-1, 2),))
    [(fam, locs)] = enumerate_poles(mb, "right", 3)
    assert _consts(locs) == [0, 1, 2] and fam.side == "right"
    mb = MBIntegrand(1, (GammaFactor((1,), "1/2"),), contour=(Fraction(0),))
    [(_, locs)] = enumerate_poles(mb, "left", 2)
    assert _consts(locs) == [Fraction(-1, 2), Fraction(-3, 2)]
    mb = MBIntegrand(1, (GammaFactor((2,), 1),), contour=(Fraction(0),))
    [(_, locs)] = enumerate_poles(mb, "left", 3)
    assert _consts(locs) == [Fraction(-1, 2), -1, Fraction(-3, 2)]


def test_only_numerator_rows_generate_poles():
    mb = MBIntegrand(1, (GammaFactor((1,), 0),), (GammaFactor((-1,), 1),), contour=(Fraction(1, 2),))
    assert enumerate_poles(mb, "right", 3) == []


def test_dimension_errors():
    mb = MBIntegrand(2, (GammaFactor((1, 1), 0),), contour=(Fraction(1, 3), Fraction(1, 3)))
    assert mb.to_json()["dim"] == 2
    with pytest.raises(UnsupportedDimension):
        enumerate_poles(mb, "left", 1)
    with pytest.raises(UnsupportedDimension):
        contour_quadrature(mb, 0.5)


def test_contour_through_pole_rejected():
    with pytest.raises(ContourError):
        MBIntegrand(1, (GammaFactor((1,), 0),), contour=(Fraction(-1),))


def test_binomial_residues_exact():
    a = LinearParam(Fraction(1, 2), 1)
    mb = binomial_integrand(a)
    rs = residue_sum(mb, x=0.3)
    assert rs.side == "left"
    [t] = rs.terms
    assert t.gamma_num == (a,) and t.gamma_den == (a,)
    assert t.arg_power == 1 and t.x_exponent == LinearParam(0)
    # (1 + x)^(-a) = sum_n (-1)^n (a)_n / n! x^n
    want = [pochhammer(a, n) * RatFun.const(Fraction((-1) ** n, math.factorial(n))) for n in range(10)]
    assert t.coefficients(9) == want
    assert direct_residues(mb, t.family, 10) == want


def test_binomial_value_and_flip():
    mb = binomial_integrand(1)
    assert abs(residue_sum(mb, x=0.5).evaluate(0.5) - 2 / 3) < 1e-12
    rs = residue_sum(mb, x=3.0)
    [t] = rs.terms
    assert rs.side == "right" and t.arg_power == -1 and t.x_exponent == LinearParam(-1)
    assert abs(rs.evaluate(3.0) - 0.25) < 1e-12


def test_symbolic_x_ambiguous():
    with pytest.raises(ValueError, match="symbolic x"):
        residue_sum(binomial_integrand(1))


def test_gauss_integrand_identification():
    mb = gauss_integrand(1, 1, 2)
    assert mb.contour == (Fraction(-1, 2),)
    rs = residue_sum(mb)  # the left families collide, only the right side is usable
    [t] = rs.terms
    assert [str(p) for p in t.pfq.upper] == ["1", "1"] and [str(p) for p in t.pfq.lower] == ["2"]
    assert t.arg_coeff == -1 and t.gamma_num == (LinearParam(1), LinearParam(1)) and t.gamma_den == (LinearParam(2),)
    assert t.coefficients(9) == direct_residues(mb, t.family, 10)


def test_double_poles_refused():
    with pytest.raises(HigherOrderPole, match="higher-order poles not supported"):
        residue_sum(gauss_integrand(1, 1, 2), side="left")


def test_generic_gauss_both_sides():
    mb = gauss_integrand("1/3", "3/4", "7/5")
    x = 0.3
    q = contour_quadrature(mb, x)
    right = residue_sum(mb, x=x)
    assert right.side == "right"
    assert abs(right.evaluate(x) - q) < 1e-9
    left = residue_sum(mb, side="left")
    assert len(left.terms) == 2
    # the left expansion lives in 1/x; at x = 3 it must match the quadrature too
    assert abs(left.evaluate(3.0) - contour_quadrature(mb, 3.0)) < 1e-9


def test_quadrature_examples():
    assert abs(contour_quadrature(binomial_integrand(1, contour=Fraction(1, 2)), 0.5) - 2 / 3) < 1e-8
    assert abs(contour_quadrature(gauss_integrand(1, 1, 2), 0.25) - 4 * math.log(1.25)) < 1e-8


@pytest.mark.parametrize("mb,x", [(binomial_integrand("2/3"), 0.7), (gauss_integrand("1/3", "3/4", "7/5"), 0.2), (gauss_integrand(1, 2, "5/2"), 1.7)])
def test_quadrature_real(mb, x):
    assert abs(contour_quadrature(mb, x).imag) < 1e-10


def test_partial_sums_converge_geometrically():
    mb = binomial_integrand("2/3")
    x = 0.4
    q = contour_quadrature(mb, x)
    rs = residue_sum(mb, x=x)
    errs = [abs(rs.partial(x, M) - q) for M in (5, 10, 20)]
    assert errs[0] > errs[1] > errs[2]
    Cs = [e / x**M for e, M in zip(errs, (5, 10, 20))]
    assert max(Cs) / min(Cs) < 10


def test_contour_offset_independence():
    base = gauss_integrand("1/3", "3/4", "7/5")
    a = contour_quadrature(MBIntegrand(1, base.num_gammas, base.den_gammas, contour=(Fraction(-1, 10),)), 0.3)
    b = contour_quadrature(MBIntegrand(1, base.num_gammas, base.den_gammas, contour=(Fraction(-1, 5),)), 0.3)
    assert abs(a - b) < 1e-8


def test_default_contour_midpoint():
    assert default_contour(binomial_integrand(1)) == Fraction(1, 2)
    assert default_contour(gauss_integrand("1/2", 2, 3)) == Fraction(-1, 4)


def test_pole_graze_detected():
    mb = binomial_integrand(1, contour=Fraction(1, 2))
    # an eps-dependent offset puts a pole onto the line at eps = 1/2
    moved = MBIntegrand(1, (GammaFactor((1,), "-eps"), mb.num_gammas[1]), mb.den_gammas, contour=(Fraction(1, 2),), x_powers=(-1,))
    with pytest.raises(ContourError, match="t = "):
        contour_quadrature(moved, 0.5, eps_value=0.5, n_points=2001)


def test_json_round_trip():
    mb = gauss_integrand("1/2+eps", 2, 3)
    assert MBIntegrand.from_json(mb.to_json()) == mb


def test_unit_slope_residues_with_eps():
    mb = binomial_integrand("1/2")
    eps_mb = gauss_integrand("1/2+eps", "1/3", "3/2-eps")
    rs = residue_sum(eps_mb, x=0.3)
    [t] = rs.terms
    assert t.coefficients(9) == direct_residues(eps_mb, t.family, 10)
    val = rs.evaluate(0.3, eps=0.1)
    assert abs(val - contour_quadrature(eps_mb, 0.3, eps_value=0.1)) < 1e-9
    assert mb.contour == (Fraction(1, 4),)


def test_non_unit_generating_slope():
    # Gamma(2s) Gamma(1 - s): left poles at s = -n/2 step by 1/2, the other row moves by half-integers
    mb = MBIntegrand(1, (GammaFactor((2,), 0), GammaFactor((-1,), 1)), contour=(Fraction(1, 4),))
    with pytest.raises(NotImplementedError):
        residue_sum(mb, side="left")
