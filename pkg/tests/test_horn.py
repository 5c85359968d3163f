import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import hyp2f1

from hornred.algebra import RatFun
from hornred.horn import (
    ConvergenceError,
    GammaRow,
    HornSpec,
    LinearParam,
    PFQSpec,
    PoleError,
    appell_f1,
    eval_numeric,
    horn_coefficients,
    spec_from_json,
    sum_numeric,
    term_ratio,
    truncated_series,
)
from hornred.syntax import parse_ratfun

import oracles


def F(up, lo):
    return PFQSpec(tuple(up), tuple(lo))


def test_term_ratio_symbolic():
    r = term_ratio(F([1, 1], [2]))
    assert str(r) == "(m + 1)/(m + 2)"
    assert str(term_ratio(F([], []))) == "1/(m + 1)"


def test_term_ratio_at_zero():
    r = term_ratio(F(["1/2+eps", "1/3"], ["3/2"]), 0)
    assert r == parse_ratfun("1/9 + 2/9*eps")


def test_series_log():
    s = truncated_series(F([1, 1], [2]), 4)
    assert [c.constant_value() for c in s.coeffs] == [Fraction(1, k) for k in range(1, 6)]


def test_series_terminating():
    s = truncated_series(F([-2], []), 4)
    assert [c.constant_value() for c in s.coeffs] == [1, -2, 1, 0, 0]


def test_appell_f1_on_axis():
    f1 = appell_f1("1/2+eps", "1/3", "2/5", "3/2")
    table = horn_coefficients(f1, 6)
    g = truncated_series(F(["1/2+eps", "1/3"], ["3/2"]), 6)
    for (m, n), c in table.items():
        if n == 0:
            assert c == g[m]


def test_horn_arity_one_reproduces_pfq():
    f = F(["1/2+eps", "1/3"], ["3/2-2*eps"])
    h = HornSpec.from_pfq(f)
    table = truncated_series(h, 10)
    assert [table[(m,)] for m in range(11)] == list(truncated_series(f, 10).coeffs)


def test_json_round_trip():
    f = F(["1/2+2*eps", "1/3"], ["3/2"])
    assert spec_from_json(f.to_json()) == f
    h = appell_f1(1, 2, 3, 4)
    assert spec_from_json(h.to_json()) == h


@pytest.mark.parametrize("bad", [{"pFq": {"upper": ["1"]}}, {"pFq": {"upper": ["1"], "lower": ["-2"]}}, {"nothing": 1}])
def test_json_errors(bad):
    with pytest.raises(ValueError):
        spec_from_json(bad)


def test_lower_pole_rejected_but_eps_slope_allowed():
    with pytest.raises(PoleError):
        F([1], [0])
    F([1], ["eps"])


def test_divergent_spec_rejected():
    with pytest.raises(ValueError):
        F([1, 1, 1], [2])
    F([1, 1, -3], [2])


def test_horn_pole_names_row():
    # Gamma(1 - m) / Gamma(1) meets its first pole at m = 1
    h = HornSpec((GammaRow((1,), LinearParam(1)), GammaRow((-1,), LinearParam(1))), (), 1)
    with pytest.raises(PoleError, match=r"row 2 .*index \(1,\)"):
        horn_coefficients(h, 3)


def test_eval_closed_forms():
    assert abs(eval_numeric(F([1, 1], [2]), 0.5) - 2 * math.log(2)) < 1e-10
    assert abs(eval_numeric(F([2, 5], [5]), 0.5) - 4) < 1e-10
    assert eval_numeric(F(["1/3+eps", 2], ["1/7"]), 0, eps_value=0.2) == 1


def test_eval_refuses_outside_disk():
    with pytest.raises(ValueError):
        eval_numeric(F([1, 1], [2]), 1.0)
    assert abs(eval_numeric(F([-2], []), 3.0) - 4) < 1e-12


def test_term_cap():
    with pytest.raises(ConvergenceError) as info:
        eval_numeric(F([1, 1], [2]), 0.999, term_cap=50)
    assert info.value.terms == 50 and info.value.last_term > 0


def test_horn_numeric_vs_exact():
    f1 = appell_f1(Fraction(1, 2), Fraction(1, 3), Fraction(2, 5), Fraction(3, 2))
    table = horn_coefficients(f1, 40)
    x, y = Fraction(1, 5), Fraction(-1, 7)
    exact = sum(c.constant_value() * x**m * y**n for (m, n), c in table.items())
    assert abs(eval_numeric(f1, (0.2, -1 / 7)) - float(exact)) < 1e-12


def test_horn_fractional_slopes_numeric_only():
    h = HornSpec((GammaRow((Fraction(1, 2),), LinearParam(1)),), (GammaRow((1,), LinearParam(1)),), 1)
    with pytest.raises(NotImplementedError):
        truncated_series(h, 3)
    # sum_m Gamma(1 + m/2) / (Gamma(1) m!) x^m, by brute force
    x = 0.3
    ref = sum(math.gamma(1 + m / 2) / math.factorial(m) * x**m for m in range(60))
    assert abs(eval_numeric(h, [x]) - ref) < 1e-12


def test_horn_polydisk_guard():
    with pytest.raises(ValueError):
        eval_numeric(appell_f1(1, 1, 1, 2), (0.6, 0.1))


def test_eval_against_scipy():
    rng = random.Random(11)
    for _ in range(20):
        a, b, c = (rng.uniform(-3, 3) for _ in range(3))
        if abs(c - round(c)) < 1e-3 and c < 0.5:
            continue
        f = F([Fraction(a).limit_denominator(1000), Fraction(b).limit_denominator(1000)], [Fraction(c).limit_denominator(1000)])
        aa, bb, cc = (float(p.const) for p in f.upper + f.lower)
        zz = rng.uniform(-0.6, 0.6)
        ref = hyp2f1(aa, bb, cc, zz)
        assert abs(eval_numeric(f, zz, rel_tol=1e-13) - ref) <= 1e-10 * max(1, abs(ref))


# ---------------------------------------------------------------------------
# properties


@st.composite
def specs(draw):
    seed = draw(st.integers(0, 10**9))
    return oracles.random_spec(random.Random(seed))


@settings(max_examples=100)
@given(specs(), st.integers(1, 12))
def test_successive_ratios_follow_term_ratio(f, N):
    s = truncated_series(f, N)
    for m in range(1, N + 1):
        if not s[m - 1].is_zero():
            assert s[m] / s[m - 1] == term_ratio(f, m - 1)


@settings(max_examples=100)
@given(specs(), st.fractions(-1, 1, max_denominator=8).map(lambda q: q / 2))
def test_numeric_agrees_with_exact_partial_sums(f, zq):
    f0 = f.at_eps(Fraction(0))
    res = sum_numeric(f0, float(zq))
    N = res.terms + 5
    exact = float(truncated_series(f0, N).partial_sum(zq, eps=0))
    # the exact partial sum has its own tail; it is far below the reported bound for |z| <= 1/2
    assert abs(res.value - exact) <= max(res.remainder_bound, 1e-10 * abs(exact)) + 1e-12 * max(1, abs(exact))
