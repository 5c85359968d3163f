"""pFq and Horn-type series: structural types, exact truncated series, numerics."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .algebra import ME, ZE, Poly, RatFun, Series
from .gamma import loggamma
from .syntax import parse_ratfun


class PoleError(ValueError):
    """A Gamma/Pochhammer pole was hit on the summation lattice."""


class ConvergenceError(RuntimeError):
    def __init__(self, msg: str, estimate: complex, last_term: float, terms: int):
        super().__init__(f"{msg} (estimate {estimate}, last term magnitude {last_term:.3e}, {terms} terms)")
        self.estimate = estimate
        self.last_term = last_term
        self.terms = terms


@dataclass(frozen=True, order=True)
class LinearParam:
    """The parameter ``const + slope*eps`` with exact rational parts."""

    const: Fraction
    slope: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "const", Fraction(self.const))
        object.__setattr__(self, "slope", Fraction(self.slope))

    @classmethod
    def parse(cls, text) -> "LinearParam":
        if isinstance(text, LinearParam):
            return text
        if isinstance(text, (int, Fraction)):
            return cls(Fraction(text))
        r = parse_ratfun(str(text))
        if not r.is_polynomial() or "z" in r.variables or r.num.degree("eps") > 1:
            raise ValueError(f"{text!r} is not of the form r + s*eps")
        p = r.as_poly()
        return cls(p.subs(eps=0).constant_value(), p.derivative("eps").constant_value() if p.degree("eps") == 1 else 0)

    def __str__(self):
        def mag(x):
            return str(abs(x))

        parts = []
        if self.const or not self.slope:
            parts.append(str(self.const))
        if self.slope:
            body = "eps" if abs(self.slope) == 1 else f"{mag(self.slope)}*eps"
            if parts:
                parts.append(("-" if self.slope < 0 else "+") + body)
            else:
                parts.append(("-" if self.slope < 0 else "") + body)
        return "".join(parts)

    def __add__(self, other):
        if isinstance(other, LinearParam):
            return LinearParam(self.const + other.const, self.slope + other.slope)
        if isinstance(other, (int, Fraction)):
            return LinearParam(self.const + other, self.slope)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return LinearParam(-self.const, -self.slope)

    def __sub__(self, other):
        if isinstance(other, (LinearParam, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LinearParam":
        return LinearParam(self.const * c, self.slope * c)

    def ratfun(self, ctx=ZE) -> RatFun:
        return RatFun.from_poly(self.poly(ctx))

    def poly(self, ctx=ZE) -> Poly:
        return Poly.const(self.const, ctx) + Poly.var("eps", ctx).scale(self.slope)

    def at(self, eps):
        if isinstance(eps, (int, Fraction)):
            return self.const + self.slope * Fraction(eps)
        return float(self.const) + float(self.slope) * eps

    def is_integer(self) -> bool:
        return self.slope == 0 and self.const.denominator == 1

    def is_nonpositive_integer(self) -> bool:
        return self.is_integer() and self.const <= 0

    def is_zero(self) -> bool:
        return self.const == 0 and self.slope == 0


def _params(xs) -> tuple[LinearParam, ...]:
    return tuple(LinearParam.parse(x) for x in xs)


@dataclass(frozen=True)
class PFQSpec:
    upper: tuple[LinearParam, ...]
    lower: tuple[LinearParam, ...]

    def __post_init__(self):
        object.__setattr__(self, "upper", _params(self.upper))
        object.__setattr__(self, "lower", _params(self.lower))
        for k, b in enumerate(self.lower):
            if b.is_nonpositive_integer():
                raise PoleError(f"lower parameter b{k + 1} = {b} is a non-positive integer")
        if self.p > self.q + 1 and not self.is_terminating():
            raise ValueError(f"{self.p}F{self.q} with p > q+1 must terminate")

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def is_terminating(self) -> bool:
        return any(a.is_nonpositive_integer() for a in self.upper)

    def termination_degree(self) -> int | None:
        degs = [-int(a.const) for a in self.upper if a.is_nonpositive_integer()]
        return min(degs) if degs else None

    def shifted(self, upper_shifts: Sequence[int], lower_shifts: Sequence[int]) -> "PFQSpec":
        if len(upper_shifts) != self.p or len(lower_shifts) != self.q:
            raise ValueError(f"shift vectors must have lengths {self.p} and {self.q}")
        return PFQSpec(
            tuple(a + int(m) for a, m in zip(self.upper, upper_shifts)),
            tuple(b + int(n) for b, n in zip(self.lower, lower_shifts)),
        )

    def at_eps(self, eps: Fraction) -> "PFQSpec":
        return PFQSpec(tuple(LinearParam(a.at(eps)) for a in self.upper), tuple(LinearParam(b.at(eps)) for b in self.lower))

    def has_eps(self) -> bool:
        return any(x.slope for x in self.upper + self.lower)

    def __str__(self):
        up = ",".join(map(str, self.upper))
        lo = ",".join(map(str, self.lower))
        return f"{self.p}F{self.q}({up};{lo};z)"

    def to_json(self) -> dict:
        return {"pFq": {"upper": [str(a) for a in self.upper], "lower": [str(b) for b in self.lower]}}

    @classmethod
    def from_json(cls, obj: dict) -> "PFQSpec":
        body = obj.get("pFq", obj)
        for key in ("upper", "lower"):
            if key not in body or not isinstance(body[key], list):
                raise ValueError(f"pFq.{key} must be a list")
        return cls(tuple(body["upper"]), tuple(body["lower"]))


@dataclass(frozen=True)
class GammaRow:
    """One Gamma(slopes . m + offset) factor of a Horn coefficient."""

    slopes: tuple[Fraction, ...]
    offset: LinearParam

    def __post_init__(self):
        object.__setattr__(self, "slopes", tuple(Fraction(s) for s in self.slopes))
        object.__setattr__(self, "offset", LinearParam.parse(self.offset))

    def integer_slopes(self) -> bool:
        return all(s.denominator == 1 for s in self.slopes)

    def shift_at(self, index: Sequence[int]) -> Fraction:
        return sum((s * k for s, k in zip(self.slopes, index)), Fraction(0))


@dataclass(frozen=True)
class HornSpec:
    """Sum over m of prod Gamma(mu_j.m + gamma_j) / prod Gamma(nu_k.m + sigma_k) x^m."""

    num_rows: tuple[GammaRow, ...]
    den_rows: tuple[GammaRow, ...]
    arity: int

    def __post_init__(self):
        object.__setattr__(self, "num_rows", tuple(self.num_rows))
        object.__setattr__(self, "den_rows", tuple(self.den_rows))
        if not self.num_rows:
            raise ValueError("a Horn series needs at least one numerator Gamma row")
        for row in self.num_rows + self.den_rows:
            if len(row.slopes) != self.arity:
                raise ValueError(f"slope vector {row.slopes} does not have length {self.arity}")

    def integer_slopes(self) -> bool:
        return all(r.integer_slopes() for r in self.num_rows + self.den_rows)

    def to_json(self) -> dict:
        def rows(rs, key, pkey):
            return [{key: [str(s) for s in r.slopes], pkey: str(r.offset)} for r in rs]

        return {"horn": {"num": rows(self.num_rows, "mu", "gamma"), "den": rows(self.den_rows, "nu", "sigma"), "arity": self.arity}}

    @classmethod
    def from_json(cls, obj: dict) -> "HornSpec":
        body = obj.get("horn", obj)
        try:
            arity = int(body["arity"])
            num = tuple(GammaRow(tuple(parse_ratfun(s).constant_value() for s in r["mu"]), LinearParam.parse(r["gamma"])) for r in body["num"])
            den = tuple(GammaRow(tuple(parse_ratfun(s).constant_value() for s in r["nu"]), LinearParam.parse(r["sigma"])) for r in body.get("den", []))
        except KeyError as exc:
            raise ValueError(f"horn spec missing field {exc}") from None
        return cls(num, den, arity)

    @classmethod
    def from_pfq(cls, f: PFQSpec) -> "HornSpec":
        one = (Fraction(1),)
        return cls(
            tuple(GammaRow(one, a) for a in f.upper),
            tuple(GammaRow(one, b) for b in f.lower) + (GammaRow(one, LinearParam(1)),),
            1,
        )


def appell_f1(a, b1, b2, c) -> HornSpec:
    """Appell F1(a; b1, b2; c; x1, x2) in Horn form."""
    a, b1, b2, c = map(LinearParam.parse, (a, b1, b2, c))
    return HornSpec(
        (GammaRow((1, 1), a), GammaRow((1, 0), b1), GammaRow((0, 1), b2)),
        (GammaRow((1, 1), c), GammaRow((1, 0), LinearParam(1)), GammaRow((0, 1), LinearParam(1))),
        2,
    )


def spec_from_json(obj: dict) -> Union[PFQSpec, HornSpec]:
    if "pFq" in obj:
        return PFQSpec.from_json(obj)
    if "horn" in obj:
        return HornSpec.from_json(obj)
    raise ValueError("expected a 'pFq' or 'horn' object")


# ---------------------------------------------------------------------------
# exact coefficients


def term_ratio(f: PFQSpec, m: int | None = None) -> RatFun:
    """c_{m+1}/c_m; symbolic in ``m`` (variables m, eps) when ``m`` is None."""
    if m is None:
        ctx = ME
        mm = Poly.var("m", ME)
    else:
        ctx = ZE
        mm = Poly.const(m, ZE)
    num = Poly.const(1, ctx)
    for a in f.upper:
        num = num * (a.poly(ctx) + mm)
    den = mm + 1
    for b in f.lower:
        den = den * (b.poly(ctx) + mm)
    if den.is_zero():
        raise PoleError(f"term ratio of {f} has a zero denominator at m = {m}")
    return RatFun(num, den)


def truncated_series(f, N: int):
    """Exact coefficients through total degree N.

    pFq -> :class:`Series` normalised to c_0 = 1. Horn -> dict from index
    tuples to RatFun, normalised by the Gamma ratio at the origin; only
    integer slope matrices are supported.
    """
    if isinstance(f, HornSpec):
        return horn_coefficients(f, N)
    ups = [a.poly() for a in f.upper]
    los = [b.poly() for b in f.lower]
    coeffs = [RatFun.const(1)]
    c = coeffs[0]
    for m in range(N):
        if c.is_zero():
            coeffs.append(c)
            continue
        num, den = Poly.const(1), Poly.const(m + 1)
        for a in ups:
            num = num * (a + m)
        for b in los:
            den = den * (b + m)
        if den.is_zero():
            raise PoleError(f"term ratio of {f} has a zero denominator at m = {m}")
        c = c * RatFun(num, den)
        coeffs.append(c)
    return Series(coeffs)


def pochhammer(x: LinearParam, k: int) -> RatFun:
    """(x)_k = Gamma(x+k)/Gamma(x) as a rational function of eps, any integer k."""
    out = RatFun.const(1)
    if k >= 0:
        for i in range(k):
            out = out * (x + i).ratfun()
        return out
    for i in range(1, -k + 1):
        t = (x - i).ratfun()
        if t.is_zero():
            raise PoleError(f"({x})_{k} is undefined")
        out = out / t
    return out


def horn_coefficient(f: HornSpec, index: Sequence[int]) -> RatFun:
    if not f.integer_slopes():
        raise NotImplementedError("exact Horn coefficients need integer slope matrices; use eval_numeric")
    c = RatFun.const(1)
    for j, row in enumerate(f.num_rows):
        k = int(row.shift_at(index))
        try:
            c = c * pochhammer(row.offset, k)
        except PoleError:
            raise PoleError(f"numerator row {j + 1} ({row.offset}) hits a Gamma pole at index {tuple(index)}") from None
    for j, row in enumerate(f.den_rows):
        k = int(row.shift_at(index))
        if k >= 0:
            p = pochhammer(row.offset, k)
            if p.is_zero():
                raise PoleError(f"denominator row {j + 1} ({row.offset}) is singular at index {tuple(index)}")
            c = c / p
        else:
            # 1/(s)_k = (s-1)(s-2)...(s-|k|) is always finite
            for i in range(1, -k + 1):
                c = c * (row.offset - i).ratfun()
    return c


def horn_coefficients(f: HornSpec, N: int) -> dict[tuple[int, ...], RatFun]:
    out = {}
    for total in range(N + 1):
        for index in _compositions(total, f.arity):
            out[index] = horn_coefficient(f, index)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# numerics


@dataclass(frozen=True)
class NumericSum:
    value: complex
    terms: int
    last_term: float
    remainder_bound: float


def _eps_float(eps) -> float:
    return float(Fraction(eps)) if isinstance(eps, (int, Fraction)) else float(eps)


def sum_numeric(f, point, eps_value=0, rel_tol: float = 1e-10, term_cap: int = 10**6) -> NumericSum:
    if isinstance(f, HornSpec):
        return _sum_horn(f, point, eps_value, rel_tol, term_cap)
    z = complex(point[0] if isinstance(point, (list, tuple, np.ndarray)) else point)
    eps = _eps_float(eps_value)
    if f.p == f.q + 1 and abs(z) >= 1 and not f.is_terminating():
        raise ValueError(f"|z| = {abs(z)} is outside the disk of convergence of {f}")
    ups = [a.at(eps) for a in f.upper]
    los = [b.at(eps) for b in f.lower]
    for b in los:
        if b <= 0 and abs(b - round(b)) < 1e-14:
            raise PoleError(f"lower parameter {b} is a non-positive integer at eps = {eps}")
    total = 1 + 0j
    term = 1 + 0j
    quiet = 0
    m = 0
    while True:
        r = z / (m + 1)
        for a in ups:
            r *= a + m
        for b in los:
            r /= b + m
        term *= r
        total += term
        m += 1
        mag = abs(term)
        if mag <= rel_tol * abs(total):
            quiet += 1
            # three quiet terms, and the geometric tail estimate agrees
            if quiet >= 3 and _tail(z, ups, los, m, mag) <= rel_tol * abs(total):
                break
        else:
            quiet = 0
        if m >= term_cap:
            raise ConvergenceError(f"{f} did not converge at z = {z}", total, mag, m)
    return NumericSum(total, m + 1, abs(term), _tail(z, ups, los, m, abs(term)))


def _tail(z, ups, los, m, mag) -> float:
    """Ratio-test bound on the terms after index m, given |term_m| = mag."""
    if mag == 0:
        return 0.0
    rho = abs(z) * math.prod(abs(a + m) for a in ups) / (max(1e-300, math.prod(abs(b + m) for b in los)) * (m + 1))
    return mag * rho / (1 - rho) if rho < 1 else float("inf")


def _horn_log_coefficient(f: HornSpec, index, eps) -> complex | None:
    """log of the normalised coefficient; None when a reciprocal Gamma vanishes."""
    val = 0j
    for j, row in enumerate(f.num_rows):
        a = float(row.shift_at(index)) + row.offset.at(eps)
        try:
            val += loggamma(a)
        except ZeroDivisionError:
            raise PoleError(f"numerator row {j + 1} hits a Gamma pole at index {tuple(index)}") from None
    for row in f.den_rows:
        a = float(row.shift_at(index)) + row.offset.at(eps)
        try:
            val -= loggamma(a)
        except ZeroDivisionError:
            return None
    return val


def _horn_float_coefficient(f: HornSpec, index, eps: float) -> float:
    c = 1.0
    for j, row in enumerate(f.num_rows):
        k = int(row.shift_at(index))
        x = row.offset.at(eps)
        if k >= 0:
            for i in range(k):
                c *= x + i
        else:
            for i in range(1, -k + 1):
                if x - i == 0:
                    raise PoleError(f"numerator row {j + 1} hits a Gamma pole at index {tuple(index)}")
                c /= x - i
    for j, row in enumerate(f.den_rows):
        k = int(row.shift_at(index))
        x = row.offset.at(eps)
        if k >= 0:
            for i in range(k):
                if x + i == 0:
                    raise PoleError(f"denominator row {j + 1} is singular at index {tuple(index)}")
                c /= x + i
        else:
            for i in range(1, -k + 1):
                c *= x - i
    return c


def _sum_horn(f: HornSpec, point, eps_value, rel_tol, term_cap) -> NumericSum:
    xs = [complex(x) for x in point]
    if len(xs) != f.arity:
        raise ValueError(f"Horn series of arity {f.arity} needs {f.arity} arguments")
    if any(abs(x) >= 0.5 for x in xs):
        raise ValueError("Horn evaluation is restricted to the polydisk |x_i| < 1/2")
    eps = _eps_float(eps_value)
    exact_route = f.integer_slopes()
    if not exact_route:
        origin = _horn_log_coefficient(f, (0,) * f.arity, eps)
        if origin is None:
            raise PoleError("normalising Gamma ratio at the origin vanishes")
    total = 0j
    quiet = 0
    shell_mag = 0.0
    count = 0
    degree = 0
    while True:
        shell = 0j
        for index in _compositions(degree, f.arity):
            mono = 1 + 0j
            for x, k in zip(xs, index):
                if k:
                    mono *= x**k
            if mono == 0:
                continue
            if exact_route:
                c = _horn_float_coefficient(f, index, eps)
            else:
                lc = _horn_log_coefficient(f, index, eps)
                c = 0.0 if lc is None else np.exp(lc - origin)
            shell += c * mono
            count += 1
        total += shell
        shell_mag = abs(shell)
        degree += 1
        if shell_mag <= rel_tol * abs(total):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        if count >= term_cap:
            raise ConvergenceError("Horn series did not converge", total, shell_mag, count)
    return NumericSum(complex(total), count, shell_mag, shell_mag)


def eval_numeric(f, point, eps_value=0, rel_tol: float = 1e-10, term_cap: int = 10**6) -> complex:
    """Partial sums until three consecutive terms fall below rel_tol*|sum|."""
    return sum_numeric(f, point, eps_value, rel_tol, term_cap).value
