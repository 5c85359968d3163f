"""Exact arithmetic over Q, Q[z, eps], Q(z, eps) and truncated z-series.

Polynomials are backed by FLINT's sparse multivariate rationals
(``python-flint``); this module adds the canonical forms the rest of the
package relies on: rational functions are stored with coprime, integer
primitive numerator and denominator, the denominator having a positive
leading coefficient under graded-lex order with ``eps < z``.

Rationals at the API boundary are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from flint import fmpq, fmpq_mpoly, fmpq_mpoly_ctx

Rational = Fraction

#: the two-variable context used everywhere; ``z`` precedes ``eps`` so that
#: deglex places ``eps < z``.
ZE = fmpq_mpoly_ctx.get(("z", "eps"), "deglex")
#: context for term ratios, with the summation index ``m`` in place of ``z``.
ME = fmpq_mpoly_ctx.get(("m", "eps"), "deglex")

Scalar = Union[int, Fraction]


def to_fmpq(x: Scalar) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, int):
        return fmpq(x)
    x = Fraction(x)
    return fmpq(x.numerator, x.denominator)


def to_fraction(x) -> Fraction:
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    return Fraction(x)


class Poly:
    """Immutable polynomial in the variables of one FLINT context."""

    __slots__ = ("raw", "_hash")

    def __init__(self, raw: fmpq_mpoly):
        self.raw = raw
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: Scalar, ctx=ZE) -> "Poly":
        return cls(ctx.from_dict({(0,) * ctx.nvars(): to_fmpq(c)}) if c else ctx.from_dict({}))

    @classmethod
    def var(cls, name: str, ctx=ZE) -> "Poly":
        return cls(ctx.gen(ctx.variable_to_index(name)))

    @classmethod
    def from_terms(cls, terms: dict, ctx=ZE) -> "Poly":
        return cls(ctx.from_dict({tuple(k): to_fmpq(v) for k, v in terms.items() if v}))

    @property
    def ctx(self):
        return self.raw.context()

    # inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.raw.is_zero()

    def is_constant(self) -> bool:
        return self.raw.is_constant()

    def terms(self) -> dict:
        """Exponent tuple -> Fraction, in canonical (deglex, descending) order."""
        return {tuple(int(e) for e in m): to_fraction(c) for m, c in zip(self.raw.monoms(), self.raw.coeffs())}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.raw.coefficient(0)) if not self.is_zero() else Fraction(0)

    @property
    def variables(self) -> tuple[str, ...]:
        names = self.ctx.names()
        degs = self.raw.degrees() if not self.is_zero() else (0,) * len(names)
        return tuple(n for n, d in zip(names, degs) if d > 0)

    def depends_on(self, name: str) -> bool:
        return not self.is_zero() and self.raw.degrees()[self.ctx.variable_to_index(name)] > 0

    def degree(self, name: str) -> int:
        if self.is_zero():
            return -1
        return int(self.raw.degrees()[self.ctx.variable_to_index(name)])

    def total_degree(self) -> int:
        return -1 if self.is_zero() else int(self.raw.total_degree())

    def leading_coefficient(self) -> Fraction:
        return to_fraction(self.raw.leading_coefficient())

    def content(self) -> Fraction:
        """Positive rational c with self/c integral and primitive."""
        cs = self.raw.coeffs()
        if not cs:
            return Fraction(1)
        num = gcd(*[int(c.p) for c in cs])
        den = lcm(*[int(c.q) for c in cs])
        return Fraction(num, den)

    def coeff_in(self, name: str) -> list["Poly"]:
        """Coefficients w.r.t. ``name`` (index k = coefficient of name**k)."""
        i = self.ctx.variable_to_index(name)
        out: dict[int, dict] = {}
        for mon, c in zip(self.raw.monoms(), self.raw.coeffs()):
            k = int(mon[i])
            rest = tuple(0 if j == i else e for j, e in enumerate(mon))
            out.setdefault(k, {})[rest] = c
        n = max(out) + 1 if out else 1
        return [Poly(self.ctx.from_dict(out.get(k, {}))) for k in range(n)]

    # arithmetic ---------------------------------------------------------
    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ctx is not self.ctx:
                raise ValueError("polynomials from different variable sets")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self.ctx)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else Poly(self.raw + o.raw)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else Poly(self.raw - o.raw)

    def __rsub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else Poly(o.raw - self.raw)

    def __mul__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else Poly(self.raw * o.raw)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly(-self.raw)

    def __pow__(self, n: int):
        return Poly(self.raw**n)

    def exact_div(self, other: "Poly") -> "Poly":
        return Poly(self.raw / self._lift(other).raw)

    def scale(self, c: Scalar) -> "Poly":
        return Poly(self.raw * to_fmpq(c))

    def gcd(self, other: "Poly") -> "Poly":
        return Poly(self.raw.gcd(self._lift(other).raw))

    def derivative(self, name: str) -> "Poly":
        return Poly(self.raw.derivative(name))

    def subs(self, **values: Scalar) -> "Poly":
        return Poly(self.raw.subs({k: to_fmpq(v) for k, v in values.items()}))

    def __call__(self, **values: Scalar) -> Fraction:
        names = self.ctx.names()
        missing = [n for n in self.variables if n not in values]
        if missing:
            raise ValueError(f"no value for {missing}")
        args = [to_fmpq(values.get(n, 0)) for n in names]
        return to_fraction(self.raw(*args))

    def evaluate_float(self, **values: complex) -> complex:
        names = self.ctx.names()
        total = 0j
        for mon, c in zip(self.raw.monoms(), self.raw.coeffs()):
            t = complex(int(c.p) / int(c.q))
            for n, e in zip(names, mon):
                if e:
                    t *= values[n] ** int(e)
            total += t
        return total

    # comparison / printing ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ctx is other.ctx and self.raw == other.raw

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((m, int(c.p), int(c.q)) for m, c in zip(self.raw.monoms(), self.raw.coeffs())))
        return self._hash

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    names = p.ctx.names()
    out = []
    for mon, c in p.terms().items():
        factors = []
        for n, e in zip(names, mon):
            if e == 1:
                factors.append(n)
            elif e > 1:
                factors.append(f"{n}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


class RatFun:
    """Canonical quotient of two polynomials; build through :func:`ratfun_normalize`.

    Arithmetic runs on a gcd-cancelled pair with a monic denominator (unique,
    and cheap to maintain). The integer-primitive form exposed as ``num`` and
    ``den`` is derived from it on first access.
    """

    __slots__ = ("_n", "_d", "_prim", "_hash")

    def __init__(self, num: Poly, den: Poly, _reduced: bool = False):
        if _reduced:
            self._n, self._d = _monic_pair(num, den)
        else:
            self._n, self._d = _reduced_pair(num, den)
        self._prim = None
        self._hash = None

    @classmethod
    def _raw(cls, n: Poly, d: Poly) -> "RatFun":
        obj = cls.__new__(cls)
        obj._n, obj._d, obj._prim, obj._hash = n, d, None, None
        return obj

    @classmethod
    def const(cls, c: Scalar, ctx=ZE) -> "RatFun":
        return cls._raw(Poly.const(c, ctx), Poly.const(1, ctx))

    @classmethod
    def var(cls, name: str, ctx=ZE) -> "RatFun":
        return cls._raw(Poly.var(name, ctx), Poly.const(1, ctx))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFun":
        return cls._raw(p, Poly.const(1, p.ctx))

    def _primitive(self) -> tuple[Poly, Poly]:
        if self._prim is None:
            self._prim = _normalize_content(self._n, self._d)
        return self._prim

    @property
    def num(self) -> Poly:
        """Numerator: integer coefficients with content 1 (sign carries the value's sign)."""
        return self._primitive()[0]

    @property
    def den(self) -> Poly:
        """Denominator: integer coefficients with content 1 and positive leading coefficient."""
        return self._primitive()[1]

    @property
    def ctx(self):
        return self._n.ctx

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def is_one(self) -> bool:
        return self._n.raw.is_one() and self._d.raw.is_one()

    def is_constant(self) -> bool:
        return self._n.is_constant() and self._d.is_constant()

    def is_polynomial(self) -> bool:
        return self._d.is_constant()

    def constant_value(self) -> Fraction:
        return self._n.constant_value() / self._d.constant_value()

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a polynomial")
        return self._n

    def depends_on(self, name: str) -> bool:
        return self._n.depends_on(name) or self._d.depends_on(name)

    @property
    def variables(self) -> tuple[str, ...]:
        used = set(self._n.variables) | set(self._d.variables)
        return tuple(n for n in self.ctx.names() if n in used)

    # arithmetic ---------------------------------------------------------
    def _lift(self, other) -> "RatFun":
        if isinstance(other, RatFun):
            if other.ctx is not self.ctx:
                raise ValueError("rational functions from different variable sets")
            return other
        if isinstance(other, Poly):
            return RatFun.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RatFun.const(other, self.ctx)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self._d.is_constant():
            if o._d.is_constant():
                return RatFun._raw(self._n + o._n, self._d)
            return RatFun(self._n * o._d + o._n, o._d)
        if o._d.is_constant():
            return RatFun(self._n + o._n * self._d, self._d)
        if self._d == o._d:
            return RatFun(self._n + o._n, self._d)
        g = self._d.gcd(o._d)
        d1 = self._d.exact_div(g)
        d2 = o._d.exact_div(g)
        return RatFun(self._n * d2 + o._n * d1, self._d * d2)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._raw(-self._n, self._d)

    def __sub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return RatFun.const(0, self.ctx)
        # cross-cancel before multiplying keeps operands small; a/gcd(a,b)
        # and b/gcd(a,b) are coprime, so the product needs no further gcd
        n1, d1, n2, d2 = self._n, self._d, o._n, o._d
        if not d2.is_constant():
            g = n1.gcd(d2)
            if not g.is_constant():
                n1, d2 = n1.exact_div(g), d2.exact_div(g)
        if not d1.is_constant():
            g = n2.gcd(d1)
            if not g.is_constant():
                n2, d1 = n2.exact_div(g), d1.exact_div(g)
        return RatFun(n1 * n2, d1 * d2, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        return RatFun(self._d, self._n, _reduced=True)

    def __truediv__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        return o if o is NotImplemented else o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFun._raw(self._n**n, self._d**n)

    def derivative(self, name: str) -> "RatFun":
        dn = self._n.derivative(name)
        dd = self._d.derivative(name)
        return RatFun(dn * self._d - self._n * dd, self._d * self._d)

    def theta(self) -> "RatFun":
        """Euler operator z*d/dz."""
        return self.derivative("z") * RatFun.var("z", self.ctx)

    def subs(self, **values: Scalar) -> "RatFun":
        den = self._d.subs(**values)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator of {self} vanishes at {values}")
        return RatFun(self._n.subs(**values), den)

    def __call__(self, **values: Scalar) -> Fraction:
        d = self._d(**values)
        if d == 0:
            raise ZeroDivisionError(f"denominator of {self} vanishes at {values}")
        return self._n(**values) / d

    def evaluate_float(self, **values: complex) -> complex:
        return self._n.evaluate_float(**values) / self._d.evaluate_float(**values)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, Poly):
            other = RatFun.from_poly(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return self._n == other._n and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, self._d))
        return self._hash

    def __str__(self):
        num, den = self._primitive()
        n = format_poly(num)
        if den.raw.is_one():
            return n
        d = format_poly(den)
        if len(num.raw) > 1:
            n = f"({n})"
        if len(den.raw) > 1 or not den.is_constant():
            d = f"({d})" if len(den.raw) > 1 else d
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFun({str(self)!r})"


def _monic_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero():
        return num, Poly.const(1, den.ctx)
    lc = den.raw.leading_coefficient()
    if lc == 1:
        return num, den
    return Poly(num.raw / lc), Poly(den.raw / lc)


def _reduced_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero():
        return Poly.const(0, den.ctx), Poly.const(1, den.ctx)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_constant():
            num = num.exact_div(g)
            den = den.exact_div(g)
    return _monic_pair(num, den)


def _canonical_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    return _normalize_content(*_reduced_pair(num, den))


def _normalize_content(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    cn, cd = num.content(), den.content()
    if den.leading_coefficient() < 0:
        cd = -cd
    ratio = cn / cd
    num = num.scale(Fraction(ratio.numerator) / cn)
    den = den.scale(Fraction(ratio.denominator) / cd)
    return num, den


def ratfun_normalize(num: Poly, den: Poly) -> RatFun:
    """Canonical form of num/den (raises ZeroDivisionError on a zero denominator)."""
    return RatFun(num, den)


def eps_valuation(p: Poly) -> int:
    """Lowest power of eps dividing ``p`` (p must be nonzero)."""
    i = p.ctx.variable_to_index("eps")
    return int(min(m[i] for m in p.raw.monoms()))


# ---------------------------------------------------------------------------
# truncated series


class Series:
    """Power series in z truncated at ``order`` (inclusive), coefficients in Q(eps)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        coeffs = tuple(c if isinstance(c, RatFun) else RatFun.const(c) for c in coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0 or len(coeffs) != order + 1:
            raise ValueError(f"series of order {order} needs {order + 1} coefficients, got {len(coeffs)}")
        for c in coeffs:
            if c.depends_on("z"):
                raise ValueError(f"series coefficient {c} depends on z")
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def zero(cls, order: int) -> "Series":
        zero = RatFun.const(0)
        return cls([zero] * (order + 1))

    @classmethod
    def from_ratfun_poly(cls, p, order: int) -> "Series":
        """Series of a polynomial in z whose coefficients are rational in eps."""
        if isinstance(p, RatFun):
            inner = p.num.coeff_in("z")
            den = RatFun.from_poly(p.den)
            if "z" in p.den.variables:
                return cls.from_ratfun_poly(p.num, order) * cls.from_ratfun_poly(p.den, order).invert()
            cs = [RatFun.from_poly(c) / den for c in inner]
        else:
            cs = [RatFun.from_poly(c) for c in p.coeff_in("z")]
        cs = cs[: order + 1] + [RatFun.const(0)] * max(0, order + 1 - len(cs))
        return cls(cs)

    def __len__(self):
        return self.order + 1

    def __getitem__(self, m: int) -> RatFun:
        return self.coeffs[m]

    def _pair(self, other: "Series") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "Series") -> "Series":
        n = self._pair(other)
        return Series([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    def __sub__(self, other: "Series") -> "Series":
        n = self._pair(other)
        return Series([a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    def __neg__(self):
        return Series([-c for c in self.coeffs])

    def __mul__(self, other) -> "Series":
        if isinstance(other, Series):
            n = self._pair(other)
            out = []
            for m in range(n + 1):
                acc = RatFun.const(0)
                for i in range(m + 1):
                    a, b = self.coeffs[i], other.coeffs[m - i]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                out.append(acc)
            return Series(out)
        if isinstance(other, Poly):
            other = RatFun.from_poly(other)
        if isinstance(other, RatFun) and "z" in other.variables:
            return self * Series.from_ratfun_poly(other, self.order)
        if isinstance(other, (RatFun, int, Fraction)):
            return Series([c * other for c in self.coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError(f"cannot extend series of order {self.order} to {order}")
        out = Series.__new__(Series)
        out.order, out.coeffs = order, self.coeffs[: order + 1]
        return out

    def invert(self) -> "Series":
        return series_invert(self)

    def theta(self) -> "Series":
        return series_theta(self)

    def derivative(self) -> "Series":
        """d/dz; the result is known one order less."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 series carries no information")
        return Series([c * (m + 1) for m, c in enumerate(self.coeffs[1:])])

    def subs_eps(self, value: Scalar) -> list[Fraction]:
        return [c(eps=value) for c in self.coeffs]

    def partial_sum(self, z: Scalar, eps: Scalar | None = None) -> Fraction | RatFun:
        z = Fraction(z)
        if eps is None:
            total = RatFun.const(0)
            for m, c in enumerate(self.coeffs):
                total = total + c * (z**m)
            return total
        return sum((c(eps=eps) * z**m for m, c in enumerate(self.coeffs)), Fraction(0))

    def is_zero(self, through: int | None = None) -> bool:
        through = self.order if through is None else through
        return all(c.is_zero() for c in self.coeffs[: through + 1])

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        return f"Series([{', '.join(str(c) for c in self.coeffs)}], order={self.order})"


def series_invert(s: Series) -> Series:
    """Multiplicative inverse modulo z**(order+1)."""
    c0 = s[0]
    if c0.is_zero():
        raise ZeroDivisionError("series not invertible")
    inv0 = c0.inverse()
    out = [inv0]
    for m in range(1, s.order + 1):
        acc = RatFun.const(0)
        for i in range(1, m + 1):
            if not s[i].is_zero():
                acc = acc + s[i] * out[m - i]
        out.append(-acc * inv0)
    return Series(out)


def series_theta(s: Series) -> Series:
    return Series([c * m for m, c in enumerate(s.coeffs)])


def poly_times_series(p: Poly, s: Series) -> Series:
    """Product of a polynomial in (z, eps) with a series, same truncation order."""
    parts = [RatFun.from_poly(c) for c in p.coeff_in("z")]
    out = []
    for m in range(s.order + 1):
        acc = RatFun.const(0)
        for j, pj in enumerate(parts[: m + 1]):
            if pj.is_zero() or s[m - j].is_zero():
                continue
            acc = acc + pj * s[m - j]
        out.append(acc)
    return Series(out)


def sum_ratfuns(items: Iterable[RatFun]) -> RatFun:
    total = RatFun.const(0)
    for it in items:
        total = total + it
    return total
