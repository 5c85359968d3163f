"""Laurent expansion in eps of truncated pFq series, regrouped by powers of eps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Poly, RatFun, Series, eps_valuation
from .horn import PFQSpec, truncated_series


def _eps_coeffs(p: Poly) -> list[Fraction]:
    return [c.constant_value() if not c.is_zero() else Fraction(0) for c in p.coeff_in("eps")]


def laurent_coefficients(r: RatFun, K: int) -> tuple[int, list[Fraction]]:
    """(v, [c_v, c_{v+1}, ..., c_K]) with r = sum_k c_k eps^k + O(eps^{K+1}).

    ``r`` must depend on eps only. When K < v the list is empty.
    """
    if "z" in r.variables:
        raise ValueError(f"{r} depends on z")
    if r.is_zero():
        return K + 1, []
    vn = eps_valuation(r.num)
    vd = eps_valuation(r.den)
    v = int(vn - vd)
    n = _eps_coeffs(r.num)[vn:]
    d = _eps_coeffs(r.den)[vd:]
    length = K - v + 1
    out: list[Fraction] = []
    inv0 = 1 / d[0]
    for i in range(max(0, length)):
        acc = n[i] if i < len(n) else Fraction(0)
        for j in range(1, min(i, len(d) - 1) + 1):
            acc -= d[j] * out[i - j]
        out.append(acc * inv0)
    return v, out


@dataclass(frozen=True)
class EpsLaurent:
    """sum_k eps^k * coeff_series[k](z), k from min_order to the requested K."""

    min_order: int
    coeff_series: dict
    z_order: int

    def __getitem__(self, k: int) -> Series:
        return self.coeff_series[k]

    def evaluate(self, z: float, eps: float) -> complex:
        total = 0j
        for k, s in self.coeff_series.items():
            val = sum(complex(c.constant_value()) * z**m for m, c in enumerate(s.coeffs))
            total += val * eps**k
        return total

    def to_json(self) -> dict:
        return {str(k): [str(c) for c in s.coeffs] for k, s in sorted(self.coeff_series.items())}


def laurent_expand(f: PFQSpec, K: int, N: int) -> EpsLaurent:
    series = truncated_series(f, N)
    expansions = [laurent_coefficients(c, K) for c in series.coeffs]
    min_order = int(min(v for v, _ in expansions))
    table = {}
    for k in range(min_order, K + 1):
        col = []
        for v, cs in expansions:
            i = k - v
            col.append(cs[i] if 0 <= i < len(cs) else Fraction(0))
        table[k] = Series(col)
    return EpsLaurent(min_order, table, N)


def pole_order(f: PFQSpec, N: int = 20) -> int:
    """Highest eps pole among the first N+1 series coefficients.

    With parameters linear in eps, each Pochhammer (b)_m contributes an eps
    pole only through a factor vanishing at eps = 0, i.e. b + i = s*eps for
    some i; every such factor appears from m = i+1 onwards, and i <= -b_0
    is bounded by the constant part of b. So poles saturate once N exceeds
    the largest |const part| of a lower parameter; the default N is an
    examined-coefficient statement.
    """
    series = truncated_series(f, N)
    worst = 0
    for c in series.coeffs:
        if c.is_zero():
            continue
        worst = max(worst, eps_valuation(c.den) - eps_valuation(c.num))
    return int(worst)
