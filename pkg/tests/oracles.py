"""Independent reference computations for the test-suite.

Nothing here imports the package's linear algebra: series coefficients are
recomputed with plain Fractions (or modulo a prime) and relations are
checked with schoolbook convolution.
"""

from __future__ import annotations

import random
from fractions import Fraction

from hornred.horn import LinearParam, PFQSpec

PRIME = (1 << 61) - 1


# ---------------------------------------------------------------------------
# random specs


def _rand_param(rng: random.Random) -> LinearParam:
    den = rng.randint(2, 10)
    while True:
        num = rng.randint(-3 * den, 3 * den)
        if num % den:
            break
    return LinearParam(Fraction(num, den), rng.randint(-2, 2))


def non_degenerate(f: PFQSpec) -> bool:
    for a in f.upper:
        for b in f.lower:
            if (a - b).is_integer():
                return False
    return True


def random_spec(rng: random.Random, p: int | None = None) -> PFQSpec:
    """Random 2F1 or 3F2 with non-integer constants and no integer a_i - b_j."""
    if p is None:
        p = rng.choice((2, 3))
    while True:
        f = PFQSpec(tuple(_rand_param(rng) for _ in range(p)), tuple(_rand_param(rng) for _ in range(p - 1)))
        if non_degenerate(f):
            return f


def random_specs(n: int, seed: int) -> list[PFQSpec]:
    rng = random.Random(seed)
    return [random_spec(rng) for _ in range(n)]


# ---------------------------------------------------------------------------
# Fraction series at a numeric eps


def series_at(f: PFQSpec, eps: Fraction, n: int) -> list[Fraction]:
    ups = [a.at(eps) for a in f.upper]
    los = [b.at(eps) for b in f.lower]
    out = [Fraction(1)]
    for m in range(n - 1):
        c = out[-1]
        for a in ups:
            c *= a + m
        for b in los:
            c /= b + m
        out.append(c / (m + 1))
    return out


# ---------------------------------------------------------------------------
# mod-p dependence oracle


def _inv(x: int) -> int:
    return pow(x % PRIME, PRIME - 2, PRIME)


def _frac_mod(x: Fraction) -> int:
    return x.numerator % PRIME * _inv(x.denominator) % PRIME


def series_mod(f: PFQSpec, eps_mod: int, n: int) -> list[int]:
    def val(p: LinearParam) -> int:
        return (_frac_mod(p.const) + _frac_mod(p.slope) * eps_mod) % PRIME

    ups = [val(a) for a in f.upper]
    los = [val(b) for b in f.lower]
    out = [1]
    for m in range(n - 1):
        num = out[-1]
        for a in ups:
            num = num * (a + m) % PRIME
        den = m + 1
        for b in los:
            den = den * (b + m) % PRIME
        out.append(num * _inv(den) % PRIME)
    return out


def _deriv(s: list[int]) -> list[int]:
    return [c * (i + 1) % PRIME for i, c in enumerate(s[1:])]


def _rank_mod(rows: list[list[int]], ncols: int) -> int:
    rows = [r[:] for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = _inv(rows[rank][col])
        rows[rank] = [x * inv % PRIME for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                t = rows[i][col]
                rows[i] = [(x - t * y) % PRIME for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _has_relation(series: list[list[int]], degree: int) -> bool:
    """Do polynomials of degree <= ``degree``, not all zero, annihilate sum p_k s_k?"""
    known = min(len(s) for s in series)
    ncols = len(series) * (degree + 1)
    rows = []
    for n in range(known):
        row = []
        for s in series:
            row.extend(s[n - j] if n >= j else 0 for j in range(degree + 1))
        rows.append(row)
    return _rank_mod(rows, ncols) < ncols


def _rational_mod(s: list[int], degree: int) -> bool:
    """Q*s is a polynomial of degree <= ``degree`` for some nonzero Q of degree <= ``degree``."""
    rows = [[s[n - j] if n >= j else 0 for j in range(degree + 1)] for n in range(degree + 1, len(s))]
    return _rank_mod(rows, degree + 1) < degree + 1


def oracle_rank(f: PFQSpec, n_terms: int = 80, max_degree: int = 16, eps_mod: int = 987654321) -> tuple[int, bool]:
    """(rank of span{F, F', ...}, F rational) from an 80-term series mod p."""
    s = series_mod(f, eps_mod, n_terms)
    rational = _rational_mod(s, min(max_degree, (n_terms - 4) // 2 - 1))
    derivs = [s]
    for d in range(1, f.q + 2):
        derivs.append(_deriv(derivs[-1]))
        D = min(max_degree, (n_terms - d - 4) // (d + 1) - 1)
        if _has_relation(derivs, D):
            return d, rational
    raise AssertionError(f"no relation up to order {f.q + 1} for {f}")


# ---------------------------------------------------------------------------
# relation check with plain Fractions


def relation_residual(R, P, target: PFQSpec, base: PFQSpec, eps: Fraction, order: int) -> list[Fraction]:
    """Coefficients 0..order of R*S(target) - sum_k P_k S(base)^(k), at a numeric eps.

    R and P are package Polys; they are read term by term, evaluated at
    eps, and convolved here.
    """

    def zcoeffs(poly) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (i, j), c in poly.terms().items():
            out[i] = out.get(i, Fraction(0)) + c * eps**j
        return out

    L = len(P) - 1
    st = series_at(target, eps, order + 1)
    sb = series_at(base, eps, order + L + 1)
    res = [Fraction(0)] * (order + 1)
    for i, c in zcoeffs(R).items():
        for n in range(i, order + 1):
            res[n] += c * st[n - i]
    deriv = sb
    for k, pk in enumerate(P):
        if k:
            deriv = [c * (m + 1) for m, c in enumerate(deriv[1:])]
        for i, c in zcoeffs(pk).items():
            for n in range(i, order + 1):
                res[n] -= c * deriv[n - i]
    return res
