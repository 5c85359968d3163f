"""Series-based search for polynomial-coefficient linear relations.

Everything here works on exact rational coefficient lists at a fixed
numerical value of eps, so linear algebra runs over Q with FLINT matrices.
Any relation found on the search window is re-checked on a longer series
before it is believed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from flint import fmpq, fmpq_mat

from .algebra import to_fmpq
from .horn import PFQSpec

#: eps values used when a spec depends on eps. Their denominators (11, 13)
#: cannot produce integer parameter relations from data with small denominators.
SPECIALISATIONS = (Fraction(3, 11), Fraction(-2, 13))


def rational_coefficients(f: PFQSpec, eps: Fraction, n: int) -> list[fmpq]:
    """First ``n`` Taylor coefficients of ``f`` at the given eps."""
    ups = [to_fmpq(a.at(eps)) for a in f.upper]
    los = [to_fmpq(b.at(eps)) for b in f.lower]
    out = [fmpq(1)]
    c = fmpq(1)
    for m in range(n - 1):
        if c != 0:
            num = fmpq(1)
            for a in ups:
                num *= a + m
            den = fmpq(m + 1)
            for b in los:
                den *= b + m
            c = c * num / den
        out.append(c)
    return out


def derivative_coefficients(s: Sequence[fmpq], k: int) -> list[fmpq]:
    out = list(s)
    for _ in range(k):
        out = [c * (i + 1) for i, c in enumerate(out[1:])]
    return out


def _nullspace(rows: list[list[fmpq]], ncols: int) -> list[list[fmpq]]:
    if not rows:
        return [[fmpq(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m = fmpq_mat(len(rows), ncols, [x for r in rows for x in r])
    num, _ = m.numer_denom()
    basis, nullity = num.nullspace()
    return [[fmpq(basis[i, j]) for i in range(ncols)] for j in range(nullity)]


def find_relations(series: Sequence[Sequence[fmpq]], degree: int) -> list[list[list[fmpq]]]:
    """Polynomials p_k (deg <= degree) with sum_k p_k * s_k = 0 on the known window.

    Returns a basis of the solution space; each element is a list of
    coefficient lists, one per input series.
    """
    known = min(len(s) for s in series)
    ncols = len(series) * (degree + 1)
    rows = []
    for n in range(known):
        row = []
        for s in series:
            row.extend(s[n - j] if n - j >= 0 else fmpq(0) for j in range(degree + 1))
        rows.append(row)
    sols = _nullspace(rows, ncols)
    out = []
    for v in sols:
        out.append([v[k * (degree + 1) : (k + 1) * (degree + 1)] for k in range(len(series))])
    return out


def relation_holds(series: Sequence[Sequence[fmpq]], polys: Sequence[Sequence[fmpq]]) -> bool:
    known = min(len(s) for s in series)
    for n in range(known):
        acc = fmpq(0)
        for s, p in zip(series, polys):
            for j, pj in enumerate(p):
                if pj != 0 and n - j >= 0:
                    acc += pj * s[n - j]
        if acc != 0:
            return False
    return True


def _max_degree_for(n_eq: int, n_series: int, cap: int) -> int:
    # keep the system overdetermined by a margin of 4 equations
    return max(0, min(cap, (n_eq - 4) // n_series - 1))


@dataclass(frozen=True)
class SeriesRank:
    rank: int
    rational: bool
    relation_degree: int


def series_rank_at(coeffs: Sequence[fmpq], n_terms: int, max_degree: int, max_order: int) -> SeriesRank:
    """Smallest d with F, F', ..., F^(d) dependent; coefficients beyond n_terms verify."""
    long = list(coeffs)
    short = long[:n_terms]
    nonzero = [i for i, c in enumerate(long) if c != 0]
    if nonzero[-1] < len(long) - 20:
        # visibly a polynomial: F'/F is rational
        return SeriesRank(1, True, 0)
    rational = _is_rational(short, long, max_degree)
    for d in range(1, max_order + 1):
        window = [derivative_coefficients(short, k) for k in range(d + 1)]
        D = _max_degree_for(n_terms - d, d + 1, max_degree)
        check = [derivative_coefficients(long, k) for k in range(d + 1)]
        for rel in find_relations(window, D):
            if relation_holds(check, rel):
                return SeriesRank(d, rational, D)
    raise ArithmeticError(f"no relation of order <= {max_order} with degree <= {max_degree} found")


def _is_rational(short, long, max_degree) -> bool:
    D = min(max_degree, (len(short) - 4) // 2 - 1)
    # Q*F has no terms above degree D
    cols = D + 1
    rows = [[short[n - j] if n - j >= 0 else fmpq(0) for j in range(cols)] for n in range(D + 1, len(short))]
    for q in _nullspace(rows, cols):
        ok = True
        for n in range(D + 1, len(long)):
            acc = sum((q[j] * long[n - j] for j in range(cols) if q[j] != 0), fmpq(0))
            if acc != 0:
                ok = False
                break
        if ok:
            return True
    return False


def series_rank(f: PFQSpec, n_terms: int = 80, max_degree: int = 16, verify_terms: int = 120) -> SeriesRank:
    """Rank of span{F, F', ...} estimated at generic eps specialisations.

    The rank can only drop under specialisation, so the maximum over the
    eps values is reported; F counts as rational only if it is rational at
    every specialisation.
    """
    points = SPECIALISATIONS if f.has_eps() else (Fraction(0),)
    results = []
    for eps in points:
        coeffs = rational_coefficients(f, eps, verify_terms)
        results.append(series_rank_at(coeffs, n_terms, max_degree, max(f.p, f.q + 1)))
    best = max(results, key=lambda r: r.rank)
    return SeriesRank(best.rank, all(r.rational for r in results), best.relation_degree)
