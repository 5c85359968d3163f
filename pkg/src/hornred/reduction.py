"""Differential reduction of one-variable pFq functions.

A shifted function H = pFq(a+m; b+n; z) is rewritten as

    R(z) H = sum_k P_k(z) d^k/dz^k F,   F = pFq(a; b; z),  k <= q,

with polynomial R, P_k in (z, eps). Internally everything lives in the
theta-module of a common "ancestor" function K from which both F and H are
reached by the elementary raising operators

    (theta + a_j) K = a_j K(a_j + 1),   (theta + b_k - 1) K = (b_k - 1) K(b_k - 1),

so F and H are constant-coefficient polynomials in theta applied to K. The
vectors theta^i F (i <= q) are then expressed in the theta-basis of K using
K's differential equation, and one linear solve over Q(z, eps) writes H in
terms of F's derivatives. Every result is certified on exact series.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from functools import reduce as _fold
from typing import Sequence

from .algebra import Poly, RatFun, Series, poly_times_series
from .horn import LinearParam, PFQSpec, PoleError, truncated_series
from .relations import series_rank


class ReductionError(ValueError):
    """The requested relation cannot be built (degenerate parameters or path)."""


class BudgetExceeded(RuntimeError):
    pass


class CertificationError(AssertionError):
    """A computed relation failed its series check; indicates a bug."""


class BasisInconsistency(AssertionError):
    """Degeneracy scan and series oracle disagree on the rank."""


# ---------------------------------------------------------------------------
# operators


def _z() -> RatFun:
    return RatFun.var("z")


def theta_product(shifts: Sequence[LinearParam]) -> list[RatFun]:
    """Coefficients (in powers of theta) of prod (theta + s)."""
    coeffs = [RatFun.const(1)]
    for s in shifts:
        sr = s.ratfun()
        new = [RatFun.const(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] + sr * c
        coeffs = new
    return coeffs


def _stirling2(n: int) -> list[list[int]]:
    S = [[0] * (n + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for i in range(1, n + 1):
        for k in range(1, i + 1):
            S[i][k] = k * S[i - 1][k] + S[i - 1][k - 1]
    return S


def theta_to_d(theta_coeffs: Sequence[RatFun]) -> list[RatFun]:
    """sum c_i theta^i  ->  sum s_k d^k/dz^k, using theta^i = sum S(i,k) z^k D^k."""
    n = len(theta_coeffs) - 1
    S = _stirling2(n)
    z = _z()
    out = []
    for k in range(n + 1):
        acc = RatFun.const(0)
        for i in range(k, n + 1):
            if S[i][k] and not theta_coeffs[i].is_zero():
                acc = acc + theta_coeffs[i] * S[i][k]
        out.append(acc * z**k)
    return out


@dataclass(frozen=True)
class DiffOperator:
    """sum_k coeffs[k] * d^k/dz^k with coefficients in Q(z, eps)."""

    coeffs: tuple[RatFun, ...]

    def __post_init__(self):
        cs = list(self.coeffs)
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        if cs[-1].is_zero():
            raise ValueError("zero operator")
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def apply(self, s: Series) -> Series:
        """Apply to a truncated series; result known through s.order - order."""
        n = s.order - self.order
        if n < 0:
            raise ValueError("series too short for this operator")
        total = Series.zero(n)
        deriv = s
        for k, c in enumerate(self.coeffs):
            if k:
                deriv = deriv.derivative()
            if not c.is_polynomial():
                raise ValueError("apply() needs polynomial coefficients")
            total = total + poly_times_series(c.as_poly(), deriv.truncate(n))
        return total

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            d = "w" if k == 0 else ("w'" if k == 1 else ("w''" if k == 2 else f"w^({k})"))
            parts.append(f"({c})*{d}")
        return " + ".join(parts)


def _primitive_polys(polys: Sequence[Poly], sign_ref: int = 0) -> list[Poly]:
    """Scale a tuple of polynomials to integer, jointly primitive form."""
    coeffs = [c for p in polys for c in p.terms().values()]
    if not coeffs:
        return list(polys)
    num = _fold(gcd, (c.numerator for c in coeffs))
    den = _fold(lcm, (c.denominator for c in coeffs))
    scale = Fraction(den, abs(num))
    ref = polys[sign_ref]
    if not ref.is_zero() and ref.leading_coefficient() < 0:
        scale = -scale
    return [p.scale(scale) for p in polys]


def hypergeometric_ode(f: PFQSpec) -> DiffOperator:
    """theta*prod(theta+b_k-1) - z*prod(theta+a_j), in d/dz form with coprime polynomial coefficients."""
    B = [RatFun.const(0)] + theta_product([b - 1 for b in f.lower])
    A = theta_product(f.upper)
    n = max(len(A), len(B))
    z = _z()
    L = []
    for i in range(n):
        bi = B[i] if i < len(B) else RatFun.const(0)
        ai = A[i] if i < len(A) else RatFun.const(0)
        L.append(bi - z * ai)
    d = theta_to_d(L)
    polys = [c.as_poly() for c in d]
    g = None
    for p in polys:
        if not p.is_zero():
            g = p if g is None else g.gcd(p)
    polys = [p.exact_div(g) if not p.is_zero() else p for p in polys]
    polys = _primitive_polys(polys, sign_ref=len(polys) - 1)
    return DiffOperator(tuple(RatFun.from_poly(p) for p in polys))


# ---------------------------------------------------------------------------
# theta-module of a pFq


class ThetaModule:
    """Q(z, eps)-span of {F, theta F, ..., theta^q F} modulo the pFq equation."""

    def __init__(self, f: PFQSpec, budget: list | None = None):
        if f.p > f.q + 1:
            raise ReductionError(f"{f}: reduction needs p <= q+1")
        self.f = f
        self.dim = f.q + 1
        self._budget = budget
        B = [RatFun.const(0)] + theta_product([b - 1 for b in f.lower])
        A = theta_product(f.upper)
        z = _z()
        L = []
        for i in range(self.dim + 1):
            ai = A[i] if i < len(A) else RatFun.const(0)
            L.append(B[i] - z * ai)
        lead = L[self.dim]
        self.top = [-(c / lead) for c in L[: self.dim]]

    def unit(self) -> list[RatFun]:
        return [RatFun.const(1)] + [RatFun.const(0)] * (self.dim - 1)

    def _tick(self):
        if self._budget is not None:
            self._budget[0] -= 1
            if self._budget[0] < 0:
                raise BudgetExceeded("reduction step budget exhausted")

    def theta(self, v: Sequence[RatFun]) -> list[RatFun]:
        self._tick()
        out = [c.theta() for c in v]
        for i in range(1, self.dim):
            out[i] = out[i] + v[i - 1]
        carry = v[self.dim - 1]
        if not carry.is_zero():
            out = [o + carry * t for o, t in zip(out, self.top)]
        return out

    def derivative(self, v: Sequence[RatFun]) -> list[RatFun]:
        zinv = _z().inverse()
        return [c * zinv for c in self.theta(v)]

    def apply_theta_poly(self, coeffs: Sequence[RatFun], v: Sequence[RatFun]) -> list[RatFun]:
        acc = [RatFun.const(0)] * self.dim
        power = list(v)
        for i, c in enumerate(coeffs):
            if i:
                power = self.theta(power)
            if not c.is_zero():
                acc = [a + c * p for a, p in zip(acc, power)]
        return acc


def _solve(columns: list[list[RatFun]], rhs: list[RatFun]) -> list[RatFun] | None:
    """Solve sum_i x_i * columns[i] = rhs over Q(z, eps); None if singular."""
    n = len(columns)
    M = [[columns[j][i] for j in range(n)] + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                fac = M[r][col]
                M[r] = [a - fac * b for a, b in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class ReductionResult:
    """R * target = sum_k P_k * d^k/dz^k base."""

    prefactor_R: Poly
    pcoeffs: tuple[Poly, ...]
    verified_order: int = 0
    base: PFQSpec | None = field(default=None, compare=False)
    target: PFQSpec | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {"R": str(self.prefactor_R), "P": [str(p) for p in self.pcoeffs], "verified_order": self.verified_order}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def residual(self, order: int) -> Series:
        """R*S(target) - sum P_k S(base)^(k) through ``order``."""
        L = len(self.pcoeffs) - 1
        sb = truncated_series(self.base, order + L)
        st = truncated_series(self.target, order)
        total = poly_times_series(self.prefactor_R, st)
        deriv = sb
        for k, p in enumerate(self.pcoeffs):
            if k:
                deriv = deriv.derivative()
            if not p.is_zero():
                total = total - poly_times_series(p, deriv.truncate(order))
        return total


def _finalize(theta_coeffs: Sequence[RatFun]) -> tuple[Poly, tuple[Poly, ...]]:
    d = theta_to_d(theta_coeffs)
    R = Poly.const(1)
    for c in d:
        if not c.is_zero():
            g = R.gcd(c.den)
            R = R * c.den.exact_div(g)
    P = [(c * RatFun.from_poly(R)).as_poly() for c in d]
    while len(P) > 1 and P[-1].is_zero():
        P.pop()
    g = R
    for p in P:
        if not p.is_zero():
            g = g.gcd(p)
    R = R.exact_div(g)
    P = [p.exact_div(g) for p in P]
    scaled = _primitive_polys([R] + P, sign_ref=0)
    return scaled[0], tuple(scaled[1:])


def certify(result: ReductionResult, order: int) -> ReductionResult:
    res = result.residual(order)
    if not res.is_zero():
        bad = next(m for m, c in enumerate(res.coeffs) if not c.is_zero())
        raise CertificationError(f"relation {result.to_json()} fails at z^{bad}")
    return ReductionResult(result.prefactor_R, result.pcoeffs, order, result.base, result.target)


def _raise_ops(start: PFQSpec, end: PFQSpec) -> tuple[list[LinearParam], Fraction | RatFun, str | None]:
    """Theta-factors leading from ``start`` to ``end`` by cheap steps (raise upper, lower lower)."""
    factors: list[LinearParam] = []
    norm = RatFun.const(1)
    for j, (a0, a1) in enumerate(zip(start.upper, end.upper)):
        steps = int((a1 - a0).const)
        for t in range(steps):
            alpha = a0 + t
            if alpha.is_zero():
                return [], norm, f"raising a{j + 1} through 0"
            factors.append(alpha)
            norm = norm * alpha.ratfun()
    for k, (b0, b1) in enumerate(zip(start.lower, end.lower)):
        steps = int((b0 - b1).const)
        for t in range(steps):
            beta = b0 - t
            if (beta - 1).is_zero():
                return [], norm, f"lowering b{k + 1} through 1"
            factors.append(beta - 1)
            norm = norm * (beta - 1).ratfun()
    return factors, norm, None


def reduce(
    f: PFQSpec,
    upper_shifts: Sequence[int],
    lower_shifts: Sequence[int],
    order: int = 50,
    budget: int | None = None,
    max_slack: int = 2,
) -> ReductionResult:
    """Express f shifted by integer vectors through f and its first q derivatives."""
    upper_shifts = [int(m) for m in upper_shifts]
    lower_shifts = [int(n) for n in lower_shifts]
    try:
        target = f.shifted(upper_shifts, lower_shifts)
    except PoleError as exc:
        raise ReductionError(f"shifted function is undefined: {exc}") from None
    if f.p > f.q + 1:
        raise ReductionError(f"{f}: reduction needs p <= q+1")
    if not any(upper_shifts) and not any(lower_shifts):
        result = ReductionResult(Poly.const(1), (Poly.const(1),), 0, f, target)
        return certify(result, order) if order else result

    tick = None if budget is None else [budget]
    blocked = []
    for slack in range(max_slack + 1):
        anc_up = tuple(a + min(0, m) - slack for a, m in zip(f.upper, upper_shifts))
        anc_lo = tuple(b + max(0, n) + slack for b, n in zip(f.lower, lower_shifts))
        try:
            anc = PFQSpec(anc_up, anc_lo)
        except (PoleError, ValueError) as exc:
            blocked.append(f"slack {slack}: ancestor undefined ({exc})")
            continue
        to_f, norm_f, why_f = _raise_ops(anc, f)
        to_h, norm_h, why_h = _raise_ops(anc, target)
        if why_f or why_h:
            blocked.append(f"slack {slack}: {why_f or why_h}")
            continue
        module = ThetaModule(anc, tick)
        cf = [c / norm_f for c in theta_product(to_f)]
        ch = [c / norm_h for c in theta_product(to_h)]
        u = module.apply_theta_poly(cf, module.unit())
        basis = [u]
        for _ in range(1, module.dim):
            basis.append(module.theta(basis[-1]))
        h = module.apply_theta_poly(ch, module.unit())
        coeffs = _solve(basis, h)
        if coeffs is None:
            blocked.append(f"slack {slack}: derivatives of {f} do not span the module of {anc}")
            continue
        R, P = _finalize(coeffs)
        result = ReductionResult(R, P, 0, f, target)
        return certify(result, order) if order else result
    raise ReductionError("no non-degenerate reduction path; blocked: " + "; ".join(blocked))


def step_operator(f: PFQSpec, direction: str, side: str, index: int, order: int = 50) -> ReductionResult:
    """Unit shift of one parameter (index is 0-based)."""
    if direction not in ("up", "down") or side not in ("upper", "lower"):
        raise ValueError("direction must be up|down and side upper|lower")
    params = f.upper if side == "upper" else f.lower
    if not 0 <= index < len(params):
        raise IndexError(f"no {side} parameter with index {index}")
    delta = 1 if direction == "up" else -1
    ups = [0] * f.p
    los = [0] * f.q
    (ups if side == "upper" else los)[index] = delta
    name = f"{'a' if side == 'upper' else 'b'}{index + 1}"
    try:
        target = f.shifted(ups, los)
    except PoleError:
        raise ReductionError(f"shifting {name} = {params[index]} makes the function undefined") from None
    z = Poly.var("z")
    if side == "upper" and direction == "up":
        a = params[index]
        if a.is_zero():
            raise ReductionError(f"{name} = 0: F is constant and cannot be raised")
        R, P = _normalize_pair(a.poly(), [a.poly(), z])
    elif side == "lower" and direction == "down":
        b1 = params[index] - 1
        if b1.is_zero():
            raise ReductionError(f"{name} = 1 cannot be lowered")
        R, P = _normalize_pair(b1.poly(), [b1.poly(), z])
    else:
        return reduce(f, ups, los, order=order)
    result = ReductionResult(R, tuple(P), 0, f, target)
    return certify(result, order) if order else result


def _normalize_pair(R: Poly, P: list[Poly]) -> tuple[Poly, list[Poly]]:
    scaled = _primitive_polys([R] + P, sign_ref=0)
    return scaled[0], scaled[1:]


# ---------------------------------------------------------------------------
# basis counting


@dataclass(frozen=True)
class BasisReport:
    rank: int
    nontrivial_count: int
    degeneracies: tuple[str, ...]
    rational: bool = False

    def to_json(self) -> dict:
        return {"rank": self.rank, "nontrivial_count": self.nontrivial_count, "degeneracies": list(self.degeneracies), "rational": self.rational}


def _max_matching(pairs: list[tuple[int, int]], n_left: int) -> list[tuple[int, int]]:
    adj: dict[int, list[int]] = {}
    for i, j in pairs:
        adj.setdefault(i, []).append(j)
    match_right: dict[int, int] = {}

    def augment(i, seen):
        for j in adj.get(i, []):
            if j in seen:
                continue
            seen.add(j)
            if j not in match_right or augment(match_right[j], seen):
                match_right[j] = i
                return True
        return False

    for i in range(n_left):
        augment(i, set())
    return sorted((i, j) for j, i in match_right.items())


def degeneracy_scan(f: PFQSpec) -> tuple[int, bool, tuple[str, ...]]:
    """Rank and rationality predicted from integer parameter relations alone."""
    notes = []
    pairs = []
    for i, a in enumerate(f.upper):
        for j, b in enumerate(f.lower):
            d = a - b
            if d.is_integer() and d.const >= 0:
                pairs.append((i, j))
                notes.append(f"a{i + 1} - b{j + 1} = {d.const}")
    terminating = [i for i, a in enumerate(f.upper) if a.is_nonpositive_integer()]
    for i in terminating:
        notes.append(f"a{i + 1} = {f.upper[i].const} (terminating)")
    if terminating:
        return 1, True, tuple(notes)
    if f.p > f.q + 1:
        raise ValueError(f"{f} diverges")
    matched = _max_matching(pairs, f.p)
    used_up = {i for i, _ in matched}
    p_left = f.p - len(matched)
    q_left = f.q - len(matched)
    rank = q_left + 1
    rational = False
    if rank == 1 and p_left == 1:
        rest = next(a for i, a in enumerate(f.upper) if i not in used_up)
        rational = rest.is_integer()
    return rank, rational, tuple(notes)


def basis_count(f: PFQSpec) -> BasisReport:
    """Dimension of span{F, F', ...} over Q(z, eps); two independent routes must agree."""
    rank, rational, notes = degeneracy_scan(f)
    oracle = series_rank(f)
    if oracle.rank != rank or oracle.rational != rational:
        raise BasisInconsistency(
            f"degeneracy scan inconsistent with series oracle for {f}: "
            f"scan rank {rank} (rational={rational}), oracle rank {oracle.rank} (rational={oracle.rational})"
        )
    return BasisReport(rank, rank - 1 if rational else rank, notes, rational)
