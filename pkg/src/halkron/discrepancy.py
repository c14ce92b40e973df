"""Exact star discrepancy in one and two dimensions, brute-force oracles,
and growth-exponent fitting.

The sup over anchored boxes is realized as a max over corner candidates
taken from the point coordinates and 1: closed counting captures the
overshoot limits (boxes shrinking onto a corner from above), open counting
captures the undershoot side.  The 2D routine scans all candidate rows in
floating point, then re-evaluates every near-maximal candidate in exact
rational arithmetic, so the returned value is exact while the scan stays
O(N^2) in vectorized work.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numtheory import UnitFraction
from .sequences import PerturbSpec, PointSet2, generate_point_set

# float terms are accurate to a few ulp; anything this close to the float
# maximum gets re-checked exactly
_CONFIRM_MARGIN = 1e-9


class GuardError(ValueError):
    """Raised when a scan would exceed the configured size guard."""


@dataclass(frozen=True)
class BoxSide:
    """One coordinate of a witness corner; closed means the counting that
    attains the supremum includes points sitting exactly on the corner."""

    coord: Fraction
    closed: bool


@dataclass(frozen=True)
class DiscrepancyResult:
    n_points: int
    d_star: Fraction
    witness_box: tuple[BoxSide, ...]

    @property
    def value(self) -> float:
        return float(self.d_star)


def star_discrepancy_1d(xs: Sequence[UnitFraction]) -> DiscrepancyResult:
    """Order-statistics formula max_i max(i/N - x_(i), x_(i) - (i-1)/N)."""
    n = len(xs)
    if n == 0:
        raise ValueError("empty point set")
    vals = sorted(x.as_fraction() for x in xs)
    best = Fraction(-1)
    witness = None
    for i, x in enumerate(vals, start=1):
        pos = Fraction(i, n) - x
        neg = x - Fraction(i - 1, n)
        if pos > best:
            best, witness = pos, (BoxSide(x, True),)
        if neg > best:
            best, witness = neg, (BoxSide(x, False),)
    return DiscrepancyResult(n, best, witness)


def _scan_rows(
    n: int,
    xs_f: np.ndarray,
    ys_f: np.ndarray,
    y_rank_sorted: np.ndarray,
    x_bounds: np.ndarray,
    threshold: float | None,
):
    """One sweep over the distinct x candidates in increasing order.

    Returns the float maximum; when ``threshold`` is given also returns every
    candidate corner (mode, x_float, y_float) whose term reaches it.
    """
    qy = len(ys_f)
    ys_ext = np.append(ys_f, 1.0)
    cnt = np.zeros(qy, dtype=np.int64)
    included = 0
    best = -math.inf
    cands: list[tuple[bool, float, float]] = []
    lt_ext = np.empty(qy + 1)

    def neg_row(x: float) -> None:
        nonlocal best
        cums = np.cumsum(cnt)
        lt_ext[:qy] = cums - cnt
        lt_ext[qy] = included
        terms = x * ys_ext - lt_ext / n
        m = float(terms.max())
        if m > best:
            best = m
        if threshold is not None:
            for t in np.nonzero(terms >= threshold)[0]:
                cands.append((False, x, float(ys_ext[t])))

    for ix, x in enumerate(xs_f):
        neg_row(float(x))
        lo, hi = x_bounds[ix], x_bounds[ix + 1]
        np.add.at(cnt, y_rank_sorted[lo:hi], 1)
        included += hi - lo
        cums = np.cumsum(cnt)
        terms = cums / n - float(x) * ys_f
        m = float(terms.max())
        if m > best:
            best = m
        if threshold is not None:
            for t in np.nonzero(terms >= threshold)[0]:
                cands.append((True, float(x), float(ys_f[t])))
    neg_row(1.0)
    return best, cands


def star_discrepancy_2d(ps: PointSet2) -> DiscrepancyResult:
    """Exact supremum over anchored boxes; float pre-scan plus exact rational
    confirmation of every near-maximal corner."""
    n = len(ps)
    if n == 0:
        raise ValueError("empty point set")
    q = 1 << ps.width
    xf, yf = ps.floats()
    xs_f = np.unique(xf)
    ys_f = np.unique(yf)
    order = np.argsort(xf, kind="stable")
    y_rank_sorted = np.searchsorted(ys_f, yf[order])
    x_rank_sorted = np.searchsorted(xs_f, xf[order])
    # start offset of each distinct x among the sorted points
    x_bounds = np.searchsorted(x_rank_sorted, np.arange(len(xs_f) + 1))

    fmax, _ = _scan_rows(n, xs_f, ys_f, y_rank_sorted, x_bounds, None)
    _, cands = _scan_rows(n, xs_f, ys_f, y_rank_sorted, x_bounds, fmax - _CONFIRM_MARGIN)

    # float value -> exact numerators over q (several exact values can share
    # a float, and the artificial corner at 1 shares the bucket of any
    # coordinate that rounds to 1.0)
    bx: dict[float, set[int]] = defaultdict(set)
    by: dict[float, set[int]] = defaultdict(set)
    for v in set(ps.x_bits):
        bx[v / q].add(v)
    for v in set(ps.y_bits):
        by[v / q].add(v)
    bx[1.0].add(q)
    by[1.0].add(q)

    exact_cands: set[tuple[bool, int, int]] = set()
    for closed, xfv, yfv in cands:
        for xnum in bx[xfv]:
            for ynum in by[yfv]:
                exact_cands.add((closed, xnum, ynum))

    xb = ps.x_bits
    yb = ps.y_bits
    best: Fraction | None = None
    witness: tuple[BoxSide, ...] = ()
    for closed, xnum, ynum in sorted(exact_cands):
        if closed:
            c = sum(1 for a, b in zip(xb, yb) if a <= xnum and b <= ynum)
            term = Fraction(c, n) - Fraction(xnum * ynum, q * q)
        else:
            c = sum(1 for a, b in zip(xb, yb) if a < xnum and b < ynum)
            term = Fraction(xnum * ynum, q * q) - Fraction(c, n)
        if best is None or term > best:
            best = term
            witness = (
                BoxSide(Fraction(xnum, q), closed),
                BoxSide(Fraction(ynum, q), closed),
            )
    return DiscrepancyResult(n, best, witness)


def brute_force_discrepancy_points(ps: PointSet2) -> Fraction:
    """Independent oracle: full enumeration of corners over the point
    coordinates and 1, both counting modes, everything in exact rationals."""
    n = len(ps)
    if n == 0:
        raise ValueError("empty point set")
    q = 1 << ps.width
    xs_u = sorted(set(ps.x_bits))
    ys_u = sorted(set(ps.y_bits))
    rx = {v: i for i, v in enumerate(xs_u)}
    ry = {v: i for i, v in enumerate(ys_u)}
    p_, q_ = len(xs_u), len(ys_u)
    cnt = np.zeros((p_, q_), dtype=np.int64)
    for a, b in zip(ps.x_bits, ps.y_bits):
        cnt[rx[a], ry[b]] += 1
    cum = np.zeros((p_ + 1, q_ + 1), dtype=np.int64)
    cum[1:, 1:] = cnt.cumsum(axis=0).cumsum(axis=1)

    best = Fraction(0)
    for a in range(p_ + 1):
        xnum = xs_u[a] if a < p_ else q
        le_a = a + 1 if a < p_ else p_
        lt_a = a if a < p_ else p_
        for b in range(q_ + 1):
            ynum = ys_u[b] if b < q_ else q
            le_b = b + 1 if b < q_ else q_
            lt_b = b if b < q_ else q_
            vol = Fraction(xnum * ynum, q * q)
            t1 = abs(Fraction(int(cum[le_a, le_b]), n) - vol)
            t2 = abs(vol - Fraction(int(cum[lt_a, lt_b]), n))
            if t1 > best:
                best = t1
            if t2 > best:
                best = t2
    return best


def brute_force_discrepancy_2d(ps: PointSet2, grid: int) -> float:
    """Max over the (grid+1)^2 uniform corners of |A/N - area| with both
    strict and non-strict counting; a lower bound converging to the exact
    value, computed with exact corner comparisons."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    n = len(ps)
    if n == 0:
        raise ValueError("empty point set")
    q = 1 << ps.width
    g = grid
    # smallest corner index strictly above / at-or-above each coordinate
    hist_lt = np.zeros((g + 1, g + 1), dtype=np.int64)
    hist_le = np.zeros((g + 1, g + 1), dtype=np.int64)
    for a, b in zip(ps.x_bits, ps.y_bits):
        ax, ay = a * g // q + 1, b * g // q + 1
        bxi, byi = -(-a * g // q), -(-b * g // q)  # ceil
        if ax <= g and ay <= g:
            hist_lt[ax, ay] += 1
        if bxi <= g and byi <= g:
            hist_le[bxi, byi] += 1
    cum_lt = hist_lt.cumsum(axis=0).cumsum(axis=1)
    cum_le = hist_le.cumsum(axis=0).cumsum(axis=1)
    idx = np.arange(g + 1, dtype=float)
    vol = np.outer(idx, idx) / (g * g)
    d = np.abs(cum_le / n - vol)
    d = np.maximum(d, np.abs(vol - cum_lt / n))
    return float(d.max())


@dataclass(frozen=True)
class GrowthRecord:
    """(N, N*D*) samples along N = 2^{nL} with the fitted log-log slope."""

    n: int
    samples: tuple[tuple[int, int, float], ...]  # (L, N, N*D*_N)
    fitted_exponent: float | None
    residual: float | None
    reference_exponent: float


def growth_scan(
    spec: PerturbSpec,
    alpha: UnitFraction,
    exponents: Sequence[int],
    guard: int = 1 << 16,
    force: bool = False,
) -> GrowthRecord:
    """N*D*_N at N = 2^{nL} for each L, with an unweighted least-squares fit
    of log(N*D*) against log N.  The underlying bounds only control the
    limsup rate, so the fit is reported with its residual, never asserted."""
    from .trigprod import a_exponent

    if not exponents:
        raise ValueError("need at least one L value")
    n = spec.period
    for ell in exponents:
        if ell < 1:
            raise ValueError("L values must be >= 1")
        if (1 << (n * ell)) > guard and not force:
            raise GuardError(f"N = 2^{n * ell} exceeds the guard {guard}")
    samples = []
    for ell in sorted(exponents):
        big_n = 1 << (n * ell)
        ps = generate_point_set(spec, alpha, big_n)
        res = star_discrepancy_2d(ps)
        samples.append((ell, big_n, float(big_n * res.d_star)))
    if len(samples) >= 2:
        logs_n = np.log([s[1] for s in samples])
        logs_d = np.log([s[2] for s in samples])
        slope, intercept = np.polyfit(logs_n, logs_d, 1)
        resid = float(np.max(np.abs(logs_d - (slope * logs_n + intercept))))
        fitted: float | None = float(slope)
    else:
        fitted, resid = None, None
    return GrowthRecord(n, tuple(samples), fitted, resid, a_exponent(n))
