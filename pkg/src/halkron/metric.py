"""Transfer-operator recurrence for the averaged product kernel, the
mu constant, monotone ratio brackets for the metric exponents, integral
evaluation, and structural checks (symmetry, concavity, monotonicity).

Levels are tabulated on a uniform grid of [0,1] with monotone cubic
interpolation for off-grid children.  Every level is rescaled by its maximum
with the scale tracked in log space; the ratio extrema that produce the
exponent brackets are invariant under that rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import PchipInterpolator

from .sequences import PerturbSpec

_MIN_GRID = 256
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _abs_sin_pi(x: np.ndarray) -> np.ndarray:
    return np.sin(np.pi * np.minimum(x, 1.0 - x))


def _abs_cos_pi(x: np.ndarray) -> np.ndarray:
    return np.sin(np.pi * np.abs(0.5 - x))


@dataclass
class PhiGrid:
    """One level of the recurrence, tabulated on grid_size+1 uniform nodes.

    ``grid`` is normalized to max 1; the true level values are
    ``grid * exp(log_scale)``.  Levels decay geometrically, so deep runs
    would underflow without the split.
    """

    n: int
    level: int
    grid: np.ndarray
    log_scale: float
    _interp: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    @property
    def grid_size(self) -> int:
        return len(self.grid) - 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.grid))

    def interpolator(self) -> PchipInterpolator:
        if self._interp is None:
            self._interp = PchipInterpolator(self.nodes, self.grid)
        return self._interp

    def values(self) -> np.ndarray:
        return self.grid * math.exp(self.log_scale)

    def value_at(self, x: float) -> float:
        g = len(self.grid) - 1
        idx = x * g
        if idx == int(idx):
            v = self.grid[int(idx)]
        else:
            v = float(self.interpolator()(x))
        return float(v) * math.exp(self.log_scale)

    def integral(self) -> float:
        """Simpson integral of the level over [0,1]."""
        return float(simpson(self.grid, dx=1.0 / self.grid_size)) * math.exp(self.log_scale)


def _kernel(n: int, grid_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Branch weights w_k(x) = |sin(pi x)| / (2^n |cos((x+k) pi / 2^n)|) and
    child coordinates (x+k)/2^n on the grid.  The 0/0 points (x=0 with the
    middle branch, x=1 with its mirror) take their finite limit 1."""
    b = 1 << n
    x = np.linspace(0.0, 1.0, grid_size + 1)
    k = np.arange(b, dtype=float)[:, None]
    child = (x[None, :] + k) / b
    num = _abs_sin_pi(x)[None, :]
    den = b * _abs_cos_pi(child)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = num / den
    w = np.where(den == 0.0, 1.0, w)
    return w, child


_LEVEL_CACHE: dict[tuple[int, int], list[PhiGrid]] = {}


def phi_levels(n: int, j_max: int, grid_size: int) -> list[PhiGrid]:
    """Levels 0..j_max of the recurrence, iterated from the constant 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if j_max < 0:
        raise ValueError("level must be >= 0")
    if grid_size < _MIN_GRID or grid_size % 2:
        raise ValueError(f"grid_size must be even and >= {_MIN_GRID}")
    key = (n, grid_size)
    levels = _LEVEL_CACHE.setdefault(
        key, [PhiGrid(n, 0, np.ones(grid_size + 1), 0.0)]
    )
    if j_max < len(levels):
        return levels[: j_max + 1]
    w, child = _kernel(n, grid_size)
    b = 1 << n
    flat_child = child.ravel()
    while len(levels) <= j_max:
        prev = levels[-1]
        childvals = prev.interpolator()(flat_child).reshape(child.shape)
        vals = (w * childvals).sum(axis=0) / b
        s = float(vals.max())
        levels.append(PhiGrid(n, len(levels), vals / s, prev.log_scale + math.log(s)))
    return levels[: j_max + 1]


def phi_level(n: int, j: int, grid_size: int) -> PhiGrid:
    return phi_levels(n, j, grid_size)[j]


def mu(n: int) -> float:
    """mu(n) = 4^-n sum_{k<2^n} |cos((1+2k) pi / 2^(n+1))|^-1; equals the
    first level evaluated at 1/2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = 1 << n
    ks = np.arange(b, dtype=float)
    terms = 1.0 / _abs_cos_pi((1.0 + 2.0 * ks) / (2.0 * b))
    return float(terms.sum()) / (4.0**n)


def _golden_extremum(f, lo: float, hi: float, maximize: bool, iters: int = 60) -> float:
    """Deterministic golden-section search; returns the extremal value."""
    a, d = lo, hi
    b = d - _GOLDEN * (d - a)
    c = a + _GOLDEN * (d - a)
    fb, fc = f(b), f(c)
    sign = 1.0 if maximize else -1.0
    for _ in range(iters):
        if sign * fb >= sign * fc:
            d, c, fc = c, b, fb
            b = d - _GOLDEN * (d - a)
            fb = f(b)
        else:
            a, b, fb = b, c, fc
            c = a + _GOLDEN * (d - a)
            fc = f(c)
    best = max(fb, fc) if maximize else min(fb, fc)
    return best


def _ratio_extrema(prev: PhiGrid, nxt: PhiGrid) -> tuple[float, float]:
    """Extrema of q(x) = Phi_{j+1}(x)/Phi_j(x) over [0,1]: grid extrema plus
    golden-section refinement in the two adjacent cells."""
    scale = math.exp(nxt.log_scale - prev.log_scale)
    ratio = nxt.grid / prev.grid * scale
    g = prev.grid_size
    xs = prev.nodes
    fp = prev.interpolator()
    fn = nxt.interpolator()

    def q(x: float) -> float:
        return scale * float(fn(x)) / float(fp(x))

    imax = int(np.argmax(ratio))
    imin = int(np.argmin(ratio))
    hi = max(
        float(ratio[imax]),
        _golden_extremum(q, xs[max(imax - 1, 0)], xs[min(imax + 1, g)], maximize=True),
    )
    lo = min(
        float(ratio[imin]),
        _golden_extremum(q, xs[max(imin - 1, 0)], xs[min(imin + 1, g)], maximize=False),
    )
    return lo, hi


@dataclass(frozen=True)
class LevelRecord:
    j: int
    ratio_min: float
    ratio_max: float
    exp_lower: float
    exp_upper: float


@dataclass(frozen=True)
class LambdaBracket:
    """Bracket [m_{n,j_max}, M_{n,j_max}] for the metric rates, with the
    exponent transforms 1 + log_{2^n}(.) and the per-level history."""

    n: int
    j_max: int
    lower: float
    upper: float
    exponent_lower: float
    exponent_upper: float
    levels: tuple[LevelRecord, ...]


def _exponent(n: int, value: float) -> float:
    return 1.0 + math.log(value) / (n * math.log(2.0))


def lambda_bracket(n: int, j_max: int, grid_size: int = 1 << 14) -> LambdaBracket:
    """Ratio extrema per level up to j_max; the max sequence is
    non-increasing and the min sequence non-decreasing, so the deepest pair
    brackets both limit rates."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    levels = phi_levels(n, j_max + 1, grid_size)
    records = []
    for j in range(j_max + 1):
        lo, hi = _ratio_extrema(levels[j], levels[j + 1])
        records.append(LevelRecord(j, lo, hi, _exponent(n, lo), _exponent(n, hi)))
    last = records[-1]
    return LambdaBracket(
        n,
        j_max,
        last.ratio_min,
        last.ratio_max,
        last.exp_lower,
        last.exp_upper,
        tuple(records),
    )


# -- integral of the product -------------------------------------------------


@dataclass(frozen=True)
class IntegralPi:
    """int_0^1 Pi_{nL,c} by the two routes: (a) integrating level L of the
    recurrence, (b) direct panel quadrature of the product."""

    n: int
    blocks: int
    by_recurrence: float
    by_direct: float | None

    @property
    def disagreement(self) -> float | None:
        if self.by_direct is None:
            return None
        return abs(self.by_recurrence - self.by_direct)

    @property
    def consistent(self) -> bool | None:
        d = self.disagreement
        return None if d is None else d <= 1e-5


def _pi_direct_quadrature(n: int, blocks: int, qpts: int) -> float:
    """Composite Gauss-Legendre over dyadic panels; panel boundaries contain
    every kink of the |cos| factors up to 2^20 panels."""
    r = n * blocks
    panels = 1 << min(r, 18)
    nodes, weights = np.polynomial.legendre.leggauss(qpts)
    h = 1.0 / panels
    mids = (np.arange(panels, dtype=float) + 0.5) * h
    xs = (mids[:, None] + (0.5 * h) * nodes[None, :]).ravel()
    gamma = PerturbSpec(n).gamma(r)
    prod = np.ones_like(xs)
    for j in range(r):
        t = (xs * float(2**j)) % 1.0
        prod *= _abs_sin_pi(t) if gamma[j] else _abs_cos_pi(t)
    prod = prod.reshape(panels, qpts)
    return float((prod * weights[None, :]).sum() * 0.5 * h)


def integral_pi(n: int, blocks: int, quadrature_points: int = 8, grid_size: int = 1 << 14) -> IntegralPi:
    if n < 1 or blocks < 0:
        raise ValueError("need n >= 1 and blocks >= 0")
    if quadrature_points < 2:
        raise ValueError("quadrature_points must be >= 2")
    r = n * blocks
    if r > 60:
        raise ValueError("n * blocks must stay <= 60 for the recurrence path")
    if blocks == 0:
        return IntegralPi(n, 0, 1.0, 1.0)
    level = phi_level(n, blocks, grid_size)
    by_rec = level.integral()
    by_direct = _pi_direct_quadrature(n, blocks, quadrature_points) if r <= 24 else None
    return IntegralPi(n, blocks, by_rec, by_direct)


# -- structural checks --------------------------------------------------------


@dataclass(frozen=True)
class StructuralReport:
    n: int
    symmetry_ok: bool
    symmetry_max_dev: float
    concavity_ok: bool
    concavity_max_d2: float
    monotonic_ok: bool
    integral_ok: bool
    failures: tuple[str, ...]
    level_records: tuple[LevelRecord, ...]
    integral_rows: tuple[tuple[int, float, float], ...]  # (L, integral, mu^L)

    @property
    def all_pass(self) -> bool:
        return not self.failures


def structural_checks(
    n: int,
    grid_size: int = 1 << 14,
    j_symmetry: int = 6,
    j_monotone: int = 12,
    l_max: int = 10,
) -> StructuralReport:
    """Verifies, on the grid: mirror symmetry about 1/2 for the early levels,
    concavity of the first level, monotonicity of the ratio extrema, and the
    integral bound int Pi_{nL,c} <= mu(n)^L."""
    failures: list[str] = []
    depth = max(j_symmetry, j_monotone + 1, l_max)
    levels = phi_levels(n, depth, grid_size)

    sym_dev = 0.0
    for j in range(min(j_symmetry, depth) + 1):
        dev = float(np.max(np.abs(levels[j].grid - levels[j].grid[::-1])))
        sym_dev = max(sym_dev, dev)
    symmetry_ok = sym_dev <= 1e-10
    if not symmetry_ok:
        failures.append(f"symmetry deviation {sym_dev:.3e} above 1e-10")

    v = levels[1].grid
    d2 = v[2:] - 2.0 * v[1:-1] + v[:-2]
    max_d2 = float(d2.max())
    concavity_ok = max_d2 <= 1e-8
    if not concavity_ok:
        i = int(np.argmax(d2)) + 1
        failures.append(f"second difference {max_d2:.3e} > 1e-8 at node {i}")

    records = []
    for j in range(min(j_monotone, depth - 1) + 1):
        lo, hi = _ratio_extrema(levels[j], levels[j + 1])
        records.append(LevelRecord(j, lo, hi, _exponent(n, lo), _exponent(n, hi)))
    monotonic_ok = True
    for a, b in zip(records, records[1:]):
        if b.ratio_max > a.ratio_max + 1e-9:
            monotonic_ok = False
            failures.append(f"ratio max increased at level {b.j}")
        if b.ratio_min < a.ratio_min - 1e-9:
            monotonic_ok = False
            failures.append(f"ratio min decreased at level {b.j}")

    mu_n = mu(n)
    rows = []
    integral_ok = True
    for ell in range(1, l_max + 1):
        val = levels[ell].integral()
        bound = mu_n**ell
        rows.append((ell, val, bound))
        if val > bound + 1e-12:
            integral_ok = False
            failures.append(f"integral at L={ell} exceeds mu^L: {val:.6e} > {bound:.6e}")

    return StructuralReport(
        n,
        symmetry_ok,
        sym_dev,
        concavity_ok,
        max_d2,
        monotonic_ok,
        integral_ok,
        tuple(failures),
        tuple(records),
        tuple(rows),
    )
