"""Generation of the perturbed Halton component, the Kronecker component,
their two-dimensional hybrid, and the index sequence m_k.

The generating matrix is the identity with a perturbed first row whose
pattern has a single 1 per period; it is never materialized.  The first
output digit is the parity of the input digits at the positions the pattern
selects, all other digits are mirrored across the radix point as in the
plain base-2 radical inverse.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .numtheory import DEFAULT_WIDTH, UnitFraction, frac_mul_int


@dataclass(frozen=True)
class PerturbSpec:
    """Periodic perturbing pattern c (c_j = 1 iff j % period == 0) together
    with a shift selecting c^(l), c^(l)_j = c_{j+l}.

    Generation always uses shift 0; nonzero shifts exist for the analysis
    operations (weighted digit sums, shifted trigonometric products).
    """

    period: int
    shift: int = 0

    def __post_init__(self) -> None:
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if self.shift < 0:
            raise ValueError("shift must be >= 0")

    def weight(self, j: int) -> int:
        """c^(shift)_j."""
        return 1 if (j + self.shift) % self.period == 0 else 0

    def gamma(self, r: int) -> tuple[int, ...]:
        """The first r weights, as used by the trigonometric products."""
        return tuple(self.weight(j) for j in range(r))

    def digit_mask(self, nbits: int) -> int:
        """Bit mask of the digit positions with weight 1 below nbits."""
        first = (-self.shift) % self.period
        mask = 0
        for p in range(first, nbits, self.period):
            mask |= 1 << p
        return mask


@dataclass(frozen=True)
class DigitVector:
    """Dyadic digits of a non-negative integer, least significant first."""

    digits: tuple[int, ...]

    @staticmethod
    def of(k: int) -> "DigitVector":
        if k < 0:
            raise ValueError("k must be non-negative")
        return DigitVector(tuple((k >> i) & 1 for i in range(max(1, k.bit_length()))))

    def reconstruct(self) -> int:
        return sum(d << i for i, d in enumerate(self.digits))


def weighted_digit_sum(k: int, spec: PerturbSpec) -> int:
    """Parity of the dyadic digits of k at the positions selected by the
    shifted pattern (positions congruent to -shift mod period)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return (k & spec.digit_mask(k.bit_length())).bit_count() & 1


def digital_point(k: int, spec: PerturbSpec, width: int = DEFAULT_WIDTH) -> UnitFraction:
    """x_k: first output digit is the weighted digit-sum parity, the rest
    mirror the digits of k across the radix point.  Exact in fixed point."""
    if spec.shift != 0:
        raise ValueError("point generation uses the unshifted pattern")
    if k < 0:
        raise ValueError("k must be non-negative")
    if k.bit_length() > width - 1:
        raise ValueError("k has more digits than the fixed-point width holds")
    bits = weighted_digit_sum(k, spec) << (width - 1)
    kk = k >> 1
    i = 1
    while kk:
        if kk & 1:
            bits |= 1 << (width - 1 - i)
        kk >>= 1
        i += 1
    return UnitFraction(bits, width)


def hybrid_point(k: int, spec: PerturbSpec, alpha: UnitFraction) -> tuple[UnitFraction, UnitFraction]:
    """z_k = (x_k, {k*alpha})."""
    return digital_point(k, spec, alpha.width), frac_mul_int(alpha, k)


def _parity_u64(a: np.ndarray) -> np.ndarray:
    """Bitwise parity of each element of an unsigned/positive int64 array."""
    a = a.copy()
    for s in (32, 16, 8, 4, 2, 1):
        a ^= a >> s
    return a & 1


def mk_array(n: int, count: int) -> np.ndarray:
    """First ``count`` non-negative integers whose digits at positions
    divisible by n have even sum, as an int64 array.  These are exactly the
    indices k with x_k(n) < 1/2; for n = 1 they are the evil numbers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    mask = PerturbSpec(n).digit_mask(63)
    out: list[np.ndarray] = []
    have = 0
    start = 0
    block = 1 << 16
    while have < count:
        cand = np.arange(start, start + block, dtype=np.int64)
        keep = cand[_parity_u64(cand & mask) == 0]
        out.append(keep)
        have += len(keep)
        start += block
    return np.concatenate(out)[:count]


def mk_sequence(n: int, count: int) -> list[int]:
    return [int(m) for m in mk_array(n, count)]


@dataclass
class PointSet2:
    """Finite list of exact 2D points in [0,1)^2.

    Coordinates are stored as integer numerators over 2**width; ``point``
    wraps them back into UnitFraction pairs.
    """

    x_bits: list[int]
    y_bits: list[int]
    width: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.x_bits) != len(self.y_bits):
            raise ValueError("coordinate lists must have equal length")

    def __len__(self) -> int:
        return len(self.x_bits)

    def point(self, i: int) -> tuple[UnitFraction, UnitFraction]:
        return UnitFraction(self.x_bits[i], self.width), UnitFraction(self.y_bits[i], self.width)

    @property
    def points(self) -> Iterator[tuple[UnitFraction, UnitFraction]]:
        return (self.point(i) for i in range(len(self)))

    def floats(self) -> tuple[np.ndarray, np.ndarray]:
        """Round-to-nearest double coordinates."""
        q = 1 << self.width
        xs = np.array([b / q for b in self.x_bits], dtype=float)
        ys = np.array([b / q for b in self.y_bits], dtype=float)
        return xs, ys

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "x_bits_hex", "y_bits_hex", "x_float", "y_float"])
        q = 1 << self.width
        for k, (xb, yb) in enumerate(zip(self.x_bits, self.y_bits)):
            w.writerow([k, f"0x{xb:x}", f"0x{yb:x}", repr(xb / q), repr(yb / q)])


def generate_point_set(
    spec: PerturbSpec,
    alpha: UnitFraction,
    count: int,
    chunk_size: int | None = None,
) -> PointSet2:
    """First ``count`` hybrid points z_0..z_{count-1}; O(count) time and
    memory.  Output is identical for every chunk_size."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if spec.shift != 0:
        raise ValueError("point generation uses the unshifted pattern")
    width = alpha.width
    if chunk_size is None or chunk_size < 1:
        chunk_size = count
    mod_mask = (1 << width) - 1
    m = max(1, (count - 1).bit_length())  # x_k needs m fractional digits
    if m + 1 > width:
        raise ValueError("count too large for the fixed-point width")
    x_bits: list[int] = []
    y_bits: list[int] = []
    mask = spec.digit_mask(63)
    for start in range(0, count, chunk_size):
        stop = min(start + chunk_size, count)
        ks = np.arange(start, stop, dtype=np.int64)
        y0 = _parity_u64(ks & mask)
        xnum = y0 << (m - 1)
        for i in range(1, m):
            xnum |= ((ks >> i) & 1) << (m - 1 - i)
        shift = width - m
        x_bits.extend(int(v) << shift for v in xnum)
        yb = (start * alpha.bits) & mod_mask
        for _ in range(start, stop):
            y_bits.append(yb)
            yb = (yb + alpha.bits) & mod_mask
    meta = {
        "n": spec.period,
        "alpha_bits_hex": f"0x{alpha.bits:x}",
        "width": width,
        "count": count,
    }
    return PointSet2(x_bits, y_bits, width, meta)
