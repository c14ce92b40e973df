"""Exact fixed-point arithmetic on [0,1), special binary numbers, and
continued fractions.

Everything here is integer arithmetic: a value is ``bits / 2**width`` and all
operations act modulo 1 (i.e. modulo ``2**width``).  Keeping the substrate
exact makes Kronecker orbits {k*alpha} bit-reproducible across platforms;
floats only appear when a caller converts at the trigonometric boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_WIDTH = 128


@dataclass(frozen=True)
class UnitFraction:
    """W-bit fixed-point number ``bits / 2**width`` in [0, 1)."""

    bits: int
    width: int = DEFAULT_WIDTH

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"width must be >= 1, got {self.width}")
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError("bits out of range [0, 2**width)")

    @property
    def modulus(self) -> int:
        return 1 << self.width

    def as_fraction(self) -> Fraction:
        return Fraction(self.bits, self.modulus)

    def to_float(self) -> float:
        # int/int true division is correctly rounded in CPython.
        return self.bits / self.modulus

    def add(self, other: UnitFraction) -> UnitFraction:
        if other.width != self.width:
            raise ValueError("width mismatch")
        return UnitFraction((self.bits + other.bits) & (self.modulus - 1), self.width)

    def mul_int(self, k: int) -> UnitFraction:
        """{k * value}, exact on the truncated representation."""
        if k < 0:
            raise ValueError("k must be non-negative")
        return UnitFraction((self.bits * k) & (self.modulus - 1), self.width)

    def shift_left(self, j: int) -> UnitFraction:
        """{2**j * value}; the low j bits of the true value are already gone
        from the representation, so this is a plain masked shift."""
        if j < 0:
            raise ValueError("shift must be non-negative")
        return UnitFraction((self.bits << j) & (self.modulus - 1), self.width)

    def distance_to_int(self) -> Fraction:
        """Exact distance of the value to the nearest integer."""
        return Fraction(min(self.bits, self.modulus - self.bits), self.modulus)


def make_unit_fraction(numerator: int, denominator: int, width: int = DEFAULT_WIDTH) -> UnitFraction:
    """Truncating conversion of numerator/denominator to W-bit fixed point.

    Exact whenever the denominator is a power of two.
    """
    if denominator == 0:
        raise ValueError("denominator must be nonzero")
    if not 0 <= numerator < denominator:
        raise ValueError("need 0 <= numerator < denominator")
    return UnitFraction((numerator << width) // denominator, width)


def frac_mul_int(a: UnitFraction, k: int) -> UnitFraction:
    """{k*a} by W-bit modular multiply; truncation error below k * 2**-W."""
    return a.mul_int(k)


def nearest_int_distance(t: float) -> float:
    """min({t}, 1-{t}), the distance of t to the nearest integer."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    f = t % 1.0
    return min(f, 1.0 - f)


# -- special alpha constructions ---------------------------------------------

KIND_SHALLIT = "shallit_beta"
KIND_THEOREM = "theorem_alpha"
KIND_RATIONAL_BAD = "rational_bad"
KIND_USER = "user_bits"


@dataclass(frozen=True)
class SpecialAlpha:
    """A named fixed-point alpha.  ``kind`` is one of the KIND_* constants;
    ``param`` holds the period n for the parametrized kinds."""

    kind: str
    fraction: UnitFraction
    param: int | None = None

    def kind_label(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}({self.param})"

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind_label(),
                "width": self.fraction.width,
                "bits_hex": f"0x{self.fraction.bits:x}",
            }
        )

    @staticmethod
    def from_json(text: str) -> "SpecialAlpha":
        obj = json.loads(text)
        kind = obj["kind"]
        param = None
        if "(" in kind:
            base, rest = kind.split("(", 1)
            kind = base
            param = int(rest.rstrip(")"))
        frac = UnitFraction(int(obj["bits_hex"], 16), int(obj["width"]))
        return SpecialAlpha(kind, frac, param)


def shallit_beta(width: int = DEFAULT_WIDTH) -> SpecialAlpha:
    """beta = sum_{k>=0} 4**(-2**k): binary ones exactly at positions
    2, 4, 8, 16, ... after the point."""
    bits = 0
    p = 2
    while p <= width:
        bits |= 1 << (width - p)
        p *= 2
    return SpecialAlpha(KIND_SHALLIT, UnitFraction(bits, width))


def rational_bad(n: int, width: int = DEFAULT_WIDTH) -> SpecialAlpha:
    """W-bit truncation of 2**(n-1) / (2**n + 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    frac = make_unit_fraction(1 << (n - 1), (1 << n) + 1, width)
    return SpecialAlpha(KIND_RATIONAL_BAD, frac, n)


def theorem_alpha(n: int, width: int = DEFAULT_WIDTH) -> SpecialAlpha:
    """alpha = 2**(n-1)/(2**n + 1) + beta (mod 1), the sharp lower-bound
    parameter.  Both summands are produced by integer long division, so the
    value is bit-exact for the given width."""
    if n < 1:
        raise ValueError("n must be >= 1")
    frac = rational_bad(n, width).fraction.add(shallit_beta(width).fraction)
    return SpecialAlpha(KIND_THEOREM, frac, n)


def user_alpha(bits: int, width: int = DEFAULT_WIDTH) -> SpecialAlpha:
    return SpecialAlpha(KIND_USER, UnitFraction(bits, width))


# -- continued fractions -----------------------------------------------------


@dataclass(frozen=True)
class ContinuedFraction:
    """[0; a_1, a_2, ...] with the convergents p_i/q_i of the same depth.

    ``terminated`` is set when Euclid's algorithm exhausted the (truncated)
    input before ``max_terms``; the tail of a truncated irrational is
    truncation noise, not part of the true expansion.
    """

    coefficients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    terminated: bool


def continued_fraction(a: UnitFraction, max_terms: int) -> ContinuedFraction:
    """Euclid's algorithm on (bits, 2**width)."""
    if a.bits == 0:
        raise ValueError("continued fraction of 0 is not defined here")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    coeffs: list[int] = []
    convs: list[tuple[int, int]] = []
    # value = r1/r0 with the invariant r0 > r1 >= 0
    r0, r1 = a.modulus, a.bits
    h_prev, h = 1, 0  # numerators of [0;] seed
    k_prev, k = 0, 1  # denominators
    terminated = False
    while len(coeffs) < max_terms:
        q, r = divmod(r0, r1)
        coeffs.append(q)
        h_prev, h = h, q * h + h_prev
        k_prev, k = k, q * k + k_prev
        convs.append((h, k))
        r0, r1 = r1, r
        if r1 == 0:
            terminated = True
            break
    return ContinuedFraction(tuple(coeffs), tuple(convs), terminated)
