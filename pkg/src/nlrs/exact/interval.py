"""Validated interval arithmetic with dyadic endpoints.

Every interval carries a working precision ``prec`` (significant bits).
Results are rounded outward to dyadic rationals at the larger precision of
the operands, so the exact value is always enclosed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from ..errors import DivisionByZero

DEFAULT_PREC = 64


def _is_dyadic_short(q: Fraction, prec: int) -> bool:
    d = q.denominator
    return d & (d - 1) == 0 and abs(q.numerator).bit_length() <= prec


def _floor_shift(q: Fraction, shift: int) -> int:
    """floor(q * 2^shift)."""
    n, d = q.numerator, q.denominator
    if shift >= 0:
        return (n << shift) // d
    return n // (d << -shift)


def round_down(q: Fraction, prec: int) -> Fraction:
    if q == 0 or _is_dyadic_short(q, prec):
        return q
    e = abs(q.numerator).bit_length() - q.denominator.bit_length()
    shift = prec - e
    return Fraction(_floor_shift(q, shift)) / (Fraction(2) ** shift)


def round_up(q: Fraction, prec: int) -> Fraction:
    return -round_down(-q, prec)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact endpoint")


class Interval:
    """Closed real interval [lo, hi] with outward-rounded dyadic endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PREC):
        lo = _as_fraction(lo)
        hi = lo if hi is None else _as_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = round_down(lo, prec)
        self.hi = round_up(hi, prec)
        self.prec = prec

    @classmethod
    def coerce(cls, x, prec: int = DEFAULT_PREC) -> Interval:
        if isinstance(x, Interval):
            return x
        return cls(x, x, prec)

    # -- queries ----------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: Interval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def sign(self):
        """+1 / -1 when the sign is certain, 0 for the point zero, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 == self.hi:
            return 0
        return None

    def certainly_lt(self, other) -> bool:
        other = Interval.coerce(other, self.prec)
        return self.hi < other.lo

    def certainly_gt(self, other) -> bool:
        other = Interval.coerce(other, self.prec)
        return self.lo > other.hi

    def hull(self, other: Interval) -> Interval:
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi), max(self.prec, other.prec))

    def with_prec(self, prec: int) -> Interval:
        return Interval(self.lo, self.hi, prec)

    def log2_bounds(self) -> tuple[float, float]:
        """Float estimates of log2 of the endpoints (reporting only)."""
        if self.lo <= 0:
            raise ValueError("log2 of a non-positive interval")
        return _log2(self.lo), _log2(self.hi)

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"

    # -- arithmetic -------------------------------------------------------

    def _prec_with(self, other) -> int:
        return max(self.prec, other.prec) if isinstance(other, Interval) else self.prec

    def __add__(self, other):
        p = self._prec_with(other)
        o = Interval.coerce(other, p)
        return Interval(self.lo + o.lo, self.hi + o.hi, p)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo, self.prec)

    def __sub__(self, other):
        p = self._prec_with(other)
        o = Interval.coerce(other, p)
        return Interval(self.lo - o.hi, self.hi - o.lo, p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self._prec_with(other)
        if isinstance(other, (int, Fraction)):
            a, b = self.lo * other, self.hi * other
            return Interval(min(a, b), max(a, b), p)
        o = Interval.coerce(other, p)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(prods), max(prods), p)

    __rmul__ = __mul__

    def reciprocal(self) -> Interval:
        if self.lo <= 0 <= self.hi:
            raise DivisionByZero("interval divisor contains zero")
        return Interval(1 / self.hi, 1 / self.lo, self.prec)

    def __truediv__(self, other):
        p = self._prec_with(other)
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by exact zero")
            return self * (Fraction(1) / other)
        return self * Interval.coerce(other, p).reciprocal()

    def __rtruediv__(self, other):
        return Interval.coerce(other, self.prec) * self.reciprocal()

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi), self.prec)

    def square(self) -> Interval:
        a = abs(self)
        return Interval(a.lo * a.lo, a.hi * a.hi, self.prec)

    def __pow__(self, k: int):
        if k < 0:
            return (self ** (-k)).reciprocal()
        if k == 0:
            return Interval(1, 1, self.prec)
        if k % 2 == 0:
            a = abs(self)
            return Interval(a.lo**k, a.hi**k, self.prec)
        return Interval(self.lo**k, self.hi**k, self.prec)

    def sqrt(self) -> Interval:
        if self.hi < 0:
            raise ValueError("sqrt of a negative interval")
        lo = max(self.lo, Fraction(0))
        return Interval(sqrt_down(lo, self.prec), sqrt_up(self.hi, self.prec), self.prec)


def _log2(q: Fraction) -> float:
    return math.log2(q.numerator) - math.log2(q.denominator)


def sqrt_down(q: Fraction, prec: int) -> Fraction:
    if q <= 0:
        return Fraction(0)
    e = (q.numerator.bit_length() - q.denominator.bit_length()) // 2
    k = prec + 2 - e
    # floor(sqrt(q) * 2^k) = isqrt(floor(q * 4^k))
    return Fraction(isqrt(_floor_shift(q, 2 * k)), 1) / Fraction(2) ** k


def sqrt_up(q: Fraction, prec: int) -> Fraction:
    s = sqrt_down(q, prec)
    if s * s == q:
        return s
    e = (q.numerator.bit_length() - q.denominator.bit_length()) // 2
    k = prec + 2 - e
    return s + Fraction(1) / Fraction(2) ** k


# -- transcendental enclosures -------------------------------------------------


def _atan_small(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Bounds on atan(x) for |x| <= 1/2 from the alternating Taylor series.

    Fixed-point evaluation with ``bits`` fractional bits; each truncation
    costs at most one unit, which is tracked in ``err``.
    """
    if x == 0:
        return Fraction(0), Fraction(0)
    p, q = x.numerator, x.denominator
    p2, q2 = p * p, q * q
    guard = 16 + bits.bit_length()
    scale = bits + guard
    y = (p << scale) // q  # ~ x * 2^scale, error < 1
    total, k, err = 0, 0, 1
    while y != 0:
        term = y // (2 * k + 1)
        total += term if k % 2 == 0 else -term
        err += 2  # rounding of y and of the division
        y = (y * p2) // q2 if y > 0 else -((-y * p2) // q2)
        k += 1
    # once y hits 0 the remaining exact terms are below 2^-scale in total
    err += 2
    denom = 1 << scale
    return Fraction(total - err, denom), Fraction(total + err, denom)


@lru_cache(maxsize=64)
def _pi_bounds(bits: int) -> tuple[Fraction, Fraction]:
    # Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    a_lo, a_hi = _atan_small(Fraction(1, 5), bits + 8)
    b_lo, b_hi = _atan_small(Fraction(1, 239), bits + 8)
    return 16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo


def pi_interval(prec: int = DEFAULT_PREC) -> Interval:
    lo, hi = _pi_bounds(prec + 8)
    return Interval(lo, hi, prec)


def _atan_bounds(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rigorous bounds on atan(x) for any rational x."""
    if x < 0:
        lo, hi = _atan_bounds(-x, bits)
        return -hi, -lo
    if x > 1:
        # atan(x) = pi/2 - atan(1/x)
        lo, hi = _atan_bounds(1 / x, bits)
        p_lo, p_hi = _pi_bounds(bits + 4)
        return p_lo / 2 - hi, p_hi / 2 - lo
    if x > Fraction(1, 2):
        # atan(x) = atan(1/2) + atan((x - 1/2)/(1 + x/2)), second argument <= 1/3
        h_lo, h_hi = _atan_small(Fraction(1, 2), bits + 2)
        y = (x - Fraction(1, 2)) / (1 + x / 2)
        y_lo, y_hi = _atan_small(y, bits + 2)
        return h_lo + y_lo, h_hi + y_hi
    return _atan_small(x, bits)


def atan_interval(x: Interval) -> Interval:
    """Enclosure of atan over an interval (atan is increasing)."""
    bits = x.prec + 8
    lo, _ = _atan_bounds(x.lo, bits)
    _, hi = _atan_bounds(x.hi, bits)
    return Interval(lo, hi, x.prec)


def _atan2_turns(y: Fraction, x: Fraction, prec: int) -> Interval:
    """arg(x + iy) / (2 pi) in (-1/2, 1/2] as an interval; (x, y) != 0."""
    if x == 0:
        if y == 0:
            raise ValueError("argument of zero")
        return Interval(Fraction(1, 4) if y > 0 else Fraction(-1, 4), prec=prec)
    if y == 0:
        return Interval(0 if x > 0 else Fraction(1, 2), prec=prec)
    bits = prec + 8
    lo, hi = _atan_bounds(y / x, bits)
    p_lo, p_hi = _pi_bounds(bits)
    if x < 0:
        if y > 0:
            lo, hi = lo + p_lo, hi + p_hi
        else:
            lo, hi = lo - p_hi, hi - p_lo
    # divide by 2 pi, choosing the pi endpoint that keeps the bounds outward
    t_lo = lo / (2 * p_hi) if lo >= 0 else lo / (2 * p_lo)
    t_hi = hi / (2 * p_lo) if hi >= 0 else hi / (2 * p_hi)
    return Interval(t_lo, t_hi, prec)


class Box:
    """Complex rectangle re x im."""

    __slots__ = ("re", "im")

    def __init__(self, re: Interval, im: Interval):
        self.re = re
        self.im = im

    @classmethod
    def point(cls, re, im=0, prec: int = DEFAULT_PREC) -> Box:
        return cls(Interval(Fraction(re), prec=prec), Interval(Fraction(im), prec=prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)

    def contains(self, re, im=0) -> bool:
        return self.re.contains(re) and self.im.contains(im)

    def contains_box(self, other: Box) -> bool:
        return self.re.contains(other.re) and self.im.contains(other.im)

    def overlaps(self, other: Box) -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def __add__(self, other):
        if not isinstance(other, Box):
            return Box(self.re + other, self.im)
        return Box(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return Box(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, Box):
            return Box(self.re - other, self.im)
        return Box(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Box):
            return Box(self.re * other, self.im * other)
        return Box(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conj(self) -> Box:
        return Box(self.re, -self.im)

    def abs2(self) -> Interval:
        return self.re.square() + self.im.square()

    def abs(self) -> Interval:
        return self.abs2().sqrt()

    def reciprocal(self) -> Box:
        n = self.abs2()
        if n.lo <= 0:
            raise DivisionByZero("box divisor may contain zero")
        return Box(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not isinstance(other, Box):
            return Box(self.re / other, self.im / other)
        return self * other.reciprocal()

    def __pow__(self, k: int):
        result = Box.point(1, 0, self.prec)
        base = self
        if k < 0:
            base, k = self.reciprocal(), -k
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def arg_turns(self) -> Interval:
        """Enclosure of arg/(2 pi), on a branch chosen so the result is contiguous.

        The interval is meaningful modulo 1; its endpoints may leave [0, 1).
        """
        if self.re.lo <= 0 <= self.re.hi and self.im.lo <= 0 <= self.im.hi:
            raise ValueError("box contains zero; argument undefined")
        prec = self.prec
        corners = [
            _atan2_turns(y, x, prec)
            for x in (self.re.lo, self.re.hi)
            for y in (self.im.lo, self.im.hi)
        ]
        if self.re.hi < 0 and self.im.lo <= 0 <= self.im.hi:
            # straddles the negative real axis: move to the (0, 1) branch
            corners = [c + 1 if c.hi <= 0 else c for c in corners]
        lo = min(c.lo for c in corners)
        hi = max(c.hi for c in corners)
        return Interval(lo, hi, prec)

    def __repr__(self) -> str:
        return f"Box(re={self.re!r}, im={self.im!r})"


def frac_interval(x: Interval) -> Interval | None:
    """Fractional part of x when the interval contains no integer, else None."""
    k = math.floor(x.lo)
    if x.hi >= k + 1:
        return None
    return Interval(x.lo - k, x.hi - k, x.prec)


def arg_turns_of(box: Box) -> Interval:
    return box.arg_turns()
