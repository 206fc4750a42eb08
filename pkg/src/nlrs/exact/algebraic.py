"""Exact complex algebraic numbers.

A number is a pair (irreducible monic minimal polynomial, root index).  The
roots of each irreducible polynomial are isolated once and cached; the cache
entries refine their boxes in place, which never changes which root an
index designates.  Equality is therefore structural and always exact.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath

from ..errors import DivisionByZero, NlrsError, NotReal, PrecisionCapExceeded
from .interval import Box, Interval, round_down, round_up, sqrt_down, sqrt_up
from .linalg import charpoly, companion, kronecker, kronecker_sum
from .poly import Polynomial, euler_phi, cyclotomic

START_PREC = 64
PRECISION_CAP = 1 << 20


def _mag_bits(q: Fraction) -> int:
    """Rough log2 of |q|, never below 0."""
    if q == 0:
        return 0
    return max(0, abs(q.numerator).bit_length() - q.denominator.bit_length() + 1)


def _to_grid(q: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(q * scale), scale)


def _interval(lo: Fraction, hi: Fraction, bits: int) -> Interval:
    prec = bits + 16 + max(_mag_bits(lo), _mag_bits(hi))
    return Interval(lo, hi, prec)


# -- root slots ------------------------------------------------------------------


class _Slot:
    """One root of an irreducible polynomial with a refinable isolating region."""

    is_real: bool

    def box(self, bits: int, cap: int) -> Box:
        raise NotImplementedError

    def sort_key(self):
        raise NotImplementedError


class _RationalSlot(_Slot):
    def __init__(self, value: Fraction):
        self.value = value
        self.is_real = True

    def box(self, bits, cap):
        return Box(Interval(self.value, prec=bits + 16 + _mag_bits(self.value)), Interval(0))

    def sort_key(self):
        return (0, float(self.value), 0.0)


class _QuadraticSlot(_Slot):
    """Root (-b + sign*sqrt(disc))/2 of t^2 + b t + c."""

    def __init__(self, b: Fraction, c: Fraction, sign: int):
        self.half_b = -b / 2
        self.disc = b * b - 4 * c
        self.sign = sign
        self.is_real = self.disc > 0

    def _sqrt_half(self, bits: int) -> tuple[Fraction, Fraction]:
        d = abs(self.disc) / 4
        p = bits + 4 + _mag_bits(d)
        return sqrt_down(d, p), sqrt_up(d, p)

    def box(self, bits, cap):
        if bits > cap:
            raise PrecisionCapExceeded(f"{bits} bits requested, cap is {cap}")
        lo, hi = self._sqrt_half(bits + 1)
        if self.sign < 0:
            lo, hi = -hi, -lo
        if self.is_real:
            return Box(_interval(self.half_b + lo, self.half_b + hi, bits), Interval(0))
        return Box(_interval(self.half_b, self.half_b, bits), _interval(lo, hi, bits))

    def sort_key(self):
        s = float(mpmath.sqrt(abs(self.disc) / 4)) * self.sign
        if self.is_real:
            return (0, float(self.half_b) + s, 0.0)
        return (1, float(self.half_b), -s)


class _NumericSlot(_Slot):
    """Root of an irreducible polynomial of degree >= 3.

    Real roots keep an interval with a certified sign change; complex roots
    keep a square certified to hold exactly one root.
    """

    def __init__(self, poly: Polynomial, re: Interval, im: Interval, is_real: bool):
        self.poly = poly
        self.dpoly = poly.derivative()
        self.is_real = is_real
        self._lock = threading.Lock()
        self._re = (re.lo, re.hi)
        self._im = (im.lo, im.hi)
        if is_real:
            self._sign_lo = poly.sign_at(re.lo)

    def sort_key(self):
        cr = float((self._re[0] + self._re[1]) / 2)
        ci = float((self._im[0] + self._im[1]) / 2)
        return (0 if self.is_real else 1, cr, -ci)

    def box(self, bits, cap):
        if bits > cap:
            raise PrecisionCapExceeded(f"{bits} bits requested, cap is {cap}")
        target = Fraction(1, 1 << bits)
        with self._lock:
            if self.is_real:
                if self._re[1] - self._re[0] > target:
                    self._refine_real(target, cap)
            elif max(self._re[1] - self._re[0], self._im[1] - self._im[0]) > target:
                self._refine_complex(target, cap)
            re, im = self._re, self._im
        return Box(_interval(re[0], re[1], bits), _interval(im[0], im[1], bits))

    # real refinement: Newton guess, validated by a sign change, bisection fallback
    def _refine_real(self, target: Fraction, cap: int) -> None:
        f, df = self.poly, self.dpoly
        bits = max(8, -(target.numerator.bit_length() - target.denominator.bit_length()) + 8)
        while self._re[1] - self._re[0] > target:
            a, b = self._re
            x = (a + b) / 2
            for _ in range(2 * bits.bit_length() + 6):
                d = df(x)
                if d == 0:
                    break
                x = _to_grid(x - f(x) / d, bits + 8)
            h = target / 4
            lo, hi = x - h, x + h
            if a <= lo and hi <= b:
                slo = f.sign_at(lo)
                shi = f.sign_at(hi)
                if slo != 0 and shi != 0 and slo != shi:
                    self._re = (lo, hi)
                    self._sign_lo = slo
                    return
            # Newton did not land; bisect a few times and retry
            for _ in range(8):
                a, b = self._re
                m = (a + b) / 2
                s = f.sign_at(m)
                if s == 0:
                    # cannot happen for irreducible degree >= 2, kept for safety
                    self._re = (m, m)
                    return
                if s == self._sign_lo:
                    self._re = (m, b)
                else:
                    self._re = (a, m)

    def _refine_complex(self, target: Fraction, cap: int) -> None:
        f = self.poly
        n = f.degree
        bits = max(8, -(target.numerator.bit_length() - target.denominator.bit_length()) + 8)
        zr = (self._re[0] + self._re[1]) / 2
        zi = (self._im[0] + self._im[1]) / 2
        for attempt in range(6):
            for _ in range(2 * bits.bit_length() + 6):
                fr, fi = f.eval_gaussian(zr, zi)
                dr, di = self.dpoly.eval_gaussian(zr, zi)
                den = dr * dr + di * di
                if den == 0:
                    break
                # z -= f/f'
                qr = (fr * dr + fi * di) / den
                qi = (fi * dr - fr * di) / den
                zr = _to_grid(zr - qr, bits + 8)
                zi = _to_grid(zi - qi, bits + 8)
            r = _disc_radius(f, zr, zi, n, bits + 16)
            if r is not None and 2 * r <= target:
                if (self._re[0] <= zr - r and zr + r <= self._re[1]
                        and self._im[0] <= zi - r and zi + r <= self._im[1]):
                    self._re = (zr - r, zr + r)
                    self._im = (zi - r, zi + r)
                    return
            bits *= 2
            if bits > cap:
                break
        raise PrecisionCapExceeded("complex root refinement failed to converge")


def _disc_radius(f: Polynomial, zr: Fraction, zi: Fraction, n: int, prec: int):
    """Upper bound for n|f(z)/f'(z)|: a disc of this radius about z holds a root."""
    fr, fi = f.eval_gaussian(zr, zi)
    dr, di = f.derivative().eval_gaussian(zr, zi)
    den = dr * dr + di * di
    if den == 0:
        return None
    r2 = Fraction(n * n) * (fr * fr + fi * fi) / den
    if r2 == 0:
        return Fraction(0)
    return round_up(sqrt_up(r2, prec), prec)


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    value = Fraction(man) * Fraction(2) ** exp
    return -value if sign else value


def _mp_coeffs(f: Polynomial):
    return [mpmath.mpf(c.numerator) / c.denominator for c in reversed(f.coeffs)]


def _isolate_numeric(f: Polynomial) -> list[_Slot]:
    n = f.degree
    k_real = f.count_real_roots()
    prec = START_PREC
    while prec <= PRECISION_CAP:
        with mpmath.workprec(prec + 20):
            try:
                approx = mpmath.polyroots(_mp_coeffs(f), maxsteps=100 + prec, extraprec=2 * prec)
            except mpmath.libmp.NoConvergence:
                prec *= 2
                continue
            approx = sorted(approx, key=lambda z: abs(mpmath.im(z)))
            reals = [mpmath.re(z) for z in approx[:k_real]]
            uppers = [z for z in approx[k_real:] if mpmath.im(z) > 0]
            if len(uppers) * 2 != n - k_real:
                prec *= 2
                continue
            grid = prec

            def q(x):
                return _to_grid(_mpf_to_fraction(x), grid)

            regions = []  # (re_lo, re_hi, im_lo, im_hi, is_real)
            ok = True
            for x in reals:
                c = q(x)
                r = _disc_radius(f, c, Fraction(0), n, prec)
                if r is None or r == 0:
                    ok = False
                    break
                regions.append((c - r, c + r, -r, r, True))
            for z in uppers if ok else []:
                cr, ci = q(mpmath.re(z)), q(mpmath.im(z))
                r = _disc_radius(f, cr, ci, n, prec)
                if r is None or r == 0 or ci - r <= 0:
                    ok = False
                    break
                regions.append((cr - r, cr + r, ci - r, ci + r, False))
                regions.append((cr - r, cr + r, -ci - r, -ci + r, False))
        if ok and _pairwise_disjoint(regions):
            slots = []
            for re_lo, re_hi, im_lo, im_hi, is_real in regions:
                if is_real:
                    slots.append(_NumericSlot(f, Interval(re_lo, re_hi, 10**6), Interval(0), True))
                else:
                    slots.append(_NumericSlot(f, Interval(re_lo, re_hi, 10**6), Interval(im_lo, im_hi, 10**6), False))
            return slots
        prec *= 2
    raise PrecisionCapExceeded(f"could not isolate the roots of {f}")


def _pairwise_disjoint(regions) -> bool:
    for i in range(len(regions)):
        a = regions[i]
        for b in regions[i + 1:]:
            if a[0] <= b[1] and b[0] <= a[1] and a[2] <= b[3] and b[2] <= a[3]:
                return False
    return True


@lru_cache(maxsize=2048)
def _slots(f: Polynomial) -> tuple[_Slot, ...]:
    """Isolated roots of a monic irreducible polynomial in canonical order:
    reals ascending, then complex roots as (upper, lower) conjugate pairs."""
    if f.degree == 1:
        return (_RationalSlot(-f.coeffs[0]),)
    if f.degree == 2:
        slots = [_QuadraticSlot(f.coeffs[1], f.coeffs[0], s) for s in (-1, 1)]
    else:
        slots = _isolate_numeric(f)
    return tuple(sorted(slots, key=lambda s: s.sort_key()))


# -- the number type -------------------------------------------------------------


class AlgebraicNumber:
    """An exact algebraic number: minimal polynomial plus root index."""

    __slots__ = ("minpoly", "index")

    def __init__(self, minpoly: Polynomial, index: int):
        self.minpoly = minpoly
        self.index = index

    # -- construction -------------------------------------------------------

    @classmethod
    def rational(cls, q) -> AlgebraicNumber:
        q = Fraction(q)
        return cls(Polynomial([-q, 1]), 0)

    @classmethod
    def gaussian(cls, re, im) -> AlgebraicNumber:
        """re + i*im for rationals re, im."""
        re, im = Fraction(re), Fraction(im)
        if im == 0:
            return cls.rational(re)
        f = Polynomial([re * re + im * im, -2 * re, 1])
        # slot order for a complex quadratic is (upper, lower)
        return cls(f, 0 if im > 0 else 1)

    @classmethod
    def from_enclosure(cls, poly: Polynomial, value_box: Callable[[int], Box],
                       cap: int = PRECISION_CAP) -> AlgebraicNumber:
        """The unique root of ``poly`` lying in every ``value_box(bits)``."""
        return _select_root(poly, value_box, cap)

    # -- basic queries -------------------------------------------------------

    @property
    def slot(self) -> _Slot:
        return _slots(self.minpoly)[self.index]

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    def is_rational(self) -> bool:
        return self.minpoly.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return -self.minpoly.coeffs[0]

    def is_zero(self) -> bool:
        return self.is_rational() and self.minpoly.coeffs[0] == 0

    def is_real(self) -> bool:
        return self.slot.is_real

    def enclose(self, bits: int, cap: int = PRECISION_CAP) -> Box:
        """A box of width at most 2^-bits containing the number."""
        if bits < 1:
            raise ValueError("bits must be >= 1")
        if bits > cap:
            raise PrecisionCapExceeded(f"{bits} bits requested, cap is {cap}")
        return self.slot.box(bits, cap)

    def approx(self) -> complex:
        b = self.enclose(60)
        return complex(float(b.re.mid), float(b.im.mid))

    def __float__(self) -> float:
        if not self.is_real():
            raise NotReal(f"{self} is not real")
        return float(self.enclose(60).re.mid)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.as_fraction() == other
        if isinstance(other, AlgebraicNumber):
            return self.minpoly == other.minpoly and self.index == other.index
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.as_fraction())
        return hash((self.minpoly, self.index))

    def __repr__(self) -> str:
        if self.is_rational():
            q = self.as_fraction()
            return f"AlgebraicNumber({q})"
        z = self.approx()
        return f"AlgebraicNumber(root of {self.minpoly} near {z.real:.6g}{z.imag:+.6g}i)"

    # -- signs and comparisons -------------------------------------------------

    def real_sign(self, cap: int = PRECISION_CAP) -> int:
        if not self.is_real():
            raise NotReal(f"{self!r} is not real")
        if self.is_rational():
            q = self.as_fraction()
            return (q > 0) - (q < 0)
        bits = 8
        while True:
            s = self.enclose(bits, cap).re.sign()
            if s is not None and s != 0:
                return s
            bits *= 2

    def compare_rational(self, q, cap: int = PRECISION_CAP) -> int:
        """sign(self - q) for a real number; exact."""
        q = Fraction(q)
        if not self.is_real():
            raise NotReal(f"{self!r} is not real")
        if self.is_rational():
            v = self.as_fraction()
            return (v > q) - (v < q)
        bits = 8
        while True:
            re = self.enclose(bits, cap).re
            if re.lo > q:
                return 1
            if re.hi < q:
                return -1
            bits *= 2

    def compare(self, other, cap: int = PRECISION_CAP) -> int:
        """sign(self - other) for two real numbers; exact."""
        if isinstance(other, (int, Fraction)):
            return self.compare_rational(other, cap)
        if other.is_rational():
            return self.compare_rational(other.as_fraction(), cap)
        if self.is_rational():
            return -other.compare_rational(self.as_fraction(), cap)
        if self == other:
            return 0
        if not (self.is_real() and other.is_real()):
            raise NotReal("comparison of non-real numbers")
        bits = 8
        while True:
            a, b = self.enclose(bits, cap).re, other.enclose(bits, cap).re
            if a.lo > b.hi:
                return 1
            if a.hi < b.lo:
                return -1
            bits *= 2

    # -- field arithmetic ---------------------------------------------------------

    def __neg__(self) -> AlgebraicNumber:
        if self.is_rational():
            return AlgebraicNumber.rational(-self.as_fraction())
        n = self.degree
        m = self.minpoly.scale_variable(-1) * (-1) ** n
        return _select_root(m, lambda b: -self.enclose(b), PRECISION_CAP)

    def conj(self) -> AlgebraicNumber:
        if self.is_real():
            return self
        return _select_root(self.minpoly, lambda b: self.enclose(b).conj(), PRECISION_CAP)

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if self.is_rational() and other.is_rational():
            return AlgebraicNumber.rational(self.as_fraction() + other.as_fraction())
        if other.is_rational():
            q = other.as_fraction()
            poly = self.minpoly.compose(Polynomial([-q, 1]))
        elif self.is_rational():
            return other + self
        else:
            poly = charpoly(kronecker_sum(companion(self.minpoly), companion(other.minpoly)))
        return _select_root(poly, lambda b: self.enclose(b + 2) + other.enclose(b + 2), PRECISION_CAP)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if self.is_rational() and other.is_rational():
            return AlgebraicNumber.rational(self.as_fraction() * other.as_fraction())
        if self.is_zero() or other.is_zero():
            return AlgebraicNumber.rational(0)
        if other.is_rational():
            q = other.as_fraction()
            poly = self.minpoly.scale_variable(1 / q).monic()
        elif self.is_rational():
            return other * self
        else:
            poly = charpoly(kronecker(companion(self.minpoly), companion(other.minpoly)))

        def box(b):
            # widths multiply by the magnitudes, so ask for a few extra bits
            extra = 4 + _mag_bits(self.enclose(4).abs2().hi) + _mag_bits(other.enclose(4).abs2().hi)
            return self.enclose(b + extra) * other.enclose(b + extra)

        return _select_root(poly, box, PRECISION_CAP)

    __rmul__ = __mul__

    def inverse(self) -> AlgebraicNumber:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            return AlgebraicNumber.rational(1 / self.as_fraction())
        poly = self.minpoly.reversed().monic()

        def box(b):
            # |1/x| can be large when x is small; scale the request accordingly
            low = self.enclose(b).abs2().lo
            bits = b
            while low <= 0:
                bits *= 2
                low = self.enclose(bits).abs2().lo
            extra = 4 + _mag_bits(1 / low)
            return self.enclose(b + extra).reciprocal()

        return _select_root(poly, box, PRECISION_CAP)

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZero("division by zero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _lift(other) * self.inverse()

    def __pow__(self, k: int) -> AlgebraicNumber:
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return AlgebraicNumber.rational(1)
        if self.is_rational():
            return AlgebraicNumber.rational(self.as_fraction() ** k)
        from .numberfield import NumberField

        field = NumberField(self.minpoly)
        return field.embed(field.generator() ** k, self)

    def abs2(self) -> AlgebraicNumber:
        """|x|^2 as a real algebraic number."""
        if self.is_real():
            return self * self
        if self.degree == 2:
            # product of the two conjugates is the constant term
            return AlgebraicNumber.rational(self.minpoly.coeffs[0])
        return self * self.conj()

    def sqrt(self) -> AlgebraicNumber:
        """Non-negative square root of a non-negative real number."""
        if self.real_sign() < 0:
            raise ValueError("square root of a negative number")
        if self.is_zero():
            return self
        poly = self.minpoly.compose(Polynomial([0, 0, 1]))

        def box(b):
            re = self.enclose(2 * b + 8).re
            lo = max(re.lo, Fraction(0))
            return Box(_interval(sqrt_down(lo, b + 8), sqrt_up(re.hi, b + 8), b), Interval(0))

        return _select_root(poly, box, PRECISION_CAP)

    def real_part(self) -> AlgebraicNumber:
        if self.is_real():
            return self
        return (self + self.conj()) * Fraction(1, 2)


def _lift(x):
    if isinstance(x, AlgebraicNumber):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return AlgebraicNumber.rational(x)
    return NotImplemented


def _select_root(poly: Polynomial, value_box: Callable[[int], Box], cap: int) -> AlgebraicNumber:
    candidates = [AlgebraicNumber(f, i) for f, _ in poly.factor() for i in range(f.degree)]
    if not candidates:
        raise NlrsError("no roots to select from")
    bits = 16
    while True:
        vb = value_box(bits)
        hits = [c for c in candidates if c.enclose(bits + 2, cap).overlaps(vb)]
        if len(hits) == 1:
            return hits[0]
        if not hits:
            raise NlrsError("enclosure matched no candidate root (internal inconsistency)")
        candidates = hits
        bits *= 2
        if bits > cap:
            raise PrecisionCapExceeded("could not separate candidate roots")


def isolate_roots(p: Polynomial) -> list[tuple[AlgebraicNumber, int]]:
    """All complex roots of a non-zero polynomial with multiplicities."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    out = []
    for f, e in p.factor():
        out.extend((AlgebraicNumber(f, i), e) for i in range(f.degree))
    return out


def real_sign(x: AlgebraicNumber) -> int:
    return x.real_sign()


def enclose(x: AlgebraicNumber, bits: int, cap: int = PRECISION_CAP) -> Box:
    return x.enclose(bits, cap)


def field_arith(op: str, x: AlgebraicNumber, y: AlgebraicNumber | None = None) -> AlgebraicNumber:
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "conj":
        return x.conj()
    if op == "neg":
        return -x
    raise ValueError(f"unknown operation {op!r}")


def root_of_unity_order(x: AlgebraicNumber) -> int | None:
    """Smallest M > 0 with x^M = 1, or None when x is not a root of unity.

    A primitive k-th root of unity has degree phi(k), so only k with
    phi(k) = deg(minpoly) can match, and then x is one iff its minimal
    polynomial is the k-th cyclotomic polynomial.
    """
    if x.is_zero():
        raise ValueError("zero is not a root of unity")
    m = x.minpoly
    # roots of unity are algebraic integers with constant term +-1
    if any(c.denominator != 1 for c in m.coeffs) or abs(m.coeffs[0]) != 1:
        return None
    n = m.degree
    # phi(k) >= sqrt(k/2), so k <= 2 n^2 covers every candidate
    for k in range(1, 2 * n * n + 3):
        if euler_phi(k) == n and cyclotomic(k) == m:
            return k
    return None


def nth_power_positive_real_order(x: AlgebraicNumber) -> int | None:
    """Smallest M > 0 with x^M positive real, i.e. the order of x/|x|."""
    if x.is_zero():
        raise ValueError("zero has no direction")
    if x.is_real():
        return 1 if x.real_sign() > 0 else 2
    # x/|x| is a root of unity iff x/conj(x) is; orders relate by a factor <= 2
    ratio = x / x.conj()
    k = root_of_unity_order(ratio)
    if k is None:
        return None
    for m in (k, 2 * k):
        p = x**m
        if p.is_real() and p.real_sign() > 0:
            return m
    return None
