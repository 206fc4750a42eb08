"""Dense univariate polynomials with rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

from .rational import format_rational, parse_rational


class Polynomial:
    """Immutable polynomial, coefficients stored in ascending degree.

    >>> p = Polynomial([-2, 0, 1])
    >>> p.degree, p(Fraction(3))
    (2, Fraction(7, 1))
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def x(cls) -> Polynomial:
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> Polynomial:
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> Polynomial:
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> Polynomial:
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @classmethod
    def parse(cls, items: Sequence) -> Polynomial:
        """Coefficient array (ascending), entries as rational strings."""
        return cls(parse_rational(c) for c in items)

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                term = mono
            elif mono and c == -1:
                term = "-" + mono
            else:
                term = format_rational(c) + ("*" + mono if mono else "")
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> Polynomial:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(c * other for c in self.coeffs)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result, base = Polynomial([1]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Polynomial(), self
        quo = [Fraction(0)] * (dq + 1)
        lead = other.leading
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Polynomial(quo), Polynomial(rem[: len(other.coeffs) - 1])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    # -- evaluation -------------------------------------------------------

    def __call__(self, x):
        """Horner evaluation; works for any ring element supporting + and *."""
        if not self.coeffs:
            return Fraction(0) * 0 if isinstance(x, (int, Fraction)) else x * 0
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if not isinstance(acc, (int, Fraction)) and len(self.coeffs) == 1:
            return x * 0 + acc
        return acc

    def eval_gaussian(self, re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
        """Exact value at the Gaussian rational ``re + i*im``."""
        ar, ai = Fraction(0), Fraction(0)
        for c in reversed(self.coeffs):
            ar, ai = ar * re - ai * im + c, ar * im + ai * re
        return ar, ai

    def sign_at(self, x: Fraction) -> int:
        v = self(Fraction(x))
        return (v > 0) - (v < 0)

    # -- algebra ----------------------------------------------------------

    def derivative(self) -> Polynomial:
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def monic(self) -> Polynomial:
        if not self.coeffs:
            return self
        lead = self.leading
        return Polynomial(c / lead for c in self.coeffs)

    def compose(self, other: Polynomial) -> Polynomial:
        result = Polynomial()
        for c in reversed(self.coeffs):
            result = result * other + c
        return result

    def scale_variable(self, s) -> Polynomial:
        """Return p(s*x)."""
        s = Fraction(s)
        return Polynomial(c * s**k for k, c in enumerate(self.coeffs))

    def reversed(self) -> Polynomial:
        """x^deg * p(1/x)."""
        return Polynomial(reversed(self.coeffs))

    def gcd(self, other: Polynomial) -> Polynomial:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_part(self) -> Polynomial:
        if self.degree <= 0:
            return self.monic()
        return (self // self.gcd(self.derivative())).monic()

    def is_squarefree(self) -> bool:
        return self.gcd(self.derivative()).degree <= 0

    def integer_coefficients(self) -> list[int]:
        """Primitive integer multiple with positive leading coefficient."""
        if not self.coeffs:
            return []
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        if ints[-1] < 0:
            ints = [-v for v in ints]
        return ints

    def factor(self) -> list[tuple[Polynomial, int]]:
        """Monic irreducible factors over Q with multiplicities."""
        if self.degree <= 0:
            return []
        return [(f, e) for f, e in _factor_cached(tuple(self.integer_coefficients()))]

    # -- real root counting -------------------------------------------------

    def sturm_sequence(self) -> list[Polynomial]:
        seq = [self, self.derivative()]
        while not seq[-1].is_zero():
            r = -(seq[-2] % seq[-1])
            if r.is_zero():
                break
            seq.append(r)
        return seq

    def count_real_roots(self) -> int:
        """Number of distinct real roots (Sturm at +/- infinity)."""
        if self.degree <= 0:
            return 0
        seq = self.sturm_sequence()

        def variations(signs):
            signs = [s for s in signs if s != 0]
            return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

        at_pos = [(p.leading > 0) - (p.leading < 0) for p in seq]
        at_neg = [s * (-1) ** p.degree for s, p in zip(at_pos, seq)]
        return variations(at_neg) - variations(at_pos)

    def root_bound(self) -> Fraction:
        """Cauchy bound: every complex root has modulus below this."""
        lead = abs(self.leading)
        return 1 + max((abs(c) / lead for c in self.coeffs[:-1]), default=Fraction(0))


@lru_cache(maxsize=4096)
def _factor_cached(int_coeffs: tuple[int, ...]) -> tuple[tuple[Polynomial, int], ...]:
    # sympy does the multivariate-free Zassenhaus work; we only read results back
    from sympy import Poly, symbols

    x = symbols("x")
    p = Poly(list(reversed(int_coeffs)), x, domain="ZZ")
    _, facs = p.factor_list()
    out = []
    for f, e in facs:
        cs = [Fraction(int(c)) for c in reversed(f.all_coeffs())]
        out.append((Polynomial(cs).monic(), int(e)))
    out.sort(key=lambda fe: (fe[0].degree, fe[0].coeffs))
    return tuple(out)


@lru_cache(maxsize=256)
def cyclotomic(k: int) -> Polynomial:
    """The k-th cyclotomic polynomial, by exact division of x^k - 1."""
    p = Polynomial.monomial(k) - 1
    for d in range(1, k):
        if k % d == 0:
            p = p // cyclotomic(d)
    return p


def euler_phi(k: int) -> int:
    result, n, p = k, k, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def extended_gcd(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = Polynomial([1]), Polynomial()
    t0, t1 = Polynomial(), Polynomial([1])
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lead = r0.leading
    if lead == 0:
        return r0, s0, t0
    inv = 1 / lead
    return r0 * inv, s0 * inv, t0 * inv


def inverse_mod(a: Polynomial, m: Polynomial) -> Polynomial:
    g, s, _ = extended_gcd(a % m, m)
    if g.degree != 0:
        raise ZeroDivisionError("not invertible modulo the given polynomial")
    return s % m
