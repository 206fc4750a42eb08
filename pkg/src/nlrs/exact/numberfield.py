"""Arithmetic in a simple extension Q[t]/(m) of the rationals."""

from __future__ import annotations

from fractions import Fraction

from ..errors import DivisionByZero
from .algebraic import AlgebraicNumber, _mag_bits, _select_root, PRECISION_CAP
from .interval import Box
from .linalg import charpoly
from .poly import Polynomial, inverse_mod


class NumberField:
    """Q(alpha) with alpha a root of the irreducible polynomial ``modulus``.

    Elements are polynomials reduced modulo ``modulus``; which root alpha
    stands for is chosen only when an element is embedded.
    """

    def __init__(self, modulus: Polynomial):
        self.modulus = modulus.monic()
        self.degree = self.modulus.degree

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.modulus == other.modulus

    def __hash__(self):
        return hash(self.modulus)

    def element(self, poly) -> FieldElement:
        if not isinstance(poly, Polynomial):
            poly = Polynomial([poly])
        return FieldElement(self, poly % self.modulus)

    def generator(self) -> FieldElement:
        return self.element(Polynomial.x())

    def one(self) -> FieldElement:
        return self.element(1)

    def embed(self, elem: FieldElement, alpha: AlgebraicNumber) -> AlgebraicNumber:
        """The value of ``elem`` when t is sent to the root ``alpha``."""
        if alpha.minpoly != self.modulus:
            raise ValueError("alpha is not a root of this field's modulus")
        p = elem.poly
        if p.degree <= 0:
            return AlgebraicNumber.rational(p.coeff(0))

        def box(bits: int) -> Box:
            # Horner over the box loses roughly log2 of the coefficient and
            # power sizes; over-request accordingly
            mag = _mag_bits(max(abs(c) for c in p.coeffs)) + p.degree * (
                _mag_bits(alpha.enclose(4).abs2().hi) + 1) + p.degree.bit_length() + 4
            z = alpha.enclose(bits + mag)
            acc = Box.point(p.coeffs[-1], 0, z.prec)
            for c in reversed(p.coeffs[:-1]):
                acc = acc * z + c
            return acc

        return _select_root(elem.charpoly(), box, PRECISION_CAP)


class FieldElement:
    __slots__ = ("field", "poly")

    def __init__(self, field: NumberField, poly: Polynomial):
        self.field = field
        self.poly = poly

    def _wrap(self, p: Polynomial) -> FieldElement:
        return FieldElement(self.field, p % self.field.modulus)

    def _other(self, other) -> Polynomial:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.poly
        return Polynomial([Fraction(other)])

    def __add__(self, other):
        return self._wrap(self.poly + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.poly - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.poly)

    def __neg__(self):
        return FieldElement(self.field, -self.poly)

    def __mul__(self, other):
        return self._wrap(self.poly * self._other(other))

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.poly.is_zero():
            raise DivisionByZero("inverse of zero in a number field")
        return FieldElement(self.field, inverse_mod(self.poly, self.field.modulus))

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        other = Fraction(other)
        if other == 0:
            raise DivisionByZero("division by zero")
        return self * (1 / other)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.poly == other.poly
        if isinstance(other, (int, Fraction)):
            return self.poly == Polynomial([other])
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.poly))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_rational(self) -> bool:
        return self.poly.degree <= 0

    def multiplication_matrix(self):
        n = self.field.degree
        cols = []
        for j in range(n):
            v = (self.poly * Polynomial.monomial(j)) % self.field.modulus
            cols.append([v.coeff(i) for i in range(n)])
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def charpoly(self) -> Polynomial:
        return charpoly(self.multiplication_matrix())

    def trace(self) -> Fraction:
        """Sum of the element's values over all embeddings (exact rational)."""
        m = self.multiplication_matrix()
        return sum((m[i][i] for i in range(len(m))), Fraction(0))

    def __repr__(self) -> str:
        return f"FieldElement({self.poly} mod {self.field.modulus})"
