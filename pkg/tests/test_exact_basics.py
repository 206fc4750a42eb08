"""Rationals, polynomials and matrices checked against sympy."""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from nlrs.exact import Polynomial, format_rational, parse_rational
from nlrs.exact.linalg import charpoly, companion, identity, mat_mul, solve
from nlrs.exact.poly import cyclotomic, euler_phi, extended_gcd, inverse_mod

rationals = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
polys = st.lists(rationals, min_size=1, max_size=6).map(Polynomial)
T = sympy.Symbol("t")


def to_sympy(p: Polynomial):
    coeffs = [sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)]
    return sympy.Poly(coeffs or [0], T, domain=sympy.QQ)


def qq(poly):
    return poly.set_domain(sympy.QQ)


@pytest.mark.parametrize("text,value", [
    ("3/4", Fraction(3, 4)), ("-7", Fraction(-7)), ("6/8", Fraction(3, 4)),
    ("−1/4", Fraction(-1, 4)), (" 2/3 ", Fraction(2, 3)), (5, Fraction(5)),
])
def test_parse_rational_accepts(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "0.5", "abc", "", True, 0.5, None, "1/2/3"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


@given(rationals)
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@given(polys, polys)
def test_ring_operations_match_sympy(p, q):
    assert to_sympy(p + q) == to_sympy(p) + to_sympy(q)
    assert to_sympy(p * q) == to_sympy(p) * to_sympy(q)
    if not q.is_zero():
        quo, rem = divmod(p, q)
        sq, sr = sympy.div(to_sympy(p), to_sympy(q))
        assert to_sympy(quo) == qq(sq) and to_sympy(rem) == qq(sr)


@given(polys, polys, polys)
def test_gcd_matches_sympy(p, q, common):
    # a shared factor makes non-trivial gcds likely
    p, q = p * common, q * common
    if p.is_zero() and q.is_zero():
        return
    g = p.gcd(q)
    expected = qq(sympy.gcd(to_sympy(p), to_sympy(q)).monic())
    assert to_sympy(g) == expected


@given(polys)
def test_sturm_count_matches_sympy(p):
    if p.degree < 1:
        return
    assert p.count_real_roots() == len(set(sympy.real_roots(to_sympy(p))))


@given(polys, rationals)
def test_evaluation_and_composition(p, x):
    q = Polynomial([1, 2, Fraction(1, 3)])
    assert p.compose(q)(x) == p(q(x))
    assert p.scale_variable(3)(x) == p(3 * x)


def test_squarefree_part_and_factor():
    p = Polynomial.from_roots([1, 1, 2]) * Polynomial([1, 0, 1])
    assert p.squarefree_part() == Polynomial.from_roots([1, 2]) * Polynomial([1, 0, 1])
    factors = dict((str(f), e) for f, e in p.factor())
    assert sorted(factors.values()) == [1, 1, 2]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 8, 12, 15])
def test_cyclotomic_matches_sympy(k):
    assert to_sympy(cyclotomic(k)) == qq(sympy.Poly(sympy.cyclotomic_poly(k, T), T))
    assert euler_phi(k) == sympy.totient(k)


def test_extended_gcd_and_inverse():
    a = Polynomial([1, 1])
    m = Polynomial([1, 0, 1])
    g, s, t = extended_gcd(a, m)
    assert g == Polynomial([1]) and s * a + t * m == g
    assert (inverse_mod(a, m) * a) % m == Polynomial([1])


@given(st.lists(rationals, min_size=1, max_size=3))
def test_companion_charpoly(coeffs):
    # t^d + c_{d-1} t^{d-1} + ... as a monic polynomial
    p = Polynomial(list(coeffs) + [1])
    assert charpoly(companion(p)) == p


def test_charpoly_and_solve_match_sympy():
    a = [[Fraction(1), Fraction(2), Fraction(0)], [Fraction(-1, 2), Fraction(3), Fraction(1)],
         [Fraction(0), Fraction(1, 3), Fraction(-2)]]
    sym = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in a])
    assert to_sympy(charpoly(a)) == qq(sym.charpoly(T).as_poly(T))
    b = [Fraction(1), Fraction(0), Fraction(2)]
    x = solve(a, b)
    assert [sum(r * v for r, v in zip(row, x)) for row in a] == b
    assert mat_mul(a, identity(3)) == a
