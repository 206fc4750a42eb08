import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlrs.errors import PreconditionViolated
from nlrs.exact import AlgebraicNumber
from nlrs.lrs import (
    LrsSpec,
    closed_form,
    first_nonpositive_below,
    integer_form,
    positivity_restricted,
    scan_nonpositive,
    solve_unit_orbit,
    ultimate_sign_pattern,
)
from nlrs.props import bounded_charpoly

# (t - 1)(t^2 - 6/5 t + 1): one root at 1 and the pair (3 +- 4i)/5 on the unit circle
UNIT_PAIR = ("11/5", "-11/5", "1")


def _with_pair(c, d_re, d_im):
    """Initial values of u_n = c + 2 Re(d mu^n), mu = (3 + 4i)/5."""
    out, re, im = [], F(1), F(0)
    for _ in range(3):
        out.append(F(c) + 2 * (d_re * re - d_im * im))
        re, im = re * F(3, 5) - im * F(4, 5), re * F(4, 5) + im * F(3, 5)
    return tuple(out)


def test_rejects_malformed_specs():
    with pytest.raises(PreconditionViolated):
        LrsSpec((), ())
    with pytest.raises(PreconditionViolated):
        LrsSpec(("1", "2"), ("1",))
    with pytest.raises(PreconditionViolated):
        LrsSpec(("1", "0"), ("1", "1"))


def test_term_by_powering_matches_iteration():
    s = LrsSpec(("3/2", "-1/2"), ("2", "3/2"))
    values = s.terms(40)
    assert [s.term(n) for n in range(40)] == values
    # 1 + (1/2)^n
    assert values[:4] == [2, F(3, 2), F(5, 4), F(9, 8)]


def test_subsequence_is_the_stride():
    s = LrsSpec(("3/2", "-1/2"), ("2", "3/2"))
    sub = s.subsequence(1, 2)
    assert sub.terms(10) == s.terms(21)[1::2]


def test_integer_form_preserves_signs():
    coeffs, init = (F(1, 2), F(-1, 3)), (F(1, 4), F(1))
    b, v, L, K = integer_form(coeffs, init)
    assert (L, K) == (6, 4)
    s = LrsSpec(coeffs, init)
    ints = list(v)
    while len(ints) < 25:
        ints.append(b[0] * ints[-1] + b[1] * ints[-2])
    assert [F(x, K * L**n) for n, x in enumerate(ints)] == s.terms(25)


def test_closed_form_reproduces_terms():
    for coeffs, init in ((("3/2", "-1/2"), ("2", "3/2")), (UNIT_PAIR, ("1", "2", "3")), (("0", "1/4"), ("1", "-1"))):
        s = LrsSpec(coeffs, init)
        assert closed_form(s).verify(s, 30)


def test_sign_patterns():
    alternating = ultimate_sign_pattern(LrsSpec(("-1",), ("1",)))
    assert alternating.period == 2 and alternating.signs == (1, -1)
    decaying = ultimate_sign_pattern(LrsSpec(("3/2", "-1/2"), ("2", "3/2")))
    assert decaying.period == 1 and decaying.signs == (1,)


def test_positivity_around_the_boundary():
    # c > 2|d|, c = 2|d| with the zero missed, c < 2|d|
    half = (F(1, 2), F(0))
    assert positivity_restricted(LrsSpec(UNIT_PAIR, _with_pair(2, *half))).is_positive
    assert positivity_restricted(LrsSpec(UNIT_PAIR, _with_pair(1, *half))).is_positive
    below = positivity_restricted(LrsSpec(UNIT_PAIR, _with_pair(F(9, 10), *half)))
    assert below.outcome == "not_positive" and below.witness == 3


def test_boundary_case_with_an_exact_zero():
    s = LrsSpec(UNIT_PAIR, _with_pair(1, F(117, 250), F(44, 250)))
    assert s.terms(6)[3] == 0
    verdict = positivity_restricted(s)
    assert verdict.outcome == "not_positive" and verdict.witness == 3


def test_first_term_witness():
    verdict = positivity_restricted(LrsSpec(("1/2",), ("-1",)))
    assert verdict.outcome == "not_positive" and verdict.witness == 0


def test_scanners():
    assert scan_nonpositive(LrsSpec(("-1/2",), ("1",))) == 1
    assert first_nonpositive_below(LrsSpec(("1/2",), ("1",)), 100) is None


def test_solve_unit_orbit():
    mu = AlgebraicNumber.gaussian(F(3, 5), F(4, 5))
    assert solve_unit_orbit(mu, AlgebraicNumber.rational(1)) == 0
    assert solve_unit_orbit(mu, mu**7) == 7
    assert solve_unit_orbit(mu, AlgebraicNumber.gaussian(0, 1)) is None
    assert solve_unit_orbit(mu, AlgebraicNumber.gaussian(F(3, 5), F(-4, 5)) ** 3) is None


@settings(max_examples=40)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_positivity_agrees_with_scan(seed, order):
    rng = random.Random(seed)
    poly = bounded_charpoly(rng, order)
    coeffs = tuple(-poly.coeff(order - 1 - j) for j in range(order))
    if coeffs[-1] == 0:
        return
    init = tuple(F(rng.randint(-2, 9), rng.randint(1, 3)) for _ in range(order))
    s = LrsSpec(coeffs, init)
    verdict = positivity_restricted(s, scan_cap=50_000)
    values = s.terms(400)
    if verdict.outcome == "not_positive":
        assert s.term(verdict.witness) <= 0
    elif verdict.outcome == "positive":
        assert all(v > 0 for v in values)
    else:
        assert verdict.reason
