from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlrs.errors import InsufficientExpansion, PreconditionViolated
from nlrs.exact import AlgebraicNumber, Interval
from nlrs.lab.cf import (
    ContinuedFractionExpansion,
    RealGenerator,
    cf_expand,
    check_prop_dio,
    convergents,
    distance_to_integer,
    select_r,
    triggering_q,
    verify_convergent_facts,
)


def _value(quotients) -> F:
    x = F(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    return x


def _synthetic(quotients, tail=(1,) * 30) -> ContinuedFractionExpansion:
    """An expansion with chosen quotients; theta is pinned by a long extension."""
    ps, qs = convergents(quotients)
    theta = RealGenerator.rational(_value(tuple(quotients) + tail))
    return ContinuedFractionExpansion(tuple(quotients), tuple(ps), tuple(qs), theta)


@given(st.lists(st.integers(1, 40), min_size=1, max_size=12))
def test_convergents_match_direct_evaluation(quotients):
    ps, qs = convergents(quotients)
    assert (ps[0], qs[0]) == (0, 1)
    for i in range(1, len(quotients) + 1):
        assert F(ps[i], qs[i]) == _value(quotients[:i])
        # determinant identity
        assert ps[i] * qs[i - 1] - ps[i - 1] * qs[i] == (-1) ** (i + 1)


def test_distance_to_integer():
    iv = Interval(F(27, 10), F(28, 10), 64)
    d = distance_to_integer(iv)
    # outward rounding at 64 bits may widen the ends slightly
    assert d.lo <= F(2, 10) < F(3, 10) <= d.hi and d.width < F(1, 9)
    assert distance_to_integer(Interval(F(-1, 10), F(1, 10), 64)).lo == 0


def test_rational_theta_is_rejected():
    with pytest.raises(PreconditionViolated):
        cf_expand(RealGenerator.rational(F(13, 29)), 5)


def test_argument_of_a_real_number_is_rational():
    assert RealGenerator.argument(AlgebraicNumber.rational(-3)).irrational is False


def test_expansion_of_the_oscillator_angle(oscillator):
    cfe = cf_expand(oscillator.theta, 20)
    assert cfe.quotients[:8] == (6, 1, 3, 2, 5, 1, 6, 5)
    assert cfe.denominators[:8] == (1, 6, 7, 27, 61, 332, 393, 2690)
    iv = oscillator.theta.enclosure(200)
    # theta sits between consecutive convergents
    a, b = cfe.convergent(19), cfe.convergent(20)
    assert min(a, b) < iv.lo and iv.hi < max(a, b)


def test_convergent_report_for_sqrt2(sqrt2_minus_one):
    cfe = cf_expand(sqrt2_minus_one, 21)
    report = verify_convergent_facts(cfe, 20, scan_bound=5_000)
    assert report.ok
    # best approximations below 5000 are exactly the convergent denominators
    assert report.records == report.expected_records


def test_bounded_selection_uses_even_indices(oscillator):
    sel = select_r(cf_expand(oscillator.theta, 20))
    assert sel.branch == "bounded" and sel.parity == 0 and not sel.mirrored
    assert sel.indices[:4] == (0, 2, 4, 6)
    assert sel.denominators[:4] == (1, 7, 61, 393)
    assert sel.eps_sel == F(1, 8)


def test_unbounded_selection_follows_records():
    sel = select_r(_synthetic((1, 1, 3, 1, 5, 1, 7, 1, 9)))
    assert sel.branch == "unbounded"
    assert sel.record_positions == (3, 5, 7, 9)
    assert sel.indices == tuple(j - 1 for j in sel.record_positions[sel.trimmed:])


def test_selection_needs_enough_quotients():
    with pytest.raises(InsufficientExpansion):
        select_r(_synthetic((2, 2, 2)))


def test_golden_selection_and_triggers(golden):
    cfe = cf_expand(golden, 20)
    sel = select_r(cfe)
    # r = 1 is trimmed: ||theta|| > 1/4
    assert sel.trimmed == 1 and sel.denominators[:3] == (2, 5, 13)
    # q_6 = 13 is a best approximation: nothing below it does better at c = 1
    assert triggering_q(cfe, 13, 1) == []
    assert triggering_q(cfe, 13, 2) == [8]


def test_sqrt2_diophantine_check(sqrt2_minus_one):
    cfe = cf_expand(sqrt2_minus_one, 20)
    sel = select_r(cfe)
    assert sel.eps_sel == F(1, 2)
    report = check_prop_dio(cfe, sel, trials=500, seed=4)
    assert report.ok and report.checked > 0
    assert report.min_scaled_ratio is None or report.min_scaled_ratio >= sel.eps_sel


def test_diophantine_check_is_seeded(oscillator):
    cfe = cf_expand(oscillator.theta, 20)
    sel = select_r(cfe)
    first = check_prop_dio(cfe, sel, trials=300, seed=11, exhaustive_limit=100)
    second = check_prop_dio(cfe, sel, trials=300, seed=11, exhaustive_limit=100)
    assert first.to_json() == second.to_json()
    assert first.ok
