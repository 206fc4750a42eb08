import csv
import io
import json
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlrs.errors import PreconditionViolated
from nlrs.lab.delta import (
    CSV_COLUMNS,
    FORMS,
    Oscillator,
    direct_tail_sum,
    enumerate_delta,
    gap_report,
    member_rows,
    near_recurrence_residual,
    residual_curve,
    residual_rows,
    signed_identity_holds,
    theoretical_constant,
)


@pytest.fixture(scope="module")
def small_records(oscillator):
    return [enumerate_delta(oscillator, r, 1500, level) for level, r in enumerate((1, 7, 61), 1)]


def test_oscillator_preconditions():
    with pytest.raises(PreconditionViolated):
        Oscillator.gaussian(F(3, 5), F(4, 5))  # |lambda| = 1
    with pytest.raises(PreconditionViolated):
        Oscillator.gaussian(F(1, 2), F(-1, 2))  # lower half-plane
    with pytest.raises(PreconditionViolated):
        Oscillator.gaussian(0, F(1, 2))  # lambda / conj = -1
    with pytest.raises(PreconditionViolated):
        Oscillator.gaussian(F(1, 3), F(1, 3), 0, 0)


def test_terms_follow_the_real_recurrence(oscillator):
    # u_{m+2} = 2 Re(lambda) u_{m+1} - |lambda|^2 u_m
    assert (oscillator.trace, oscillator.norm) == (F(3, 5), F(1, 4))
    u = [oscillator.term(m) for m in range(30)]
    assert u[:2] == [2, F(3, 5)]
    assert all(u[m + 2] == F(3, 5) * u[m + 1] - F(1, 4) * u[m] for m in range(28))
    K, L = oscillator.scale
    assert [F(v, K * L**m) for m, v in enumerate(oscillator.scaled_terms(30))] == u


def test_level_coefficients_are_power_sums(oscillator):
    for r in (1, 2, 7):
        a_r, b_r = oscillator.level_rationals(r)
        assert b_r == oscillator.norm**r
        # a_r = -(lambda^r + conj^r), the trace of lambda^r
        assert a_r == -(oscillator.field.generator() ** r).trace()


@given(st.sampled_from((1, 2, 7, 61)), st.integers(0, 400))
def test_signed_identity(r, m):
    osc = Oscillator.gaussian(F(3, 10), F(4, 10), 2, -1)
    assert signed_identity_holds(osc, r, m)


def test_membership_scan_is_consistent(small_records, oscillator):
    for rec in small_records:
        assert rec.consistent and rec.members
        v = oscillator.scaled_terms(rec.m_max + 2 * rec.r + 1)
        members = set(rec.member_indices)
        for m in range(rec.m_max + 1):
            signs = {(x > 0) - (x < 0) for x in (v[m], v[m + rec.r], v[m + 2 * rec.r])}
            if m in members:
                assert len(signs) > 1
            elif 0 not in signs:
                assert len(signs) == 1, (rec.r, m)


def test_member_forms(small_records):
    for rec in small_records:
        for member in rec.members:
            assert member.forms and set(member.forms) <= set(FORMS)
            assert member.w.lo > 0 or member.w.hi < 0


def test_gap_report(small_records):
    stats = gap_report(small_records)
    assert [lv.r for lv in stats.levels] == [1, 7, 61]
    assert stats.first_nondecreasing
    assert stats.min_mu_over_r is not None and stats.min_mu_over_r > 0
    with pytest.raises(PreconditionViolated):
        gap_report(small_records[:1])


def test_single_member_level_has_no_gap(oscillator):
    rec = enumerate_delta(oscillator, 61, 200, 3)
    rec.members = rec.members[:1]
    stats = gap_report([enumerate_delta(oscillator, 7, 200, 2), rec])
    assert stats.levels[-1].mu is None and stats.levels[-1].mu_over_r is None


def test_residual_matches_the_direct_tail(small_records, oscillator):
    rec = small_records[1]
    for delta in range(3):
        rep = near_recurrence_residual(oscillator, rec, delta)
        tail = direct_tail_sum(oscillator, rec, delta)
        assert rep.residual_lo <= abs(tail.hi) and abs(tail.lo) <= rep.residual_hi


def test_residuals_shrink_with_delta(small_records, oscillator):
    curve = residual_curve(oscillator, small_records[1], max_delta=4)
    assert [rep.delta for rep in curve] == [0, 1, 2, 3, 4]
    assert all(a.exponent < b.exponent for a, b in zip(curve, curve[1:]))
    constant = theoretical_constant(oscillator)
    assert all(rep.within(constant) for rep in curve)


def test_too_few_members_is_an_error(oscillator, small_records):
    rec = small_records[2]
    with pytest.raises(PreconditionViolated):
        near_recurrence_residual(oscillator, rec, len(rec.members))


def test_exports(small_records, oscillator):
    payload = json.loads(json.dumps(small_records[1].to_json()))
    assert payload["member_count"] == len(small_records[1].members)
    curves = [residual_curve(oscillator, rec, max_delta=2) for rec in small_records]
    rows = residual_rows(curves, small_records) + member_rows(small_records)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    parsed = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert len(parsed) == len(rows)
    first = parsed[0]
    assert first["level"] == "1" and first["j"] == "1"
    assert float(first["residual_lo"]) <= float(first["residual_hi"])
