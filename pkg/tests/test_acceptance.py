"""The ten acceptance criteria, each printing a single PASS/FAIL line."""

import random
import time
from fractions import Fraction
from math import lcm

import mpmath
import pytest

from nlrs.decision import NlrsInstance, case4_limit, decide, simulate, umin_sequence, verify_verdict
from nlrs.exact import AlgebraicNumber, Polynomial, isolate_roots, root_of_unity_order
from nlrs.lab.cf import cf_expand, select_r, verify_convergent_facts
from nlrs.lab.delta import (
    enumerate_delta,
    fit_constant,
    gap_report,
    near_recurrence_residual,
    signed_identity_holds,
    theoretical_constant,
)
from nlrs.props import random_bounded_instance

F = Fraction


# -- 1 -----------------------------------------------------------------------------------------


def _exhaustive_minima(inst: NlrsInstance, horizon: int) -> list[Fraction]:
    """min over all 2^n endpoint words of the output at step n, for n <= horizon.

    Every word is simulated, level by level, on integer states
    x'_n = K L^n x_n so that the brute force stays exact and fast.
    """
    d = inst.order
    L = lcm(*(c.denominator for c in inst.coefficients))
    K = lcm(inst.epsilon.denominator, *(u.denominator for u in inst.initial))
    scaled_a = [int(c * L) for c in inst.coefficients]
    e = int(inst.epsilon * K)
    states = [tuple(int(u * K) for u in reversed(inst.initial))]
    minima = [Fraction(states[0][0], K)]
    for n in range(1, horizon + 1):
        push = e * L ** (n - 1) * L  # K L^n eps, with K eps = e
        nxt = []
        for x in states:
            head = sum(a * xi for a, xi in zip(scaled_a, x))
            tail = tuple(L * xi for xi in x[: d - 1])
            nxt.append((head - push,) + tail)
            nxt.append((head + push,) + tail)
        states = nxt
        minima.append(Fraction(min(x[0] for x in states), K * L**n))
    return minima


def test_criterion_01_bang_bang_optimality(criterion):
    criterion("criterion 1: bang-bang worst case equals exhaustive minimum (200 instances, n <= 12)")
    rng = random.Random(1)
    start = time.time()
    horizon = 12
    for _ in range(200):
        inst = random_bounded_instance(rng)
        worst = umin_sequence(inst, horizon).values
        assert _exhaustive_minima(inst, horizon) == list(worst)
        for _ in range(100):
            n = rng.randint(1, horizon)
            word = [inst.epsilon * F(rng.randint(-97, 97), 97) for _ in range(n)]
            assert simulate(inst, word).outputs[-1] >= worst[n]
    assert time.time() - start < 60


# -- 2 -----------------------------------------------------------------------------------------


CURATED_BASES = [
    # (coefficients, list of initial vectors)
    (("1/2",), [("1",), ("-1",), ("1/3",)]),
    (("1",), [("1",), ("5",)]),
    (("-1/2",), [("1",)]),
    (("3/2", "-1/2"), [("1", "2"), ("2", "1")]),
    (("0", "1/4"), [("1", "1"), ("1", "-1")]),
    (("3/5", "-1/4"), [("1", "1")]),
    (("6/5", "-1"), [("1", "1")]),
    (("2", "-3/2", "1/2"), [("1", "1", "1"), ("4", "3", "2")]),
    (("3/2", "-79/100", "9/40"), [("10", "9", "81/10"), ("10", "10", "10")]),
    (("11/5", "-11/5", "1"), [("3", "3", "3"), ("1", "2", "3")]),
    (("8/5", "-17/20", "1/4"), [("10", "10", "10"), ("1", "1", "1"), ("5", "6", "7")]),
]


def curated_instances():
    """Fifty instances taken round-robin over the bases so every base appears."""
    per_base = [
        [NlrsInstance(coeffs, eps, init) for init in inits for eps in ("0", "1/100", "1/10")]
        for coeffs, inits in CURATED_BASES
    ]
    out = []
    while len(out) < 50 and any(per_base):
        for group in per_base:
            if group and len(out) < 50:
                out.append(group.pop(0))
    return out


def test_criterion_02_decision_vs_falsification(criterion):
    criterion("criterion 2: verdicts agree with witness replay and exact scan to 10^3 (50 instances)")
    start = time.time()
    instances = curated_instances()
    assert len(instances) == 50
    cases = set()
    for inst in instances:
        verdict = decide(inst)
        assert verdict.outcome != "unsupported", (inst, verdict.reason)
        cases.add(verdict.case)
        if verdict.outcome == "not_positive":
            w = verdict.witness
            assert w.value <= 0
            assert verify_verdict(inst, verdict)
            if w.controls or w.n >= inst.order - 1:
                assert simulate(inst, w.controls).outputs[-1] == w.value
        else:
            assert all(v > 0 for v in inst.initial)
            assert all(v > 0 for v in umin_sequence(inst, 1000).values)
    assert {"1", "2", "3", "4"} <= cases
    assert time.time() - start < 120


# -- 3 -----------------------------------------------------------------------------------------


def test_criterion_03_signed_recurrence_identity(criterion, oscillator):
    criterion("criterion 3: signed level relation is exactly zero on 10^3 sampled (m, n)")
    rng = random.Random(3)
    levels = (1, 7, 61, 393)
    for _ in range(1000):
        assert signed_identity_holds(oscillator, rng.choice(levels), rng.randint(0, 2000))


# -- 4, 7, 8 share the exception-set scans -------------------------------------------------------


@pytest.fixture(scope="module")
def level_records(oscillator):
    cfe = cf_expand(oscillator.theta, 20)
    sel = select_r(cfe)
    rs = sel.denominators[:4]
    start = time.time()
    records = [enumerate_delta(oscillator, r, 10_000, level) for level, r in enumerate(rs, 1)]
    return rs, records, time.time() - start


def test_criterion_04_membership_equivalence(criterion, level_records):
    criterion("criterion 4: three membership criteria agree, levels 1..4, m <= 10^4, 0 flagged")
    rs, records, elapsed = level_records
    assert rs == (1, 7, 61, 393)
    for rec in records:
        assert rec.disagreements == []
        assert rec.flagged == []
        assert rec.nonmember_pattern_failures == []
        assert rec.members, rec.r
        for member in rec.members:
            assert len(set(member.signs)) > 1
            assert member.forms
    assert elapsed < 300


# -- 5, 6 ----------------------------------------------------------------------------------------


def test_criterion_05_convergent_bounds(criterion, sqrt2_minus_one, golden, oscillator):
    criterion("criterion 5: convergent error bounds, alternation and best approximation (q < 10^4)")
    for generator, count in ((sqrt2_minus_one, 30), (golden, 30), (oscillator.theta, 15)):
        cfe = cf_expand(generator, count + 1)
        report = verify_convergent_facts(cfe, count, scan_bound=10_000)
        assert report.undetermined == 0
        assert len(report.bounds) == count
        assert report.bounds_ok and report.alternation_ok
        assert report.best_approximation_ok, (report.records, report.expected_records)


def test_criterion_06_known_continued_fractions(criterion, sqrt2_minus_one, golden):
    criterion("criterion 6: sqrt(2)-1 gives fifty 2s, golden ratio gives fifty 1s")
    assert cf_expand(sqrt2_minus_one, 50).quotients == (2,) * 50
    assert cf_expand(golden, 50).quotients == (1,) * 50


# -- 7 ----------------------------------------------------------------------------------------


def test_criterion_07_residual_decay(criterion, oscillator, level_records):
    criterion("criterion 7: residuals at delta = 2 within one fitted C, log-residual decreasing")
    _, records, _ = level_records
    start = time.time()
    usable = [rec for rec in records if len(rec.members) >= 3]
    assert len(usable) >= 3
    reports = [near_recurrence_residual(oscillator, rec, 2) for rec in usable]
    constant = fit_constant(reports)
    assert constant <= theoretical_constant(oscillator)
    assert all(rep.within(constant) for rep in reports)
    logs = [rep.log2_residual for rep in reports]
    assert all(a > b for a, b in zip(logs, logs[1:])), logs
    assert time.time() - start < 300


# -- 8 ----------------------------------------------------------------------------------------------


def test_criterion_08_gap_statistics(criterion, level_records):
    criterion("criterion 8: min gap / r_n >= 0.1 and first members non-decreasing")
    _, records, _ = level_records
    stats = gap_report(records)
    for level in stats.levels:
        print(f"r={level.r} first={level.first} mu={level.mu} mu/r={level.mu_over_r}")
    assert stats.min_mu_over_r is not None and stats.min_mu_over_r >= 0.1
    assert stats.first_nondecreasing


# -- 9 --------------------------------------------------------------------------------------------------


def _oracle_limit_sign(coeffs, initial, eps, terms=2000, digits=200):
    """Direct high-precision summation: sign of c - eps * sum |u^(c)_k| with a tail bound."""
    with mpmath.workdps(digits):
        a = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        # control sequence e_1^T A^k e_1 by the recurrence
        seq = [mpmath.mpf(1)]
        while len(seq) < 3:
            seq.append(sum(a[j] * seq[-1 - j] for j in range(len(seq))))
        while len(seq) < terms:
            seq.append(sum(a[j] * seq[-1 - j] for j in range(3)))
        partial = mpmath.fsum(abs(x) for x in seq)
        roots = mpmath.polyroots([1] + [-x for x in a], maxsteps=200, extraprec=400)
        # a root on the unit circle keeps |u^(c)| from decaying: the tail is unbounded
        # above, so only the upper end c - eps * S_N of the limit is finite
        assert any(abs(abs(r) - 1) < mpmath.mpf(10) ** (-digits // 2) for r in roots)
        u0, u1, u2 = (mpmath.mpf(v.numerator) / v.denominator for v in initial)
        # root-1 coefficient of the zero-control sequence
        c = (u2 - (a[0] - 1) * u1 - (a[0] + a[1] - 1) * u0) / (3 - 2 * a[0] - a[1])
        eps_mp = mpmath.mpf(eps.numerator) / eps.denominator
        upper = c - eps_mp * partial
        if upper < 0:
            return -1, c
        return 0, c


def test_criterion_09_case4_sign_stability(criterion):
    criterion("criterion 9: Case-4 limit sign matches a 200-digit oracle and survives doubled precision")
    start = time.time()
    coeffs = (F(8, 5), F(-17, 20), F(1, 4))
    initial = (F(10), F(10), F(10))
    eps = F(1, 100)
    inst = NlrsInstance(coeffs, eps, initial)
    base = case4_limit(inst, precision_start=64)
    doubled = case4_limit(inst, precision_start=128)
    oracle_sign, oracle_c = _oracle_limit_sign(coeffs, initial, eps)
    assert base.constant == 10 and abs(oracle_c - 10) < mpmath.mpf(10) ** -150
    assert base.sign == doubled.sign == oracle_sign == -1
    assert time.time() - start < 30


# -- 10 ---------------------------------------------------------------------------------------------


def test_criterion_10_root_of_unity_detector(criterion):
    criterion("criterion 10: root-of-unity orders i -> 4, -1 -> 2, zeta_5 -> 5, (3+4i)/5 -> none")
    assert root_of_unity_order(AlgebraicNumber.gaussian(0, 1)) == 4
    assert root_of_unity_order(AlgebraicNumber.rational(-1)) == 2
    fifth = [r for r, _ in isolate_roots(Polynomial([1, 1, 1, 1, 1]))]
    upper = [r for r in fifth if r.approx().imag > 0]
    assert len(upper) == 2
    assert all(root_of_unity_order(r) == 5 for r in upper)
    assert root_of_unity_order(AlgebraicNumber.gaussian(F(3, 5), F(4, 5))) is None
