"""Seeded invariant suites behind ``nlrs verify-props`` (and reused by tests)."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .decision import NlrsInstance, decide, simulate, umin_sequence, verify_verdict
from .exact.poly import Polynomial


def _small_rational(rng: random.Random, bound: int = 1, den: int = 6) -> Fraction:
    q = rng.randint(1, den)
    return Fraction(rng.randint(-bound * q, bound * q), q)


def bounded_charpoly(rng: random.Random, order: int) -> Polynomial:
    """Monic polynomial whose roots all have modulus <= 1, built from its roots."""
    poly = Polynomial([1])
    remaining = order
    while remaining:
        if remaining >= 2 and rng.random() < 0.5:
            while True:
                re, im = _small_rational(rng), _small_rational(rng)
                if im != 0 and re * re + im * im <= 1:
                    break
            poly = poly * Polynomial([re * re + im * im, -2 * re, 1])
            remaining -= 2
        else:
            poly = poly * Polynomial([-_small_rational(rng), 1])
            remaining -= 1
    return poly


def random_bounded_instance(rng: random.Random, order: int | None = None,
                            epsilons=(Fraction(0), Fraction(1, 10), Fraction(1, 4))) -> NlrsInstance:
    order = order or rng.randint(1, 3)
    poly = bounded_charpoly(rng, order)
    # t^d - a_0 t^{d-1} - ... - a_{d-1}
    coeffs = tuple(-poly.coeff(order - 1 - j) for j in range(order))
    initial = tuple(Fraction(rng.randint(-3, 12), rng.randint(1, 4)) for _ in range(order))
    return NlrsInstance(coeffs, rng.choice(list(epsilons)), initial)


def exhaustive_minimum(inst: NlrsInstance, horizon: int) -> Fraction:
    """Minimum of the output at ``horizon`` over all 2^horizon endpoint words."""
    eps = inst.epsilon
    best = None
    for word in itertools.product((-eps, eps), repeat=horizon):
        value = simulate(inst, word).outputs[-1]
        if best is None or value < best:
            best = value
    return best


def bang_bang_suite(rng: random.Random, instances: int = 20, max_horizon: int = 8) -> dict:
    checked = failures = 0
    for _ in range(instances):
        inst = random_bounded_instance(rng)
        n = rng.randint(0, max_horizon)
        target = umin_sequence(inst, n).values[-1]
        if exhaustive_minimum(inst, n) != target:
            failures += 1
        for _ in range(10):
            word = [inst.epsilon * Fraction(rng.randint(-8, 8), 8) for _ in range(n)]
            if simulate(inst, word).outputs[-1] < target:
                failures += 1
        checked += 1
    return {"checked": checked, "failures": failures, "passed": failures == 0}


def replay_suite(rng: random.Random, instances: int = 15) -> dict:
    checked = failures = unsupported = 0
    for _ in range(instances):
        inst = random_bounded_instance(rng)
        verdict = decide(inst, scan_cap=200_000)
        if verdict.outcome == "unsupported":
            unsupported += 1
            continue
        checked += 1
        if not verify_verdict(inst, verdict, horizon=200):
            failures += 1
    return {"checked": checked, "unsupported": unsupported, "failures": failures, "passed": failures == 0}


def signed_identity_suite(rng: random.Random, samples: int = 100) -> dict:
    from .lab.delta import Oscillator, signed_identity_holds

    osc = Oscillator.gaussian(Fraction(3, 10), Fraction(4, 10))
    failures = sum(
        not signed_identity_holds(osc, rng.choice((1, 7, 61)), rng.randint(0, 300))
        for _ in range(samples)
    )
    return {"checked": samples, "failures": failures, "passed": failures == 0}


def continued_fraction_suite(rng: random.Random) -> dict:
    from .lab.cf import convergents, cf_expand, verify_convergent_facts
    from .lab.delta import Oscillator

    osc = Oscillator.gaussian(Fraction(3, 10), Fraction(4, 10))
    cfe = cf_expand(osc.theta, 20)
    ps, qs = convergents(cfe.quotients)
    recurrences = (ps, qs) == (list(cfe.numerators), list(cfe.denominators))
    enclosure = osc.theta.enclosure(256)
    # theta lies between consecutive convergents
    last = [cfe.convergent(len(cfe) - 1), cfe.convergent(len(cfe))]
    consistent = min(last) < enclosure.hi and enclosure.lo < max(last)
    facts = verify_convergent_facts(cfe, 15, scan_bound=3000)
    passed = recurrences and consistent and facts.ok
    return {"checked": 3, "failures": 0 if passed else 1, "passed": passed}


def delta_suite(rng: random.Random, m_max: int = 600) -> dict:
    from .lab.delta import Oscillator, enumerate_delta

    osc = Oscillator.gaussian(Fraction(3, 10), Fraction(4, 10))
    bad = 0
    for level, r in enumerate((1, 7, 61), 1):
        rec = enumerate_delta(osc, r, m_max, level)
        bad += len(rec.disagreements) + len(rec.flagged) + len(rec.nonmember_pattern_failures)
    return {"checked": 3 * (m_max + 1), "failures": bad, "passed": bad == 0}


SUITES = {
    "bang_bang_optimality": bang_bang_suite,
    "witness_replay": replay_suite,
    "signed_identity": signed_identity_suite,
    "continued_fractions": continued_fraction_suite,
    "exception_set_equivalence": delta_suite,
}


def run_suites(seed: int = 0) -> dict:
    report = {}
    for name, suite in SUITES.items():
        report[name] = suite(random.Random(f"{seed}:{name}"))
    return report
