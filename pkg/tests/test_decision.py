import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlrs.errors import ControlOutOfBand, PreconditionViolated, Unbounded
from nlrs.decision import (
    NlrsInstance,
    Verdict,
    Witness,
    bang_bang_word,
    build_system,
    case4_limit,
    classify,
    decide,
    simulate,
    umin_sequence,
    verify_verdict,
)
from nlrs.props import exhaustive_minimum, random_bounded_instance


def test_instance_validation():
    with pytest.raises(PreconditionViolated):
        NlrsInstance(("1", "1", "1", "1"), "0", ("1",) * 4)
    with pytest.raises(PreconditionViolated):
        NlrsInstance(("1/2",), "-1/10", ("1",))
    with pytest.raises(PreconditionViolated):
        NlrsInstance(("1/2", "1/3"), "0", ("1",))


def test_simulate_follows_the_recurrence():
    inst = NlrsInstance(("1", "1"), "1", ("0", "1"))
    traj = simulate(inst, [0, 0, 0, 0, 0])
    # Fibonacci outputs e_1^T x_n = u_{n+1}
    assert list(traj.outputs) == [1, 1, 2, 3, 5, 8]
    assert list(simulate(inst, [1, -1]).outputs) == [1, 2, 2]


def test_controls_outside_the_band_are_rejected():
    inst = NlrsInstance(("1/2",), "1/4", ("1",))
    simulate(inst, [F(1, 4), F(-1, 4)])
    with pytest.raises(ControlOutOfBand):
        simulate(inst, [F(1, 3)])


def test_worst_case_rows_for_a_first_order_instance():
    worst = umin_sequence(NlrsInstance(("1/2",), "1/4", ("1",)), 4)
    assert worst.values == (1, F(1, 4), F(-1, 8), F(-5, 16), F(-13, 32))
    assert worst.controls == (F(-1, 4),) * 4


def test_bang_bang_word_reads_control_signs_backwards():
    controls = [F(1), F(-1, 2), F(1, 4)]
    # step k pushes against sign(u^(c)_{N-1-k})
    assert bang_bang_word(controls, F(1, 10), 3) == [F(-1, 10), F(1, 10), F(-1, 10)]


def test_case_two_period_for_the_all_roots_instance():
    # roots 1 and (1 +- i)/2; ((1+i)/2)^8 is a positive real
    tag = classify(NlrsInstance(("2", "-3/2", "1/2"), "1/10", ("1", "1", "1")))
    assert tag.case == 2 and tag.period == 8


@pytest.mark.parametrize(
    "coeffs, eps, init, n, horizon, value, case",
    [
        (("1/2",), "1/4", ("1",), 2, 2, F(-1, 8), "2"),
        (("1",), "1/10", ("1",), 10, 10, F(0), "2"),
        (("-1/2",), "1/10", ("1",), 1, 1, F(-3, 5), "1"),
        (("1/2",), "1/10", ("-1",), 0, 0, F(-1), "1"),
        # a_{d-1} = 0: decided on the shorter recurrence, index shifted back
        (("1", "0"), "1/10", ("1", "1"), 11, 10, F(0), "2"),
        (("0",), "1/10", ("1",), 1, 1, F(-1, 10), None),
    ],
)
def test_not_positive_witnesses(coeffs, eps, init, n, horizon, value, case):
    inst = NlrsInstance(coeffs, eps, init)
    verdict = decide(inst)
    assert verdict.outcome == "not_positive"
    assert verdict.case == case
    assert (verdict.witness.n, verdict.witness.horizon, verdict.witness.value) == (n, horizon, value)
    assert verify_verdict(inst, verdict)


def test_zero_noise_is_positive_with_a_certificate():
    inst = NlrsInstance(("1/2",), "0", ("1",))
    verdict = decide(inst)
    assert verdict.outcome == "positive"
    assert verify_verdict(inst, verdict, horizon=100)


def test_unbounded_instances_are_refused():
    inst = NlrsInstance(("2",), "0", ("1",))
    with pytest.raises(Unbounded):
        build_system(inst)
    verdict = decide(inst)
    assert verdict.outcome == "unsupported" and verdict.reason == "unbounded"


def test_case_four_limit():
    inst = NlrsInstance(("8/5", "-17/20", "1/4"), "1/100", ("10", "10", "10"))
    enc = case4_limit(inst)
    assert enc.constant == 10 and enc.sign == -1
    # a root on the unit circle: the control sum diverges, no lower end
    assert enc.lower is None and enc.upper < 0
    verdict = decide(inst)
    assert verdict.outcome == "not_positive" and verdict.case == "4"
    assert verify_verdict(inst, verdict)


def test_forged_witnesses_fail_verification():
    inst = NlrsInstance(("1/2",), "1/4", ("1",))
    genuine = decide(inst)
    w = genuine.witness
    forged = Verdict("not_positive", genuine.case, Witness(w.n, w.controls, w.value + 1))
    assert not verify_verdict(inst, forged)
    assert not verify_verdict(inst, Verdict("positive", "2", certificate={"prefix_checked": 5}))


def test_verdict_json_round_trip():
    verdict = decide(NlrsInstance(("1/2",), "1/4", ("1",)))
    payload = json.loads(json.dumps(verdict.to_json()))
    assert payload["verdict"] == "not_positive"
    assert payload["witness"] == {"n": 2, "horizon": 2, "controls": ["-1/4", "-1/4"], "value": "-1/8"}


@settings(max_examples=40)
@given(st.integers(0, 2**32), st.integers(0, 7))
def test_bang_bang_matches_exhaustive_search(seed, horizon):
    inst = random_bounded_instance(random.Random(seed))
    assert umin_sequence(inst, horizon).values[-1] == exhaustive_minimum(inst, horizon)


@settings(max_examples=25)
@given(st.integers(0, 2**32))
def test_decisions_survive_replay(seed):
    inst = random_bounded_instance(random.Random(seed))
    verdict = decide(inst, scan_cap=200_000)
    assert verify_verdict(inst, verdict, horizon=200)
    if verdict.outcome == "positive":
        assert inst.epsilon == 0
