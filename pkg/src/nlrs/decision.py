"""Positivity of bounded nearly linear recurrences of order <= 3.

An instance is u_{n+d} = a_0 u_{n+d-1} + ... + a_{d-1} u_n + w_n with
|w_n| <= eps.  With the companion matrix A and state
x_n = (u_{n+d-1}, ..., u_n) the system reads x_{n+1} = A x_n + w_n e_1, so
the output e_1^T x_n is u_{n+d-1}.  Indices of outputs, controls and the
worst-case sequence below are state indices; verdict witnesses carry the
sequence index as well.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

from .errors import (
    ControlOutOfBand,
    NlrsError,
    PrecisionCapExceeded,
    PreconditionViolated,
    Unbounded,
    Unsupported,
)
from .exact.algebraic import AlgebraicNumber, isolate_roots, nth_power_positive_real_order
from .exact.interval import Interval
from .exact.linalg import Matrix, charpoly, identity, mat_mul, mat_vec
from .exact.rational import format_rational, parse_rational
from .lrs import (
    DEFAULT_SCAN_CAP,
    LrsSpec,
    closed_form,
    positivity_restricted,
    ultimate_sign_pattern,
    SignPattern,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NlrsInstance:
    coefficients: tuple[Fraction, ...]
    epsilon: Fraction
    initial: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(parse_rational(c) for c in self.coefficients)
        init = tuple(parse_rational(c) for c in self.initial)
        eps = parse_rational(self.epsilon)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "epsilon", eps)
        if not 1 <= len(coeffs) <= 3:
            raise PreconditionViolated("order must be 1, 2 or 3")
        if len(init) != len(coeffs):
            raise PreconditionViolated("need exactly one initial value per order")
        if eps < 0:
            raise PreconditionViolated("epsilon must be >= 0")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def companion(self) -> Matrix:
        d = self.order
        rows = [list(self.coefficients)]
        for i in range(d - 1):
            rows.append([Fraction(int(j == i)) for j in range(d)])
        return rows

    def initial_state(self) -> list[Fraction]:
        return list(reversed(self.initial))

    def with_scaled_initial(self, factor) -> NlrsInstance:
        f = Fraction(factor)
        return NlrsInstance(self.coefficients, self.epsilon, tuple(u * f for u in self.initial))


# -- system view ---------------------------------------------------------------------


@dataclass(frozen=True)
class SystemView:
    matrix: Matrix
    zero_control: LrsSpec  # state-indexed: e_1^T A^n x_0
    control: LrsSpec  # e_1^T A^n e_1
    sequence: LrsSpec  # u_0, u_1, ... with all controls zero
    roots: tuple[tuple[AlgebraicNumber, int], ...]
    rho: AlgebraicNumber | None  # real root of largest modulus
    lam: AlgebraicNumber | None  # complex root in the upper half-plane

    @property
    def charpoly(self):
        return charpoly(self.matrix)

    def has_repeated_roots(self) -> bool:
        return any(m > 1 for _, m in self.roots)


def _first_values(a: Matrix, v: Sequence[Fraction], count: int) -> list[Fraction]:
    out = []
    x = list(v)
    for _ in range(count):
        out.append(x[0])
        x = mat_vec(a, x)
    return out


def build_system(inst: NlrsInstance) -> SystemView:
    a = inst.companion()
    d = inst.order
    if inst.coefficients[-1] == 0:
        raise Unsupported("trailing coefficient is zero; reduce the order first")
    x0 = inst.initial_state()
    e1 = [Fraction(int(i == 0)) for i in range(d)]
    zvals = _first_values(a, x0, 2 * d)
    cvals = _first_values(a, e1, 2 * d)
    zero_control = LrsSpec(inst.coefficients, tuple(zvals[:d]))
    control = LrsSpec(inst.coefficients, tuple(cvals[:d]))
    sequence = LrsSpec(inst.coefficients, inst.initial)
    # spot-check the LRS views against the matrix definition
    if zero_control.terms(2 * d) != zvals or control.terms(2 * d) != cvals:
        raise AssertionError("system views disagree with the companion matrix")
    if sequence.terms(2 * d - 1)[d - 1:] != zvals[: d]:
        raise AssertionError("sequence and state views disagree")
    roots = tuple(isolate_roots(charpoly(a)))
    for r, _ in roots:
        if r.abs2().compare_rational(1) > 0:
            raise Unbounded("unbounded")
    reals = [r for r, _ in roots if r.is_real()]
    rho = None
    for r in reals:
        if rho is None or r.abs2().compare(rho.abs2()) > 0:
            rho = r
    uppers = [r for r, _ in roots if not r.is_real() and r.enclose(8).im.lo > 0]
    lam = uppers[0] if uppers else None
    return SystemView(a, zero_control, control, sequence, roots, rho, lam)


# -- trajectories ------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    states: tuple[tuple[Fraction, ...], ...]
    outputs: tuple[Fraction, ...]


def simulate(inst: NlrsInstance, controls: Sequence) -> Trajectory:
    """Exact states x_0..x_N and outputs e_1^T x_n for a control word of length N."""
    a = inst.companion()
    eps = inst.epsilon
    x = inst.initial_state()
    states = [tuple(x)]
    for k, w in enumerate(controls):
        w = parse_rational(w)
        if abs(w) > eps:
            raise ControlOutOfBand(f"control {k} = {format_rational(w)} outside [-{eps}, {eps}]")
        x = mat_vec(a, x)
        x[0] += w
        states.append(tuple(x))
    return Trajectory(tuple(states), tuple(s[0] for s in states))


def bang_bang_word(control_values: Sequence[Fraction], eps: Fraction, horizon: int) -> list[Fraction]:
    """Controls minimising the output at ``horizon``: step k works against u^(c)_{horizon-1-k}."""
    return [eps if control_values[horizon - 1 - k] < 0 else -eps for k in range(horizon)]


@dataclass(frozen=True)
class WorstCase:
    values: tuple[Fraction, ...]  # u^(min)_0..u^(min)_N
    controls: tuple[Fraction, ...]  # realises values[N] at the final index


def umin_sequence(inst: NlrsInstance, horizon: int) -> WorstCase:
    """u^(min)_n = u^(z)_n - eps * sum_{k<n} |u^(c)_k| for n <= horizon."""
    sys_a = inst.companion()
    d = inst.order
    z = _first_values(sys_a, inst.initial_state(), horizon + 1)
    c = _first_values(sys_a, [Fraction(int(i == 0)) for i in range(d)], horizon + 1)
    eps = inst.epsilon
    vals = []
    acc = Fraction(0)
    for n in range(horizon + 1):
        vals.append(z[n] - eps * acc)
        acc += abs(c[n])
    return WorstCase(tuple(vals), tuple(bang_bang_word(c, eps, horizon)))


class _WorstCaseStream:
    """Incremental exact u^(min) with scaled integers (no gcd work per step).

    With L the common denominator of the coefficients, Z_n = K_z L^n u^(z)_n
    and C_n = K_c L^n u^(c)_n satisfy integer recurrences, and
    P_n = K_c L^n sum_{k<n} |u^(c)_k| obeys P_{n+1} = L (P_n + |C_n|).
    """

    def __init__(self, inst: NlrsInstance):
        from .lrs import integer_form

        d = inst.order
        a = inst.companion()
        zvals = _first_values(a, inst.initial_state(), d)
        cvals = _first_values(a, [Fraction(int(i == 0)) for i in range(d)], d)
        self.b, self.z, self.L, self.kz = integer_form(inst.coefficients, zvals)
        _, self.c, _, self.kc = integer_form(inst.coefficients, cvals)
        self.eps_num = inst.epsilon.numerator
        self.eps_den = inst.epsilon.denominator
        self.p = 0
        self.n = 0
        self.d = d

    def sign(self) -> int:
        # sign(u^(z)_n - eps * S_n) with both parts scaled by L^n
        v = self.z[0] * self.kc * self.eps_den - self.eps_num * self.p * self.kz
        return (v > 0) - (v < 0)

    def advance(self) -> None:
        self.p = self.L * (self.p + abs(self.c[0]))
        for seq in (self.z, self.c):
            nxt = sum(bj * seq[-1 - j] for j, bj in enumerate(self.b))
            seq.append(nxt)
            del seq[0]
        self.n += 1


def first_nonpositive_umin(inst: NlrsInstance, start: int = 0, cap: int = DEFAULT_SCAN_CAP) -> int:
    """Smallest state index n >= start with u^(min)_n <= 0 (soft-capped search)."""
    stream = _WorstCaseStream(inst)
    while True:
        if stream.n >= start and stream.sign() <= 0:
            return stream.n
        if stream.n >= cap:
            raise Unsupported(f"witness scan reached the soft cap of {cap} terms")
        if stream.n and stream.n % 1_000_000 == 0:
            log.info("worst-case scan at n=%d", stream.n)
        stream.advance()


def umin_positive_below(inst: NlrsInstance, bound: int) -> int | None:
    """First n < bound with u^(min)_n <= 0, or None."""
    stream = _WorstCaseStream(inst)
    while stream.n < bound:
        if stream.sign() <= 0:
            return stream.n
        stream.advance()
    return None


# -- verdicts ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    n: int  # sequence index: u_n <= 0
    controls: tuple[Fraction, ...]
    value: Fraction

    @property
    def horizon(self) -> int:
        """State index of the witness output (len(controls))."""
        return len(self.controls)


@dataclass(frozen=True)
class Verdict:
    outcome: str  # "positive" | "not_positive" | "unsupported"
    case: str | None = None
    witness: Witness | None = None
    certificate: dict | None = None
    reason: str | None = None

    @property
    def is_positive(self) -> bool:
        return self.outcome == "positive"

    def to_json(self) -> dict:
        wit = None
        if self.witness is not None:
            wit = {
                "n": self.witness.n,
                "horizon": self.witness.horizon,
                "controls": [format_rational(c) for c in self.witness.controls],
                "value": format_rational(self.witness.value),
            }
        return {
            "verdict": self.outcome,
            "case": self.case,
            "witness": wit,
            "certificate": _jsonable(self.certificate) if self.certificate is not None else None,
            "reason": self.reason,
        }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, AlgebraicNumber):
        return repr(obj)
    return obj


def _witness_at(inst: NlrsInstance, horizon: int) -> Witness:
    """Worst-case witness at a state index, replayed exactly."""
    wc = umin_sequence(inst, horizon)
    traj = simulate(inst, wc.controls)
    value = traj.outputs[-1]
    if value != wc.values[-1]:
        raise AssertionError("bang-bang replay mismatch")
    return Witness(horizon + inst.order - 1, wc.controls, value)


def verify_verdict(inst: NlrsInstance, verdict: Verdict, horizon: int = 0) -> bool:
    """Re-check a verdict: witnesses replay to a non-positive value; for
    positive verdicts the certified prefix (and ``horizon`` more terms) of
    the worst case is re-checked exactly."""
    if verdict.outcome == "not_positive":
        w = verdict.witness
        if w is None:
            return False
        d = inst.order
        if w.n < d - 1:
            return not w.controls and inst.initial[w.n] == w.value and w.value <= 0
        traj = simulate(inst, w.controls)
        return traj.outputs[-1] == w.value and w.value <= 0 and w.n == len(w.controls) + d - 1
    if verdict.outcome == "positive":
        if any(u <= 0 for u in inst.initial):
            return False
        cert = verdict.certificate or {}
        bound = max(int(cert.get("prefix_checked", 0)), horizon)
        return umin_positive_below(inst, bound + 1) is None
    return True


# -- classification ----------------------------------------------------------------------


@dataclass(frozen=True)
class CaseTag:
    case: int
    period: int | None = None  # Case 2: M with lambda^M positive real for every root
    zero_control_verdict: object = None


def _all_roots_period(system: SystemView) -> int | None:
    orders = []
    for r, _ in system.roots:
        k = nth_power_positive_real_order(r)
        if k is None:
            return None
        orders.append(k)
    return lcm(*orders)


def classify(inst: NlrsInstance, system: SystemView | None = None, scan_cap: int = DEFAULT_SCAN_CAP) -> CaseTag:
    system = system or build_system(inst)
    if system.has_repeated_roots():
        raise Unsupported("repeated characteristic roots")
    zv = positivity_restricted(system.sequence, scan_cap)
    if zv.outcome == "unsupported":
        raise Unsupported(zv.reason)
    if zv.outcome == "not_positive":
        return CaseTag(1, zero_control_verdict=zv)
    m = _all_roots_period(system)
    if m is not None:
        return CaseTag(2, period=m, zero_control_verdict=zv)
    lam = system.lam
    rho = system.rho
    lam_on_circle = lam is not None and lam.abs2().compare_rational(1) == 0
    rho_below_one = rho is None or rho.compare_rational(1) < 0
    if rho_below_one or lam_on_circle:
        return CaseTag(3, zero_control_verdict=zv)
    return CaseTag(4, zero_control_verdict=zv)


# -- Case 4 limit ------------------------------------------------------------------------------


@dataclass(frozen=True)
class SignedEnclosure:
    """L = c - eps * sum_k |u^(c)_k| lies in [lower, upper] (lower None: -infinity)."""

    lower: Fraction | None
    upper: Fraction
    sign: int
    terms: int
    constant: Fraction


def _tail_bound(system: SystemView, n_terms: int, bits: int) -> Fraction | None:
    """Upper bound of sum_{k >= N} |u^(c)_k|, None when the series diverges."""
    cf = closed_form(system.control)
    total = Fraction(0)
    for t in cf.terms():
        r2 = t.root.abs2()
        if r2.compare_rational(1) >= 0:
            return None
        r = r2.enclose(bits).re.sqrt()
        c = t.coefficient.enclose(bits).abs2().sqrt()
        if r.hi >= 1:
            return None if bits > 4096 else _tail_bound(system, n_terms, bits * 2)
        total += c.hi * r.hi**n_terms / (1 - r.hi)
    return total


def case4_limit(inst: NlrsInstance, precision_start: int = 64, max_terms: int = 1 << 22) -> SignedEnclosure:
    """Enclose L = c - eps * sum |u^(c)_k| and decide its sign.

    c is the coefficient of the root 1 in the zero-control closed form.  The
    partial sums are exact; the tail is bounded geometrically, or is
    unbounded when u^(c) has a root on the unit circle (then only the upper
    end of the enclosure is finite).
    """
    system = build_system(inst)
    cf = closed_form(system.sequence)
    c = cf.coefficient_of(AlgebraicNumber.rational(1))
    if not c.is_rational():
        raise NlrsError("coefficient of the root 1 must be rational")
    c = c.as_fraction()
    eps = inst.epsilon
    if eps == 0:
        s = (c > 0) - (c < 0)
        return SignedEnclosure(c, c, s, 0, c)
    cvals_lrs = system.control
    partial = Fraction(0)
    k = 0
    n_target = 16
    lower = None
    while True:
        vals = cvals_lrs.terms(n_target)
        while k < n_target:
            partial += abs(vals[k])
            k += 1
        upper = c - eps * partial
        tail = _tail_bound(system, k, precision_start)
        lower = None if tail is None else c - eps * (partial + tail)
        if upper < 0:
            return SignedEnclosure(lower, upper, -1, k, c)
        if lower is not None and lower > 0:
            return SignedEnclosure(lower, upper, 1, k, c)
        n_target *= 2
        if n_target > max_terms:
            raise PrecisionCapExceeded(
                "Case-4 limit sign not determined within the term cap",
                best=SignedEnclosure(lower, upper, 0, k, c),
            )


# -- decision ------------------------------------------------------------------------------------


def _not_positive(inst: NlrsInstance, case: str | None, horizon: int, **cert) -> Verdict:
    wit = _witness_at(inst, horizon)
    if wit.value > 0:
        raise AssertionError("witness does not violate positivity")
    return Verdict("not_positive", case, wit, _jsonable(cert) or None)


def _initial_prefix_witness(inst: NlrsInstance) -> Verdict | None:
    for i, u in enumerate(inst.initial[: inst.order - 1]):
        if u <= 0:
            return Verdict("not_positive", None, Witness(i, (), u), {"rule": "initial value"})
    return None


def _reduce_order(inst: NlrsInstance) -> NlrsInstance:
    """Drop u_0 when a_{d-1} = 0: the tail is an NLRS of order d-1."""
    return NlrsInstance(inst.coefficients[:-1], inst.epsilon, inst.initial[1:])


def decide(inst: NlrsInstance, scan_cap: int = DEFAULT_SCAN_CAP, precision_start: int = 64) -> Verdict:
    try:
        return _decide(inst, scan_cap, precision_start)
    except Unbounded as exc:
        return Verdict("unsupported", reason=exc.reason)
    except Unsupported as exc:
        return Verdict("unsupported", reason=exc.reason)
    except PrecisionCapExceeded as exc:
        return Verdict("unsupported", reason=f"precision cap: {exc}")


def _decide(inst: NlrsInstance, scan_cap: int, precision_start: int) -> Verdict:
    d = inst.order
    if inst.coefficients[-1] == 0:
        if inst.initial[0] <= 0:
            return Verdict("not_positive", None, Witness(0, (), inst.initial[0]), {"rule": "initial value"})
        if d == 1:
            # u_1 = w_0 alone; the worst control makes it -eps <= 0
            wit = _witness_at(inst, 1)
            return Verdict("not_positive", None, wit, {"rule": "zero recurrence"})
        sub = _decide(_reduce_order(inst), scan_cap, precision_start)
        if sub.witness is not None:
            w = sub.witness
            sub = Verdict(sub.outcome, sub.case, Witness(w.n + 1, w.controls, w.value),
                          sub.certificate, sub.reason)
        cert = dict(sub.certificate or {})
        cert["reduced_order"] = d - 1
        return Verdict(sub.outcome, sub.case, sub.witness, cert, sub.reason)

    pre = _initial_prefix_witness(inst)
    if pre is not None:
        return pre
    system = build_system(inst)
    tag = classify(inst, system, scan_cap)
    case = str(tag.case)
    eps = inst.epsilon

    if tag.case == 1:
        zv = tag.zero_control_verdict
        # u^(min) <= u^(z), so the worst case fails no later than u^(z) does
        m = zv.witness
        if m < d - 1:
            return Verdict("not_positive", case, Witness(m, (), inst.initial[m]), {"rule": "initial value"})
        horizon = first_nonpositive_umin(inst, 0, m - d + 1)
        return _not_positive(inst, case, horizon, rule="zero-control LRS not positive",
                             zero_control_witness=m)

    if eps == 0:
        # u^(min) = u^(z), whose positivity was just certified
        cert = dict(tag.zero_control_verdict.certificate)
        cert["rule"] = "eps = 0: zero-control LRS positive"
        if tag.case == 4:
            enc = case4_limit(inst, precision_start)
            cert["limit"] = enc.constant
        if tag.case == 2:
            cert["period"] = tag.period
        return Verdict("positive", case, None, _jsonable(cert))

    if tag.case == 3:
        horizon = first_nonpositive_umin(inst, 0, scan_cap)
        return _not_positive(inst, case, horizon, rule="worst case not positive (Case 3)")

    if tag.case == 2:
        return _decide_case2(inst, system, tag, scan_cap)

    enc = case4_limit(inst, precision_start)
    if enc.sign < 0:
        horizon = first_nonpositive_umin(inst, 0, scan_cap)
        return _not_positive(inst, case, horizon, rule="negative limit",
                             limit_upper=enc.upper, terms=enc.terms)
    n_star = _case4_threshold(inst, system, enc, precision_start)
    bad = umin_positive_below(inst, n_star)
    if bad is not None:
        return _not_positive(inst, case, bad, rule="positive limit, failing prefix")
    return Verdict("positive", case, None, _jsonable({
        "rule": "positive limit",
        "limit_lower": enc.lower,
        "limit_upper": enc.upper,
        "threshold": n_star,
        "prefix_checked": n_star,
    }))


def _case4_threshold(inst: NlrsInstance, system: SystemView, enc: SignedEnclosure, bits: int) -> int:
    """N* with u^(min)_n > 0 for every n >= N*.

    u^(min)_n >= c + sum_{i} z_i lambda_i^n - eps * S >= L - B r^n, where the
    sum runs over the roots other than 1, B = sum |z_i| and r = max |lambda_i|.
    """
    cf = closed_form(system.zero_control)
    big_b = Fraction(0)
    r_hi = Fraction(0)
    for t in cf.terms():
        if t.root == 1:
            continue
        big_b += t.coefficient.enclose(bits).abs2().sqrt().hi
        r_hi = max(r_hi, t.root.abs2().enclose(bits).re.sqrt().hi)
    if big_b == 0:
        return 0
    if r_hi >= 1:
        raise Unsupported("subdominant modulus not separated from 1")
    margin = enc.lower
    n = 0
    while big_b * r_hi**n >= margin:
        n += 1
    return n


def _decide_case2(inst: NlrsInstance, system: SystemView, tag: CaseTag, scan_cap: int) -> Verdict:
    """Split u^(min) into interleaved LRS beyond the sign-pattern threshold."""
    pattern = ultimate_sign_pattern(system.control)
    if not isinstance(pattern, SignPattern):
        raise AssertionError("Case 2 requires an eventually periodic control sign")
    m = lcm(pattern.period, tag.period)
    n0 = -(-pattern.threshold // m) * m  # rounded up to a multiple of m
    # roots of each interleaved piece: 1 and the m-th powers of the eigenvalues
    am = identity(inst.order)
    for _ in range(m):
        am = mat_mul(am, system.matrix)
    from .exact.poly import Polynomial

    base = charpoly(am).squarefree_part() * Polynomial([-1, 1])
    k = base.degree
    coeffs = tuple(-base.coeff(k - 1 - j) for j in range(k))
    need = n0 + m * (k + 8) + m
    wc = umin_sequence(inst, need)
    witnesses = []
    prefix_bad = next((n for n in range(n0) if wc.values[n] <= 0), None)
    if prefix_bad is not None:
        return _not_positive(inst, "2", prefix_bad, rule="prefix before the sign pattern", period=m)
    pieces = []
    for j in range(m):
        vals = [wc.values[n0 + j + t * m] for t in range(k + 8)]
        piece = LrsSpec(coeffs, tuple(vals[:k]))
        if piece.terms(k + 8) != vals:
            raise AssertionError("interleaved piece does not satisfy its recurrence")
        v = positivity_restricted(piece, scan_cap)
        pieces.append((j, v.outcome, v.reason))
        if v.outcome == "not_positive":
            witnesses.append(n0 + j + v.witness * m)
        elif v.outcome == "unsupported":
            # a repeated root 1 means sum |u^(c)| diverges: u^(min) -> -infinity
            witnesses.append(None)
    if any(w is None for w in witnesses):
        horizon = first_nonpositive_umin(inst, 0, scan_cap)
        return _not_positive(inst, "2", horizon, rule="divergent control sum", period=m,
                             threshold=n0, pieces=pieces)
    if witnesses:
        horizon = min(witnesses)
        # report the earliest violation overall
        earlier = umin_positive_below(inst, horizon)
        if earlier is not None:
            horizon = earlier
        return _not_positive(inst, "2", horizon, rule="interleaved piece not positive", period=m,
                             threshold=n0, pieces=pieces)
    return Verdict("positive", "2", None, _jsonable({
        "rule": "all interleaved pieces positive",
        "period": m,
        "threshold": n0,
        "prefix_checked": n0,
        "pieces": pieces,
    }))
