"""Exception sets of the absolute-value sequence and near-recurrence residuals.

The lab works with u_m = a lambda^m + conj(a lambda^m), a real second-order
LRS with a non-real quadratic root lambda, |lambda| < 1.  For a selected
denominator r the pair lambda^r, conj(lambda)^r gives the exact relation

    u_{m+2r} + a_r u_{m+r} + b_r u_m = 0,  a_r = -(lambda^r + conj), b_r = |lambda|^{2r},

and w_{r,m} = |u_{m+2r}| + a_r |u_{m+r}| + b_r |u_m| measures how far |u|
is from satisfying it.  The exception set collects the m with w != 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ..errors import PreconditionViolated
from ..exact.algebraic import AlgebraicNumber
from ..exact.interval import Interval
from ..exact.numberfield import FieldElement, NumberField
from ..exact.poly import Polynomial
from ..lrs import integer_form
from .cf import RealGenerator, distance_to_integer

log = logging.getLogger(__name__)

PHASE_BITS = 128
ESCALATION_CAP = 512


@dataclass(frozen=True, eq=False)
class Oscillator:
    """u_m = a lambda^m + conj(a lambda^m) with a in Q(lambda)."""

    lam: AlgebraicNumber
    a: FieldElement

    def __post_init__(self):
        if self.lam.degree != 2 or self.lam.is_real():
            raise PreconditionViolated("lambda must be a non-real quadratic number")
        if self.norm >= 1:
            raise PreconditionViolated("need |lambda| < 1")
        if self.a.field.modulus != self.lam.minpoly:
            raise PreconditionViolated("a must live in Q(lambda)")
        if self.a.is_zero():
            raise PreconditionViolated("a must be non-zero")
        if not self.theta.irrational:
            raise PreconditionViolated("lambda / conj(lambda) is a root of unity")

    @classmethod
    def gaussian(cls, lam_re, lam_im, a_re=1, a_im=0) -> Oscillator:
        re, im = Fraction(lam_re), Fraction(lam_im)
        if im <= 0:
            raise PreconditionViolated("use lambda in the upper half-plane")
        lam = AlgebraicNumber.gaussian(re, im)
        field = NumberField(lam.minpoly)
        i_unit = (field.generator() - re) * (1 / im)  # i = (lambda - Re lambda) / Im lambda
        a = field.element(Fraction(a_re)) + i_unit * Fraction(a_im)
        return cls(lam, a)

    @property
    def field(self) -> NumberField:
        return self.a.field

    @property
    def trace(self) -> Fraction:
        return -self.lam.minpoly.coeff(1)

    @property
    def norm(self) -> Fraction:
        return self.lam.minpoly.coeff(0)

    @cached_property
    def theta(self) -> RealGenerator:
        return RealGenerator.argument(self.lam, "theta")

    @cached_property
    def a_value(self) -> AlgebraicNumber:
        return self.field.embed(self.a, self.lam)

    @cached_property
    def psi(self) -> RealGenerator:
        return RealGenerator.argument(self.a_value, "psi")

    def term(self, m: int) -> Fraction:
        """u_m as a trace in Q(lambda), independent of the recurrence."""
        return (self.a * self.field.generator() ** m).trace()

    @cached_property
    def _integer(self):
        b, v, L, K = integer_form((self.trace, -self.norm), (self.term(0), self.term(1)))
        return b, v, L, K

    @property
    def scale(self) -> tuple[int, int]:
        """(K, L) with v_m = K L^m u_m an integer sequence."""
        _, _, L, K = self._integer
        return K, L

    def scaled_terms(self, count: int) -> list[int]:
        b, v, _, _ = self._integer
        while len(v) < count:
            v.append(b[0] * v[-1] + b[1] * v[-2])
        return v[:count]

    def level_coefficients(self, r: int) -> tuple[int, int]:
        """(A, B) = (a_r L^r, b_r L^{2r}), both integers."""
        b, _, L, _ = self._integer
        s_prev, s = 2, b[0]  # L^j (lambda^j + conj), j = 0, 1
        for _ in range(r - 1):
            s_prev, s = s, b[0] * s + b[1] * s_prev
        if r == 0:
            s = 2
        return -s, (-b[1]) ** r

    def level_rationals(self, r: int) -> tuple[Fraction, Fraction]:
        A, B = self.level_coefficients(r)
        _, L = self.scale
        return Fraction(A, L**r), Fraction(B, L ** (2 * r))

    def modulus_interval(self, bits: int = 128) -> Interval:
        return Interval(self.norm, self.norm, bits).sqrt()

    def a_modulus_upper(self, bits: int = 128) -> Fraction:
        return self.a_value.enclose(bits).abs2().sqrt().hi

    def describe(self) -> dict:
        return {"lambda": repr(self.lam), "a": repr(self.a_value)}


def signed_identity_holds(osc: Oscillator, r: int, m: int) -> bool:
    """a lambda^m (lambda^{2r} + a_r lambda^r + b_r) vanishes in Q(lambda).

    Its trace is u_{m+2r} + a_r u_{m+r} + b_r u_m, so the relation is checked
    by field arithmetic rather than by the recurrence itself.
    """
    t = osc.field.generator()
    a_r, b_r = osc.level_rationals(r)
    tr = t**r
    element = osc.a * t**m * (tr * tr + tr * a_r + b_r)
    direct = osc.term(m + 2 * r) + a_r * osc.term(m + r) + b_r * osc.term(m)
    return element.is_zero() and direct == 0


# -- exception sets ----------------------------------------------------------------------


FORMS = ("+2u[m+2r]", "-2u[m+2r]", "+2b*u[m]", "-2b*u[m]")


@dataclass(frozen=True)
class DeltaMember:
    m: int
    signs: tuple[int, int, int]  # signs of u_m, u_{m+r}, u_{m+2r}
    w: Interval  # enclosure of w_{r,m} (the exact value is known to be non-zero)
    forms: tuple[str, ...]  # which of +-2u_{m+2r}, +-2b u_m equal w exactly
    phase: Interval  # {m theta + psi}

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "signs": list(self.signs),
            "w": [_sci(self.w.lo, -1), _sci(self.w.hi, 1)],
            "forms": list(self.forms),
            "phase": [float(self.phase.lo), float(self.phase.hi)],
        }


@dataclass
class DeltaRecord:
    level: int
    r: int
    m_max: int
    mirrored: bool
    eta: Interval  # ||r theta||
    members: list[DeltaMember] = field(default_factory=list)
    zero_excluded: list[int] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)  # phase test undecided after escalation
    disagreements: list[int] = field(default_factory=list)
    nonmember_pattern_failures: list[int] = field(default_factory=list)
    escalated: int = 0
    bits: int = PHASE_BITS

    @property
    def member_indices(self) -> list[int]:
        return [x.m for x in self.members]

    @property
    def consistent(self) -> bool:
        return not (self.disagreements or self.flagged or self.nonmember_pattern_failures)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "r": self.r,
            "m_max": self.m_max,
            "mirrored": self.mirrored,
            "eta": [float(self.eta.lo), float(self.eta.hi)],
            "member_count": len(self.members),
            "members": [x.to_json() for x in self.members],
            "zero_excluded": self.zero_excluded,
            "flagged": self.flagged,
            "disagreements": self.disagreements,
            "nonmember_pattern_failures": self.nonmember_pattern_failures,
            "escalated": self.escalated,
            "consistent": self.consistent,
        }


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _ratio_interval(num: int, den: int, bits: int = 64) -> Interval:
    """Enclosure of num/den with about ``bits`` significant bits."""
    if num == 0:
        return Interval(Fraction(0))
    shift = bits - (abs(num).bit_length() - den.bit_length())
    if shift >= 0:
        q = (num << shift) // den
        return Interval(Fraction(q, 1 << shift), Fraction(q + 1, 1 << shift), bits)
    q = num // (den << -shift)
    return Interval(Fraction(q << -shift), Fraction((q + 1) << -shift), bits)


class _Phases:
    """Enclosures of {m theta + psi} and of ||r theta|| at one precision."""

    def __init__(self, osc: Oscillator, bits: int):
        self.bits = bits
        self.theta = osc.theta.enclosure(bits)
        self.psi = osc.psi.enclosure(bits)

    def phase(self, m: int) -> Interval:
        return self.theta * m + self.psi

    def eta(self, r: int) -> tuple[Interval, bool]:
        x = self.theta * r
        k = math.floor(x.lo)
        mirrored = x.lo - k > Fraction(1, 2)
        return distance_to_integer(x), mirrored


def _in_window(phase: Interval, start: Interval, width: Interval) -> bool | None:
    """Whether phase - start lies in the open window (0, width) modulo 1."""
    y = phase - start
    k = math.floor(y.lo)
    if math.floor(y.hi) != k:
        return None
    lo, hi = y.lo - k, y.hi - k
    if lo > 0 and hi < width.lo:
        return True
    if lo >= width.hi or hi <= 0:
        return False
    return None


def in_exception_window(phase: Interval, eta: Interval, mirrored: bool) -> bool | None:
    """Phase test: (1/4 - 2 eta, 1/4) u (3/4 - 2 eta, 3/4) modulo 1, or the
    mirrored windows (1/4, 1/4 + 2 eta) u (3/4, 3/4 + 2 eta)."""
    width = eta * 2
    results = []
    for c in (Fraction(1, 4), Fraction(3, 4)):
        start = Interval(c, c, eta.prec) if mirrored else c - width
        results.append(_in_window(phase, start, width))
    if any(x is True for x in results):
        return True
    if all(x is False for x in results):
        return False
    return None


def enumerate_delta(osc: Oscillator, r: int, m_max: int, level: int = 0,
                    bits: int = PHASE_BITS, escalation_cap: int = ESCALATION_CAP) -> DeltaRecord:
    """Scan 0 <= m <= m_max and compare the three membership criteria.

    w != 0 and the mixed-sign test are exact (integer arithmetic on
    v_m = K L^m u_m); the phase test uses interval enclosures and escalates
    precision on undecided points, flagging those still undecided at the cap.
    """
    for m in (0, 1, m_max):
        if not signed_identity_holds(osc, r, m):
            raise AssertionError(f"signed relation fails at r={r}, m={m}")
    v = osc.scaled_terms(m_max + 2 * r + 1)
    A, B = osc.level_coefficients(r)
    K, L = osc.scale
    phases = _Phases(osc, bits)
    eta, mirrored = phases.eta(r)
    record = DeltaRecord(level, r, m_max, mirrored, eta, bits=bits)
    finer: dict[int, _Phases] = {}
    for m in range(m_max + 1):
        x0, x1, x2 = v[m], v[m + r], v[m + 2 * r]
        if x0 == 0 or x1 == 0 or x2 == 0:
            record.zero_excluded.append(m)
            log.info("zero term near m=%d at r=%d excluded", m, r)
            continue
        big_w = abs(x2) + A * abs(x1) + B * abs(x0)
        signs = (_sign(x0), _sign(x1), _sign(x2))
        mixed = len(set(signs)) > 1
        phase = phases.phase(m)
        in_j = in_exception_window(phase, eta, mirrored)
        b = bits
        while in_j is None and b < escalation_cap:
            b *= 2
            record.escalated += 1
            if b not in finer:
                finer[b] = _Phases(osc, b)
            eta_b, _ = finer[b].eta(r)
            phase = finer[b].phase(m)
            in_j = in_exception_window(phase, eta_b, mirrored)
        if in_j is None:
            record.flagged.append(m)
        member = big_w != 0
        if in_j is not None and not (member == mixed == in_j):
            record.disagreements.append(m)
        if not member:
            if mixed:
                record.nonmember_pattern_failures.append(m)
            continue
        forms = tuple(
            name
            for name, value in zip(FORMS, (2 * x2, -2 * x2, 2 * B * x0, -2 * B * x0))
            if big_w == value
        )
        den = K * L ** (m + 2 * r)
        record.members.append(DeltaMember(m, signs, _ratio_interval(big_w, den), forms,
                                          _frac(phase)))
    return record


def _frac(x: Interval) -> Interval:
    k = math.floor(x.lo)
    return Interval(x.lo - k, x.hi - k, x.prec)


# -- gap statistics ------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelGaps:
    level: int
    r: int
    members: int
    first: int | None
    mu: int | None  # minimum consecutive gap, needs two members
    mu_over_r: float | None


@dataclass(frozen=True)
class GapStats:
    levels: tuple[LevelGaps, ...]
    c1_fit: float | None  # least-squares slope of log(m_j / j) on log r
    c1_needed: float | None  # smallest c with m_j <= j r^c everywhere (levels with r > 1)
    fit_coverage: float | None  # share of (n, j) with m_j <= j r^{c1_fit}
    first_nondecreasing: bool
    min_mu_over_r: float | None

    def to_json(self) -> dict:
        return {
            "levels": [lv.__dict__ for lv in self.levels],
            "c1_fit": self.c1_fit,
            "c1_needed": self.c1_needed,
            "fit_coverage": self.fit_coverage,
            "first_nondecreasing": self.first_nondecreasing,
            "min_mu_over_r": self.min_mu_over_r,
        }


def gap_report(records: list[DeltaRecord]) -> GapStats:
    if len(records) < 2:
        raise PreconditionViolated("gap statistics need at least two levels")
    levels = []
    points = []
    for rec in sorted(records, key=lambda x: x.r):
        ms = rec.member_indices
        gaps = [b - a for a, b in zip(ms, ms[1:])]
        mu = min(gaps) if gaps else None
        levels.append(LevelGaps(rec.level, rec.r, len(ms), ms[0] if ms else None, mu,
                                mu / rec.r if mu is not None else None))
        if rec.r > 1:
            points.extend((math.log(rec.r), math.log(m / j)) for j, m in enumerate(ms, 1) if m >= j)
    c1_fit = c1_needed = coverage = None
    if points:
        sxx = sum(x * x for x, _ in points)
        c1_fit = sum(x * y for x, y in points) / sxx
        c1_needed = max(y / x for x, y in points)
        coverage = sum(1 for x, y in points if y <= c1_fit * x + 1e-12) / len(points)
    firsts = [lv.first for lv in levels if lv.first is not None]
    ratios = [lv.mu_over_r for lv in levels if lv.mu_over_r is not None]
    return GapStats(
        tuple(levels),
        c1_fit,
        c1_needed,
        coverage,
        all(a <= b for a, b in zip(firsts, firsts[1:])),
        min(ratios) if ratios else None,
    )


# -- residuals ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    level: int
    r: int
    delta: int
    alpha: Interval  # sum_m |u_m|
    nu: Fraction
    residual_lo: Fraction
    residual_hi: Fraction
    bound: Interval  # |lambda|^{2r + m_{delta+1}}
    exponent: int  # 2r + m_{delta+1}
    terms: int  # exact terms in the partial sum of alpha
    constant: Fraction | None = None  # suite-wide C, once fitted

    @property
    def ratio(self) -> float:
        """residual upper end over the reference bound (log-domain safe)."""
        return math.exp(_log(self.residual_hi) - _log(self.bound.lo)) if self.residual_hi else 0.0

    @property
    def log2_residual(self) -> float:
        return _log(self.residual_hi) / math.log(2) if self.residual_hi else -math.inf

    def within(self, constant) -> bool:
        return self.residual_hi <= Fraction(constant) * self.bound.lo

    def to_json(self) -> dict:
        out = {
            "level": self.level,
            "r": self.r,
            "delta": self.delta,
            "alpha": [_sci(self.alpha.lo, -1), _sci(self.alpha.hi, 1)],
            "nu": _sci(self.nu, 0),
            "residual": [_sci(self.residual_lo, -1), _sci(self.residual_hi, 1)],
            "bound": [_sci(self.bound.lo, -1), _sci(self.bound.hi, 1)],
            "exponent": self.exponent,
            "terms": self.terms,
            "ratio": self.ratio,
        }
        if self.constant is not None:
            out["C"] = str(self.constant)
            out["within_C"] = self.within(self.constant)
        return out


def _log(x: Fraction) -> float:
    x = abs(Fraction(x))
    return math.log(x.numerator) - math.log(x.denominator)


def _sci(x: Fraction, direction: int, digits: int = 12) -> str:
    """Decimal rendering of a rational, rounded down (-1), up (+1) or to nearest (0)."""
    x = Fraction(x)
    if x == 0:
        return "0"
    neg = x < 0
    mag = -x if neg else x
    e10 = math.floor(_log(mag) / math.log(10))
    scaled = mag / Fraction(10) ** (e10 - digits + 1)
    # rounding direction of the magnitude depends on the sign
    d = direction * (-1 if neg else 1)
    n = math.floor(scaled) if d < 0 else math.ceil(scaled) if d > 0 else round(scaled)
    if n >= 10**digits:
        n //= 10
        e10 += 1
    s = str(n)
    body = f"{s[0]}.{s[1:]}e{e10:+d}"
    return "-" + body if neg else body


def _abs_partial_sum(v: list[int], count: int, K: int, L: int) -> Fraction:
    """sum_{m<count} |u_m| from v_m = K L^m u_m, by integer Horner."""
    acc = 0
    for m in range(count):
        acc = acc * L + abs(v[m])
    return Fraction(acc, K * L ** (count - 1)) if count else Fraction(0)


class _AlphaCache:
    def __init__(self, osc: Oscillator):
        self.osc = osc
        self.entries: dict[int, Fraction] = {}

    def partial(self, count: int) -> Fraction:
        if count not in self.entries:
            K, L = self.osc.scale
            self.entries[count] = _abs_partial_sum(self.osc.scaled_terms(count), count, K, L)
        return self.entries[count]


def _tail_upper(osc: Oscillator, count: int, bits: int = 128) -> Fraction:
    lam_hi = osc.modulus_interval(bits).hi
    return 2 * osc.a_modulus_upper(bits) * lam_hi**count / (1 - lam_hi)


def _bound(osc: Oscillator, exponent: int, bits: int = 128) -> Interval:
    n = osc.norm
    if exponent % 2 == 0:
        q = n ** (exponent // 2)
        return Interval(q, q, bits)
    return osc.modulus_interval(bits) * n ** (exponent // 2)


def _terms_for(osc: Oscillator, exponent: int, bits: int = 128, slack_bits: int = 40) -> int:
    """Partial-sum length whose tail sits well below |lambda|^exponent."""
    lam_hi = float(osc.modulus_interval(bits).hi)
    per_term = -math.log2(lam_hi)
    extra = math.log2(max(2 * float(osc.a_modulus_upper(bits)) / (1 - lam_hi), 1.0)) + 4
    count = exponent + math.ceil((slack_bits + extra) / per_term) + 1
    target = _bound(osc, exponent, bits).lo / (1 << slack_bits)
    while _tail_upper(osc, count, bits) * 4 > target:
        count += max(8, count // 8)
    return count


def near_recurrence_residual(osc: Oscillator, record: DeltaRecord, delta: int,
                             bits: int = 128, _alpha: _AlphaCache | None = None) -> ResidualReport:
    """Enclose |alpha (1 + a_r + b_r) - nu_r - sum_{j<=delta} w_{r,m_j}|.

    alpha = sum |u_m| is an exact partial sum plus the tail bound
    2|a| |lambda|^N / (1 - |lambda|); nu_r = sum_{m<2r} |u_m| + a_r sum_{m<r} |u_m|.
    The residual telescopes to |sum_{j>delta} w_{r,m_j}|.
    """
    ms = record.member_indices
    if len(ms) < delta + 1:
        raise PreconditionViolated(f"level r={record.r} has {len(ms)} members, need {delta + 1}")
    r = record.r
    a_r, b_r = osc.level_rationals(r)
    K, L = osc.scale
    exponent = 2 * r + ms[delta]
    count = _terms_for(osc, exponent, bits)
    cache = _alpha or _AlphaCache(osc)
    partial = cache.partial(count)
    tail = _tail_upper(osc, count, bits)
    nu = cache.partial(2 * r) + a_r * cache.partial(r)
    v = osc.scaled_terms(max(count, ms[delta] + 2 * r + 1))
    A, B = osc.level_coefficients(r)
    w_sum = sum(
        (Fraction(abs(v[m + 2 * r]) + A * abs(v[m + r]) + B * abs(v[m]), K * L ** (m + 2 * r))
         for m in ms[:delta]),
        Fraction(0),
    )
    factor = 1 + a_r + b_r
    if factor <= 0:
        raise AssertionError("1 + a_r + b_r must be positive")
    lo = partial * factor - nu - w_sum
    hi = lo + tail * factor
    if lo > 0:
        res_lo, res_hi = lo, hi
    elif hi < 0:
        res_lo, res_hi = -hi, -lo
    else:
        res_lo, res_hi = Fraction(0), max(-lo, hi)
    return ResidualReport(
        record.level, r, delta, Interval(partial, partial + tail, bits), nu,
        res_lo, res_hi, _bound(osc, exponent, bits), exponent, count,
    )


def theoretical_constant(osc: Oscillator, bits: int = 128) -> Fraction:
    """4|a| / (1 - |lambda|): each |w| is at most 4|a||lambda|^{m+2r}."""
    lam_hi = osc.modulus_interval(bits).hi
    return 4 * osc.a_modulus_upper(bits) / (1 - lam_hi)


def fit_constant(reports: list[ResidualReport]) -> Fraction:
    """Smallest single C with residual_hi <= C * bound at every report."""
    return max(rep.residual_hi / rep.bound.lo for rep in reports)


def residual_curve(osc: Oscillator, record: DeltaRecord, max_delta: int | None = None,
                   bits: int = 128) -> list[ResidualReport]:
    """Residual reports for delta = 0, 1, ... (one per member)."""
    count = len(record.members) if max_delta is None else min(max_delta + 1, len(record.members))
    cache = _AlphaCache(osc)
    return [near_recurrence_residual(osc, record, d, bits, cache) for d in range(count)]


def direct_tail_sum(osc: Oscillator, record: DeltaRecord, delta: int, bits: int = 128) -> Interval:
    """sum_{j>delta} w_{r,m_j} over the scanned members plus a bound for m > m_max."""
    ms = record.member_indices[delta:]
    r = record.r
    K, L = osc.scale
    v = osc.scaled_terms(record.m_max + 2 * r + 1)
    A, B = osc.level_coefficients(r)
    total = sum(
        (Fraction(abs(v[m + 2 * r]) + A * abs(v[m + r]) + B * abs(v[m]), K * L ** (m + 2 * r))
         for m in ms),
        Fraction(0),
    )
    lam_hi = osc.modulus_interval(bits).hi
    beyond = 4 * osc.a_modulus_upper(bits) * lam_hi ** (record.m_max + 1 + 2 * r) / (1 - lam_hi)
    return Interval(total - beyond, total + beyond, bits)


# -- export ---------------------------------------------------------------------------------

CSV_COLUMNS = ("level", "r_n", "j", "m_nj", "residual_lo", "residual_hi", "bound")


def residual_rows(curves: list[list[ResidualReport]], records: list[DeltaRecord]) -> list[tuple]:
    """CSV rows: row j of a level pairs m_{n,j} with the residual for delta = j - 1."""
    rows = []
    by_level = {rec.level: rec for rec in records}
    for curve in curves:
        for rep in curve:
            rec = by_level[rep.level]
            j = rep.delta + 1
            rows.append((rep.level, rep.r, j, rec.member_indices[rep.delta],
                         _sci(rep.residual_lo, -1), _sci(rep.residual_hi, 1), _sci(rep.bound.hi, 1)))
    return rows


def member_rows(records: list[DeltaRecord]) -> list[tuple]:
    rows = []
    for rec in records:
        for j, mem in enumerate(rec.members, 1):
            rows.append((rec.level, rec.r, j, mem.m, "", "", ""))
    return rows
