"""Continued fractions of certified reals and the selected denominators r_n."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Callable

from ..errors import InsufficientExpansion, PrecisionCapExceeded, PreconditionViolated
from ..exact.algebraic import PRECISION_CAP, AlgebraicNumber
from ..exact.interval import Interval, arg_turns_of

START_BITS = 64


@dataclass(frozen=True)
class RealGenerator:
    """A real number known only through enclosures of any requested width.

    ``irrational`` is asserted by the caller; expansions trust it and fail
    with PrecisionCapExceeded when it was wrong.
    """

    source: Callable[[int], Interval] = field(repr=False)
    irrational: bool
    label: str = ""

    def enclosure(self, bits: int) -> Interval:
        """Enclosure of width at most 2^-bits."""
        request = bits + 8
        target = Fraction(1, 1 << bits)
        while True:
            iv = self.source(request)
            if iv.width <= target:
                return iv
            request *= 2
            if request > PRECISION_CAP:
                raise PrecisionCapExceeded(f"cannot enclose {self.label} to {bits} bits", best=iv)

    @classmethod
    def rational(cls, q) -> RealGenerator:
        q = Fraction(q)
        return cls(lambda bits: Interval(q, q, bits), False, str(q))

    @classmethod
    def algebraic(cls, x: AlgebraicNumber, label: str = "") -> RealGenerator:
        if not x.is_real():
            raise PreconditionViolated("generator needs a real number")
        return cls(lambda bits: x.enclose(bits).re, not x.is_rational(), label or repr(x))

    @classmethod
    def argument(cls, z: AlgebraicNumber, label: str = "") -> RealGenerator:
        """arg(z)/2 pi normalised to [0, 1).

        Irrational exactly when z/conj(z) is not a root of unity, which the
        caller certifies.
        """
        if z.is_real():
            if z.is_zero():
                raise PreconditionViolated("zero has no argument")
            return cls.rational(0 if z.real_sign() > 0 else Fraction(1, 2))

        def source(bits: int) -> Interval:
            b = bits
            while True:
                turns = arg_turns_of(z.enclose(b))
                if turns.hi <= 0:
                    turns = turns + 1
                if 0 <= turns.lo and turns.hi < 1:
                    return turns
                b *= 2
                if b > PRECISION_CAP:
                    raise PrecisionCapExceeded("argument straddles the branch cut")

        from ..exact.algebraic import root_of_unity_order

        irrational = root_of_unity_order(z / z.conj()) is None
        return cls(source, irrational, label or f"arg({z!r})")


def distance_to_integer(x: Interval) -> Interval:
    """Enclosure of ||x||, the distance to the nearest integer."""
    k = round(x.mid)
    lo, hi = x.lo - k, x.hi - k
    if lo >= 0:
        return Interval(lo, min(hi, Fraction(1, 2)), x.prec)
    if hi <= 0:
        return Interval(-hi, min(-lo, Fraction(1, 2)), x.prec)
    return Interval(Fraction(0), max(-lo, hi), x.prec)


# -- expansion -------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    """theta = [0; a_1, a_2, ...] with convergents p_i/q_i, i = 0..k (p_0/q_0 = 0/1)."""

    quotients: tuple[int, ...]  # a_1..a_k
    numerators: tuple[int, ...]  # p_0..p_k
    denominators: tuple[int, ...]  # q_0..q_k
    theta: RealGenerator = field(repr=False, compare=False)
    bits_used: int = 0

    def a(self, i: int) -> int:
        """The 1-indexed partial quotient a_i."""
        if i < 1:
            raise IndexError("partial quotients start at a_1")
        return self.quotients[i - 1]

    def convergent(self, i: int) -> Fraction:
        return Fraction(self.numerators[i], self.denominators[i])

    def __len__(self) -> int:
        return len(self.quotients)


def _floor_expansion(x: Fraction, count: int) -> list[int]:
    """Partial quotients of a rational in (0, 1) until it terminates or count is reached."""
    out = []
    while x != 0 and len(out) < count:
        inv = 1 / x
        a = floor(inv)
        out.append(a)
        x = inv - a
    return out


def convergents(quotients) -> tuple[list[int], list[int]]:
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    ps, qs = [p], [q]
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        ps.append(p)
        qs.append(q)
    return ps, qs


def cf_expand(theta: RealGenerator, count: int, start_bits: int = START_BITS,
              cap: int = PRECISION_CAP) -> ContinuedFractionExpansion:
    """First ``count`` partial quotients of theta in (0, 1).

    Quotients shared by the floor expansions of both enclosure endpoints are
    certified: the set of reals with given leading quotients is an interval.
    """
    if not theta.irrational:
        raise PreconditionViolated("theta must be irrational (its expansion would terminate)")
    bits = start_bits
    while True:
        iv = theta.enclosure(bits)
        if iv.lo <= 0 or iv.hi >= 1:
            if iv.hi <= 0 or iv.lo >= 1:
                raise PreconditionViolated("theta must lie in (0, 1)")
        else:
            lo = _floor_expansion(iv.lo, count)
            hi = _floor_expansion(iv.hi, count)
            common = []
            for x, y in zip(lo, hi):
                if x != y:
                    break
                common.append(x)
            if len(common) >= count:
                ps, qs = convergents(common)
                return ContinuedFractionExpansion(tuple(common), tuple(ps), tuple(qs), theta, bits)
        bits *= 2
        if bits > cap:
            raise PrecisionCapExceeded(f"only part of {count} quotients determined below the cap")


# -- convergent facts --------------------------------------------------------------------


@dataclass
class ConvergentReport:
    bounds: list[tuple[int, bool]] = field(default_factory=list)  # (i, two-sided bound holds)
    alternation: list[tuple[int, int]] = field(default_factory=list)  # (i, sign of q_i theta - p_i)
    records: list[int] = field(default_factory=list)  # q with ||q theta|| below every smaller q
    expected_records: list[int] = field(default_factory=list)
    undetermined: int = 0
    bits: int = 0

    @property
    def bounds_ok(self) -> bool:
        return all(ok for _, ok in self.bounds)

    @property
    def alternation_ok(self) -> bool:
        return all(s == (-1) ** i for i, s in self.alternation)

    @property
    def best_approximation_ok(self) -> bool:
        return self.records == self.expected_records

    @property
    def ok(self) -> bool:
        return self.bounds_ok and self.alternation_ok and self.best_approximation_ok and not self.undetermined

    def to_json(self) -> dict:
        return {
            "bounds": [{"i": i, "holds": ok} for i, ok in self.bounds],
            "alternation": [{"i": i, "sign": s} for i, s in self.alternation],
            "records": self.records,
            "expected_records": self.expected_records,
            "undetermined": self.undetermined,
            "bits": self.bits,
            "ok": self.ok,
        }


def _record_scan(theta_iv: Interval, bound: int) -> list[int] | None:
    """Record minima of ||q theta|| for 1 <= q < bound; None on an undecided comparison."""
    records = []
    best = None
    for q in range(1, bound):
        d = distance_to_integer(theta_iv * q)
        if best is None or d.hi < best.lo:
            records.append(q)
            best = d
        elif not d.lo > best.hi:
            return None
    return records


def verify_convergent_facts(cfe: ContinuedFractionExpansion, count: int | None = None,
                            scan_bound: int = 10_000, start_bits: int = 128,
                            cap: int = 4096) -> ConvergentReport:
    """Check the two-sided error bounds, sign alternation and best approximation.

    For i with a_{i+1} known: 1/((a_{i+1}+2) q_i) < |q_i theta - p_i| < 1/(a_{i+1} q_i),
    and q_i theta - p_i has sign (-1)^i.  The records of ||q theta|| over
    q < scan_bound must be exactly the convergent denominators.
    """
    count = len(cfe) if count is None else min(count, len(cfe))
    bits = start_bits
    while True:
        report = ConvergentReport(bits=bits)
        th = cfe.theta.enclosure(bits)
        for i in range(count):
            p, q = cfe.numerators[i], cfe.denominators[i]
            a_next = cfe.a(i + 1)
            err = th * q - p
            s = err.sign()
            mag = abs(err)
            lower = Fraction(1, (a_next + 2) * q)
            upper = Fraction(1, a_next * q)
            if s is None or not (mag.lo > lower or mag.hi <= lower) or not (mag.hi < upper or mag.lo >= upper):
                report.undetermined += 1
                continue
            report.bounds.append((i, mag.lo > lower and mag.hi < upper))
            report.alternation.append((i, s))
        records = _record_scan(th, scan_bound)
        if records is None:
            report.undetermined += 1
        else:
            report.records = records
        if not report.undetermined or bits >= cap:
            break
        bits *= 2
    expected = sorted({q for q in cfe.denominators if 1 <= q < scan_bound})
    if expected and max(cfe.denominators) < scan_bound:
        # the expansion must reach past the scan for the comparison to be complete
        report.records = [q for q in report.records if q <= max(cfe.denominators)]
    report.expected_records = expected
    return report


# -- selection sequence ------------------------------------------------------------------


@dataclass(frozen=True)
class SelectionSequence:
    indices: tuple[int, ...]  # l_1 < l_2 < ...
    denominators: tuple[int, ...]  # r_n = q_{l_n}
    parity: int  # 0 even, 1 odd
    mirrored: bool  # True when ||r_n theta|| = 1 - {r_n theta}
    eps_sel: Fraction
    branch: str  # "bounded" | "unbounded"
    trimmed: int  # leading indices dropped for ||r theta|| >= 1/4
    record_positions: tuple[int, ...] = ()  # positions j of record quotients a_j (unbounded branch)

    def to_json(self) -> dict:
        return {
            "indices": list(self.indices),
            "r": list(self.denominators),
            "parity": "even" if self.parity == 0 else "odd",
            "mirrored": self.mirrored,
            "eps_sel": str(self.eps_sel),
            "branch": self.branch,
            "trimmed": self.trimmed,
            "record_positions": list(self.record_positions),
        }


MIN_RECORDS = 3


def _quotient_records(quotients) -> list[int]:
    """Positions j >= 2 with a_j strictly above every earlier quotient."""
    out = []
    best = quotients[0]
    for j in range(2, len(quotients) + 1):
        if quotients[j - 1] > best:
            out.append(j)
            best = quotients[j - 1]
    return out


def select_r(cfe: ContinuedFractionExpansion, bits: int = 128) -> SelectionSequence:
    """Pick convergent indices l_n of one parity and the denominators r_n = q_{l_n}.

    Bounded-looking windows use the even indices.  When one parity carries at
    least three strict quotient records (a_j above everything before it),
    the window is treated as unbounded and l = j - 1 for those records, so
    a_{l+1} dominates a_m for every m <= l.  This is a heuristic on finitely
    many quotients; it cannot certify unboundedness.
    """
    k = len(cfe)
    if k < 4:
        raise InsufficientExpansion("need at least four partial quotients")
    quotients = cfe.quotients
    records = _quotient_records(quotients)
    by_parity = {0: [j for j in records if j % 2 == 0], 1: [j for j in records if j % 2 == 1]}
    chosen_parity = max((1, 0), key=lambda p: len(by_parity[p]))
    if len(by_parity[chosen_parity]) >= MIN_RECORDS:
        branch = "unbounded"
        positions = tuple(by_parity[chosen_parity])
        candidates = [j - 1 for j in positions]
    else:
        branch = "bounded"
        positions = ()
        candidates = list(range(0, k, 2))  # need a_{l+1}, so l <= k - 1
    th = cfe.theta.enclosure(bits)
    kept = []
    trimmed = 0
    for ell in candidates:
        d = distance_to_integer(th * cfe.denominators[ell])
        if not kept:
            if d.hi < Fraction(1, 4):
                kept.append(ell)
            else:
                trimmed += 1
        else:
            kept.append(ell)
    if not kept:
        raise InsufficientExpansion("no selected denominator with ||r theta|| < 1/4")
    parity = kept[0] % 2
    eps_sel = min(
        Fraction(cfe.a(ell + 1), cfe.a(m + 1) + 2)
        for ell in kept
        for m in range(ell + 1)
    )
    return SelectionSequence(
        tuple(kept),
        tuple(cfe.denominators[ell] for ell in kept),
        parity,
        parity == 1,
        eps_sel,
        branch,
        trimmed,
        positions,
    )


# -- Diophantine lower bound ----------------------------------------------------------------


@dataclass
class DiophantineReport:
    checked: int = 0
    triggering: list[tuple[int, int, Fraction]] = field(default_factory=list)  # (level, q, c)
    violations: list[tuple[int, int, Fraction]] = field(default_factory=list)
    min_scaled_ratio: Fraction | None = None  # min of c * q / r_n over triggering pairs
    undetermined: int = 0
    eps_sel: Fraction = Fraction(0)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.undetermined

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "triggering": len(self.triggering),
            "violations": [[n, q, str(c)] for n, q, c in self.violations],
            "min_scaled_ratio": None if self.min_scaled_ratio is None else str(self.min_scaled_ratio),
            "eps_sel": str(self.eps_sel),
            "undetermined": self.undetermined,
            "ok": self.ok,
        }


DEFAULT_SCALES = (Fraction(1, 2), Fraction(1), Fraction(2))


def triggering_q(cfe: ContinuedFractionExpansion, r: int, scale, bits: int = 128) -> list[int]:
    """All 1 <= q < r with ||q theta|| < scale * ||r theta||."""
    th = cfe.theta.enclosure(bits)
    ref = distance_to_integer(th * r) * Fraction(scale)
    out = []
    for q in range(1, r):
        d = distance_to_integer(th * q)
        if d.hi < ref.lo:
            out.append(q)
        elif d.lo < ref.hi:
            raise PrecisionCapExceeded(f"comparison at q={q} undecided at {bits} bits")
    return out


def check_prop_dio(cfe: ContinuedFractionExpansion, sel: SelectionSequence, trials: int = 10_000,
                   seed: int = 0, scales=DEFAULT_SCALES, exhaustive_limit: int = 2_000,
                   bits: int = 256) -> DiophantineReport:
    """For 1 <= q < r_n with ||q theta|| < c ||r_n theta||, check q >= (eps_sel / c) r_n.

    Levels with r_n up to ``exhaustive_limit`` are scanned completely, then
    ``trials`` random (level, q) pairs are drawn with a seeded generator.
    q = 0 is the degenerate exclusion and never tested.
    """
    rng = random.Random(seed)
    th = cfe.theta.enclosure(bits)
    report = DiophantineReport(eps_sel=sel.eps_sel)
    refs = [distance_to_integer(th * r) for r in sel.denominators]

    def test(level: int, q: int) -> None:
        r = sel.denominators[level]
        d = distance_to_integer(th * q)
        for c in scales:
            c = Fraction(c)
            ref = refs[level] * c
            report.checked += 1
            if d.hi < ref.lo:
                report.triggering.append((level + 1, q, c))
                ratio = c * Fraction(q, r)
                if report.min_scaled_ratio is None or ratio < report.min_scaled_ratio:
                    report.min_scaled_ratio = ratio
                if q * c < sel.eps_sel * r:
                    report.violations.append((level + 1, q, c))
            elif d.lo < ref.hi:
                report.undetermined += 1

    for level, r in enumerate(sel.denominators):
        if r <= exhaustive_limit:
            for q in range(1, r):
                test(level, q)
    eligible = [i for i, r in enumerate(sel.denominators) if r > 1]
    for _ in range(trials if eligible else 0):
        level = rng.choice(eligible)
        test(level, rng.randrange(1, sel.denominators[level]))
    return report
