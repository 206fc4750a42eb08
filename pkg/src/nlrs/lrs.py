"""Linear recurrence sequences: closed forms, sign patterns, positivity.

The supported fragment for decisions is: simple characteristic roots, all
of modulus at most one, order at most four.  Everything outside it is
reported as ``Unsupported`` rather than guessed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

from .errors import PreconditionViolated, Unsupported, PrecisionCapExceeded
from .exact.algebraic import (
    PRECISION_CAP,
    AlgebraicNumber,
    isolate_roots,
    nth_power_positive_real_order,
)
from .exact.interval import Interval
from .exact.linalg import charpoly, companion, identity, mat_mul, solve
from .exact.numberfield import FieldElement, NumberField
from .exact.poly import Polynomial, inverse_mod
from .exact.rational import parse_rational

log = logging.getLogger(__name__)

DEFAULT_SCAN_CAP = 10**7
MAX_ORDER = 4


@dataclass(frozen=True)
class LrsSpec:
    """u_{n+d} = a_0 u_{n+d-1} + ... + a_{d-1} u_n with given u_0..u_{d-1}."""

    coefficients: tuple[Fraction, ...]
    initial: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(parse_rational(c) for c in self.coefficients))
        object.__setattr__(self, "initial", tuple(parse_rational(c) for c in self.initial))
        if not self.coefficients:
            raise PreconditionViolated("order must be at least 1")
        if len(self.coefficients) != len(self.initial):
            raise PreconditionViolated("coefficient and initial-value lengths differ")
        if self.coefficients[-1] == 0:
            raise PreconditionViolated("trailing recurrence coefficient must be non-zero")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def charpoly(self) -> Polynomial:
        d = self.order
        return Polynomial([-self.coefficients[d - 1 - k] for k in range(d)] + [1])

    def terms(self, count: int) -> list[Fraction]:
        vals = list(self.initial[:count])
        d = self.order
        while len(vals) < count:
            vals.append(sum((a * vals[-1 - j] for j, a in enumerate(self.coefficients)), Fraction(0)))
        return vals

    def term(self, n: int) -> Fraction:
        """u_n by companion-matrix powering (cheap for large n)."""
        d = self.order
        if n < d:
            return self.initial[n]
        # state (u_{k+d-1}, ..., u_k); A maps state_k to state_{k+1}
        a = [list(self.coefficients)] + [[Fraction(int(j == i)) for j in range(d)] for i in range(d - 1)]
        p = identity(d)
        base = a
        k = n - d + 1
        while k:
            if k & 1:
                p = mat_mul(p, base)
            base = mat_mul(base, base)
            k >>= 1
        state = list(reversed(self.initial))
        return sum((p[0][j] * state[j] for j in range(d)), Fraction(0))

    def subsequence(self, start: int, step: int) -> LrsSpec:
        """The LRS n -> u_{start + n*step}; roots are the step-th powers."""
        c = companion(self.charpoly())
        cm = identity(self.order)
        for _ in range(step):
            cm = mat_mul(cm, c)
        q = charpoly(cm).squarefree_part()
        k = q.degree
        init = [self.term(start + t * step) for t in range(k)]
        coeffs = [-q.coeff(k - 1 - j) for j in range(k)]
        return LrsSpec(tuple(coeffs), tuple(init))


def integer_form(coefficients: Sequence[Fraction], initial: Sequence[Fraction]):
    """Integer recurrence v_{n+d} = sum b_j v_{n+d-1-j} with v_n = K L^n u_n.

    Signs of v and u agree, and integer arithmetic avoids gcd work in long
    scans.
    """
    L = lcm(*(Fraction(a).denominator for a in coefficients))
    b = [int(Fraction(a) * L ** (j + 1)) for j, a in enumerate(coefficients)]
    scaled = [Fraction(u) * L**i for i, u in enumerate(initial)]
    K = lcm(*(s.denominator for s in scaled)) if scaled else 1
    v = [int(s * K) for s in scaled]
    return b, v, L, K


def iterate_signs(lrs: LrsSpec) -> Iterator[int]:
    """sign(u_0), sign(u_1), ... computed with exact integers."""
    b, v, _, _ = integer_form(lrs.coefficients, lrs.initial)
    d = len(b)
    window = list(v)
    for x in window:
        yield (x > 0) - (x < 0)
    while True:
        nxt = 0
        for j in range(d):
            nxt += b[j] * window[-1 - j]
        window.append(nxt)
        del window[0]
        # remove a common power of two now and then to keep sizes down
        yield (nxt > 0) - (nxt < 0)


def scan_nonpositive(lrs: LrsSpec, start: int = 0, cap: int = DEFAULT_SCAN_CAP) -> int:
    """First n >= start with u_n <= 0; raises Unsupported past the soft cap."""
    for n, s in enumerate(iterate_signs(lrs)):
        if n >= start and s <= 0:
            return n
        if n >= cap:
            raise Unsupported(f"witness scan reached the soft cap of {cap} terms")
        if n and n % 1_000_000 == 0:
            log.info("witness scan at n=%d", n)
    raise AssertionError("unreachable")


def first_nonpositive_below(lrs: LrsSpec, bound: int) -> int | None:
    for n, s in enumerate(iterate_signs(lrs)):
        if n >= bound:
            return None
        if s <= 0:
            return n
    return None


# -- closed forms ----------------------------------------------------------------


def _series(num: Polynomial, den: Polynomial, count: int) -> list[Fraction]:
    """Power-series coefficients of num/den (den(0) != 0)."""
    out = []
    d0 = den.coeff(0)
    for n in range(count):
        s = num.coeff(n) - sum((den.coeff(k) * out[n - k] for k in range(1, min(n, den.degree) + 1)), Fraction(0))
        out.append(s / d0)
    return out


def _reverse(p: Polynomial, degree: int) -> Polynomial:
    return Polynomial([p.coeff(degree - k) for k in range(degree + 1)])


@dataclass(frozen=True)
class Component:
    """Contribution of the roots of one irreducible factor.

    For a simple factor, ``element`` is c(t) in Q[t]/(factor): each root
    alpha contributes c(alpha) alpha^n.  For a repeated linear factor
    t - q the contribution is sum_k poly[k] n^k q^n.
    """

    factor: Polynomial
    multiplicity: int
    element: FieldElement | None = None
    poly: tuple[Fraction, ...] = ()

    def value(self, n: int) -> Fraction:
        if self.element is not None:
            t = self.element.field.generator()
            return (self.element * t**n).trace()
        q = -self.factor.coeff(0)
        return sum((c * n**k for k, c in enumerate(self.poly)), Fraction(0)) * q**n

    @property
    def poly_degree(self) -> int:
        return len(self.poly) - 1 if self.element is None else 0


@dataclass(frozen=True)
class ClosedFormTerm:
    coefficient: AlgebraicNumber
    root: AlgebraicNumber
    degree: int = 0
    poly_coefficients: tuple[AlgebraicNumber, ...] = ()


@dataclass(frozen=True)
class ClosedForm:
    components: tuple[Component, ...]

    def evaluate(self, n: int) -> Fraction:
        return sum((c.value(n) for c in self.components), Fraction(0))

    @property
    def order(self) -> int:
        return sum(c.factor.degree * (c.poly_degree + 1) for c in self.components)

    def is_zero(self) -> bool:
        return not self.components

    def has_repeated_roots(self) -> bool:
        return any(c.poly_degree > 0 for c in self.components)

    def terms(self) -> list[ClosedFormTerm]:
        out = []
        for comp in self.components:
            roots = [AlgebraicNumber(comp.factor, i) for i in range(comp.factor.degree)]
            if comp.element is not None:
                for r in roots:
                    out.append(ClosedFormTerm(comp.element.field.embed(comp.element, r), r, 0))
            else:
                coeffs = tuple(AlgebraicNumber.rational(c) for c in comp.poly)
                out.append(ClosedFormTerm(coeffs[0], roots[0], len(coeffs) - 1, coeffs))
        return out

    def roots(self) -> list[AlgebraicNumber]:
        return [AlgebraicNumber(c.factor, i) for c in self.components for i in range(c.factor.degree)]

    def coefficient_of(self, root: AlgebraicNumber) -> AlgebraicNumber:
        for comp in self.components:
            if comp.factor == root.minpoly:
                if comp.element is None:
                    return AlgebraicNumber.rational(comp.poly[0])
                return comp.element.field.embed(comp.element, root)
        return AlgebraicNumber.rational(0)

    def element_of(self, root: AlgebraicNumber) -> FieldElement | None:
        for comp in self.components:
            if comp.factor == root.minpoly:
                return comp.element
        return None

    def verify(self, lrs: LrsSpec, count: int | None = None) -> bool:
        count = 2 * lrs.order if count is None else count
        return all(self.evaluate(n) == v for n, v in enumerate(lrs.terms(count)))


def closed_form(lrs: LrsSpec) -> ClosedForm:
    """Minimal exponential-polynomial closed form with exact coefficients."""
    d = lrs.order
    q = lrs.charpoly()
    r = _reverse(q, d)  # 1 - a_0 x - ... - a_{d-1} x^d
    u = Polynomial(lrs.initial)
    p = Polynomial((r * u).coeffs[:d])  # numerator of the generating function
    comps = []
    for f, e in q.factor():
        rf = _reverse(f, f.degree) ** e
        rest = r // rf
        a_f = (p * inverse_mod(rest, rf)) % rf
        if a_f.is_zero():
            continue
        k = f.degree
        if e == 1:
            field_ = NumberField(f)
            g = _reverse(Polynomial(list(a_f.coeffs) + [0] * (k - len(a_f.coeffs))), k - 1)
            elem = field_.element(g) / field_.element(f.derivative())
            comps.append(Component(f, 1, elem))
            continue
        if k != 1:
            raise Unsupported("repeated non-rational characteristic roots")
        root = -f.coeff(0)
        vals = _series(a_f, rf, e)
        # vals[n] = sum_j b_j n^j root^n, solve the Vandermonde system
        mat = [[Fraction(n) ** j for j in range(e)] for n in range(e)]
        rhs = [vals[n] / root**n for n in range(e)]
        b = solve(mat, rhs)
        while b and b[-1] == 0:
            b.pop()
        if len(b) == 1:
            comps.append(Component(f, 1, NumberField(f).element(b[0])))
        else:
            comps.append(Component(f, e, None, tuple(b)))
    cf = ClosedForm(tuple(comps))
    if not cf.verify(lrs, max(2 * d, 1)):
        raise AssertionError("closed form failed verification")  # internal bug guard
    return cf


# -- moduli and dominance ---------------------------------------------------------


@dataclass
class _RootInfo:
    root: AlgebraicNumber
    abs2: AlgebraicNumber
    coefficient: AlgebraicNumber


def _root_infos(cf: ClosedForm) -> list[_RootInfo]:
    return [_RootInfo(t.root, t.root.abs2(), t.coefficient) for t in cf.terms()]


def _check_fragment(cf: ClosedForm, max_order: int = MAX_ORDER) -> list[_RootInfo]:
    if cf.has_repeated_roots():
        raise Unsupported("repeated characteristic roots")
    if cf.order > max_order:
        raise Unsupported(f"order {cf.order} exceeds {max_order}")
    infos = _root_infos(cf)
    for inf in infos:
        if inf.abs2.compare_rational(1) > 0:
            raise Unsupported("characteristic root of modulus > 1")
    return infos


def _group_by_modulus(infos: list[_RootInfo]) -> list[list[_RootInfo]]:
    """Groups of equal modulus, largest modulus first (exact comparisons)."""
    groups: list[list[_RootInfo]] = []
    for inf in infos:
        for g in groups:
            if g[0].abs2.compare(inf.abs2) == 0:
                g.append(inf)
                break
        else:
            groups.append([inf])
    # selection sort with exact comparisons (few groups)
    ordered = []
    while groups:
        best = groups[0]
        for g in groups[1:]:
            if g[0].abs2.compare(best[0].abs2) > 0:
                best = g
        groups.remove(best)
        ordered.append(best)
    return ordered


def _modulus_interval(x: AlgebraicNumber, bits: int) -> Interval:
    return x.enclose(bits).re.sqrt()


def decay_threshold(cf: ClosedForm, dominant, margin) -> int:
    """Smallest N whose geometric bound certifies, for every n >= N,

        sum over non-dominant terms |c| |root|^n  <  margin * rho^n,

    rho being the common modulus of the dominant roots.
    """
    margin = Fraction(margin)
    if margin <= 0:
        raise PreconditionViolated("margin must be positive")
    dominant = list(dominant)
    if not dominant:
        raise PreconditionViolated("empty dominant set")
    terms = cf.terms()
    dom_keys = {(r.minpoly, r.index) for r in dominant}
    rest = [t for t in terms if (t.root.minpoly, t.root.index) not in dom_keys]
    if not rest:
        return 0
    rho2 = dominant[0].abs2()
    for r in dominant[1:]:
        if r.abs2().compare(rho2) != 0:
            raise PreconditionViolated("dominant roots must share one modulus")
    for t in rest:
        if t.degree > 0:
            raise PreconditionViolated("polynomial coefficients are not supported")
        if t.root.abs2().compare(rho2) >= 0:
            raise PreconditionViolated("a non-dominant root is not strictly smaller")
    bits = 64
    while True:
        rho = _modulus_interval(rho2, bits)
        pieces = []
        ok = True
        for t in rest:
            ratio = _modulus_interval(t.root.abs2(), bits) / rho
            if ratio.hi >= 1:
                ok = False
                break
            size = t.coefficient.enclose(bits).abs2().sqrt()
            pieces.append((size.hi, ratio.hi))
        if ok:
            break
        bits *= 2
        if bits > PRECISION_CAP:
            raise PrecisionCapExceeded("could not separate moduli in decay_threshold")

    def bound(n: int) -> Fraction:
        return sum((c * r**n for c, r in pieces), Fraction(0))

    if bound(0) < margin:
        return 0
    hi = 1
    while bound(hi) >= margin:
        hi *= 2
    lo = hi // 2  # bound(lo) >= margin
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bound(mid) < margin:
            hi = mid
        else:
            lo = mid
    return hi


# -- sign patterns -----------------------------------------------------------------


@dataclass(frozen=True)
class SignPattern:
    threshold: int
    period: int
    signs: tuple[int, ...]

    def sign_at(self, n: int) -> int:
        return self.signs[n % self.period]


@dataclass(frozen=True)
class NotEventuallyPeriodic:
    reason: str = "a dominant complex pair has an argument that is not a rational multiple of pi"


def _dominant_sum(cf: ClosedForm, group: list[_RootInfo], j: int) -> AlgebraicNumber:
    """S_j = sum over the dominant group of c(lambda) lambda^j, a real number."""
    by_factor: dict[Polynomial, list[AlgebraicNumber]] = {}
    for inf in group:
        by_factor.setdefault(inf.root.minpoly, []).append(inf.root)
    total = AlgebraicNumber.rational(0)
    for f, roots in by_factor.items():
        elem = cf.element_of(roots[0])
        field_ = elem.field
        e = elem * field_.generator() ** j
        if len(roots) == f.degree:
            part = AlgebraicNumber.rational(e.trace())
        else:
            others = [AlgebraicNumber(f, i) for i in range(f.degree) if AlgebraicNumber(f, i) not in roots]
            if len(others) < len(roots):
                part = AlgebraicNumber.rational(e.trace())
                for o in others:
                    part = part - field_.embed(e, o)
            else:
                part = AlgebraicNumber.rational(0)
                for r in roots:
                    part = part + field_.embed(e, r)
        total = total + part
    return total


def _real_lower_abs(x: AlgebraicNumber) -> Fraction:
    """A rational 0 < m <= |x| for a non-zero real x."""
    bits = 16
    while True:
        re = x.enclose(bits).re
        if re.lo > 0:
            return re.lo
        if re.hi < 0:
            return -re.hi
        bits *= 2


def _periodic_part(cf: ClosedForm, group: list[_RootInfo]):
    """(M, [S_j]) when every dominant direction is a root of unity, else None."""
    orders = []
    for inf in group:
        k = nth_power_positive_real_order(inf.root)
        if k is None:
            return None
        orders.append(k)
    m = lcm(*orders)
    return m, [_dominant_sum(cf, group, j) for j in range(m)]


def _rho_power_interval(rho2: AlgebraicNumber, j: int, bits: int) -> Interval:
    return _modulus_interval(rho2, bits) ** j


def ultimate_sign_pattern(lrs: LrsSpec, _depth: int = 0):
    """Eventual periodic sign pattern of u, or NotEventuallyPeriodic."""
    cf = closed_form(lrs)
    if cf.is_zero():
        return SignPattern(0, 1, (0,))
    infos = _check_fragment(cf, max_order=max(MAX_ORDER, lrs.order))
    groups = _group_by_modulus(infos)
    dom = groups[0]
    periodic = _periodic_part(cf, dom)
    if periodic is None:
        return NotEventuallyPeriodic()
    m, sums = periodic
    signs = [s.real_sign() for s in sums]
    rho2 = dom[0].abs2
    nonzero = [j for j in range(m) if signs[j] != 0]
    threshold = 0
    if nonzero and len(groups) > 1:
        # |dominant part at n| = rho^n |S_j| / rho^j
        margin = min(
            _real_lower_abs(sums[j]) / _rho_power_interval(rho2, j, 64).hi for j in nonzero
        )
        threshold = decay_threshold(cf, [i.root for i in dom], margin)
    period = m
    sub_patterns = {}
    for j in range(m):
        if signs[j] == 0:
            sub = lrs.subsequence(j, m)
            pat = ultimate_sign_pattern(sub, _depth + 1)
            if isinstance(pat, NotEventuallyPeriodic):
                return pat
            sub_patterns[j] = pat
            period = lcm(period, m * pat.period)
            threshold = max(threshold, j + m * pat.threshold)
    full = []
    for r in range(period):
        j = r % m
        if j in sub_patterns:
            full.append(sub_patterns[j].sign_at((r - j) // m))
        else:
            full.append(signs[j])
    # tighten the threshold by walking back over exact values
    vals = lrs.terms(threshold) if threshold else []
    n0 = threshold
    while n0 > 0:
        v = vals[n0 - 1]
        if ((v > 0) - (v < 0)) != full[(n0 - 1) % period]:
            break
        n0 -= 1
    return SignPattern(n0, period, tuple(full))


# -- positivity ---------------------------------------------------------------------


@dataclass(frozen=True)
class LrsVerdict:
    outcome: str  # "positive" | "not_positive" | "unsupported"
    witness: int | None = None
    reason: str | None = None
    certificate: dict = field(default_factory=dict)

    @property
    def is_positive(self) -> bool:
        return self.outcome == "positive"


def _positive(**cert) -> LrsVerdict:
    return LrsVerdict("positive", certificate=cert)


def _not_positive(n: int, **cert) -> LrsVerdict:
    return LrsVerdict("not_positive", witness=n, certificate=cert)


def positivity_restricted(lrs: LrsSpec, scan_cap: int = DEFAULT_SCAN_CAP) -> LrsVerdict:
    """Decide u_n > 0 for all n on the supported fragment."""
    try:
        return _positivity(lrs, scan_cap)
    except Unsupported as exc:
        return LrsVerdict("unsupported", reason=exc.reason)


def _prefix_then_positive(lrs: LrsSpec, threshold: int, **cert) -> LrsVerdict:
    bad = first_nonpositive_below(lrs, threshold)
    if bad is not None:
        return _not_positive(bad, prefix_checked=threshold)
    return _positive(threshold=threshold, prefix_checked=threshold, **cert)


def _positivity(lrs: LrsSpec, scan_cap: int) -> LrsVerdict:
    cf = closed_form(lrs)
    if cf.is_zero():
        return _not_positive(0, reason="zero sequence")
    infos = _check_fragment(cf)
    groups = _group_by_modulus(infos)
    dom = groups[0]
    rest_empty = len(groups) == 1
    positive_reals = [i for i in dom if i.root.is_real() and i.root.real_sign() > 0]
    if not positive_reals:
        # no positive real dominant root: infinitely many non-positive terms
        return _not_positive(scan_nonpositive(lrs, 0, scan_cap), rule="no positive dominant root")

    periodic = _periodic_part(cf, dom)
    if periodic is not None:
        m, sums = periodic
        signs = [s.real_sign() for s in sums]
        if any(s < 0 for s in signs):
            return _not_positive(scan_nonpositive(lrs, 0, scan_cap), rule="negative residue class")
        rho2 = dom[0].abs2
        nonzero = [j for j in range(m) if signs[j] != 0]
        threshold = 0
        if not rest_empty:
            margin = min(_real_lower_abs(sums[j]) / _rho_power_interval(rho2, j, 64).hi for j in nonzero)
            threshold = decay_threshold(cf, [i.root for i in dom], margin)
        sub_results = {}
        for j in range(m):
            if signs[j] == 0:
                sub = lrs.subsequence(j, m)
                v = _positivity(sub, scan_cap)
                if v.outcome == "not_positive":
                    return _not_positive(j + m * v.witness, rule="zero residue class", period=m)
                sub_results[j] = v
        return _prefix_then_positive(lrs, threshold, rule="periodic dominant part", period=m)

    # irrational-angle pair tied with a positive real root
    if len(dom) == 3 and len(positive_reals) == 1:
        rho_info = positive_reals[0]
        pair = [i for i in dom if i is not rho_info]
        if all(not i.root.is_real() for i in pair):
            c = rho_info.coefficient
            d = pair[0].coefficient
            dd = d.abs2()
            s = c.real_sign()
            if s <= 0:
                gap_sign = -1
            else:
                gap_sign = (c * c).compare(dd * 4)
            if gap_sign < 0:
                return _not_positive(scan_nonpositive(lrs, 0, scan_cap), rule="c - 2|d| < 0")
            if gap_sign > 0:
                margin = _real_lower_abs(c - dd.sqrt() * 2)
                rho = rho_info.root
                threshold = 0
                if not rest_empty:
                    # normalise by rho^n: margin is already relative to rho^n
                    threshold = decay_threshold(cf, [i.root for i in dom], margin)
                return _prefix_then_positive(lrs, threshold, rule="c - 2|d| > 0")
            if not rest_empty:
                raise Unsupported("boundary case c = 2|d| with subdominant terms")
            mu = pair[0].root / rho_info.root
            beta = -(dd.sqrt() / d)
            n = solve_unit_orbit(mu, beta)
            if n is None:
                return _positive(rule="c = 2|d|, zero never attained")
            return _not_positive(n, rule="c = 2|d|, exact zero")
    raise Unsupported("dominant root configuration outside the supported fragment")


# -- unit-circle orbits ------------------------------------------------------------------


def _mahler_measure(x: AlgebraicNumber, bits: int) -> Interval:
    """Enclosure of |lead| * prod max(1, |conjugate|) over all conjugates."""
    ints = x.minpoly.integer_coefficients()
    m = Interval(abs(ints[-1]), prec=bits)
    for r, _ in isolate_roots(x.minpoly):
        a = r.enclose(bits).abs2().sqrt()
        m = m * Interval(max(a.lo, Fraction(1)), max(a.hi, Fraction(1)), bits)
    return m


def _last_k(pred, start: int = 0) -> int:
    """Largest k >= start with pred(k) true, pred monotone (true then false)."""
    hi = max(1, start)
    while pred(hi):
        hi *= 2
    lo = start
    if not pred(lo):
        return start - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def solve_unit_orbit(mu: AlgebraicNumber, beta: AlgebraicNumber, cap: int = PRECISION_CAP) -> int | None:
    """The unique n >= 0 with mu^n = beta, or None.

    mu^n = beta forces M(beta)^deg(mu) = M(mu)^(n deg(beta)) for the Mahler
    measure M, and M(mu) > 1 because mu is not a root of unity (Kronecker).
    Validated enclosures leave only finitely many candidate n, each of which
    is then checked exactly.
    """
    if beta == 1:
        return 0
    bits = 64
    while True:
        a = _mahler_measure(beta, bits) ** mu.degree
        b = _mahler_measure(mu, bits) ** beta.degree
        if b.lo > 1:
            # candidates k satisfy b.lo^k <= a.hi and b.hi^k >= a.lo
            k_max = _last_k(lambda k: b.lo**k <= a.hi)
            k_min = _last_k(lambda k: b.hi**k < a.lo) + 1
            if k_max - k_min <= 1:
                for k in range(max(k_min, 1), k_max + 1):
                    if mu**k == beta:
                        return k
                return None
        bits *= 2
        if bits > cap:
            raise PrecisionCapExceeded("could not pin the exponent in solve_unit_orbit")
