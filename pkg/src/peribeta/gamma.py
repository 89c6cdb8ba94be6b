"""Farey scans for the threshold gamma(beta).

gamma(beta) is the supremum of the c in [0, 1] such that every rational in
[0, c) has a purely periodic beta-expansion.  A finite scan can only bound it
from above (by a counterexample).  The clean prefix it reports holds for the
rationals of bounded denominator, which says nothing about gamma itself.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .certify import IntervalCover, certify_not_periodic
from .classify import classify
from .errors import BudgetExceeded, DomainError
from .expansion import DEFAULT_BUDGET, _params, expand
from .field import BetaBase, FieldElement, make_base

SCHEMA = "peribeta.gamma/1"
COUNTEREXAMPLE_CAP = 100
_BATCH = 4096


# ---------------------------------------------------------------------------
# Farey order

def farey_neighbors(x: Fraction, Q: int) -> tuple:
    """Consecutive terms L <= x < R of the Farey sequence of order Q.

    Found by descending the Stern-Brocot tree; runs of moves in one direction
    are taken in a single step.
    """
    x = Fraction(x)
    if not (0 <= x < 1):
        raise DomainError("need 0 <= x < 1")
    xn, xd = x.numerator, x.denominator
    a, b, c, d = 0, 1, 1, 1
    while b + d <= Q:
        if (a + c) * xd <= xn * (b + d):
            # largest k with (a + k c)/(b + k d) <= x and b + k d <= Q
            k = min((xn * b - a * xd) // (c * xd - xn * d), (Q - b) // d)
            a, b = a + k * c, b + k * d
        else:
            # largest k with (c + k a)/(d + k b) > x and d + k b <= Q
            k = (Q - d) // b
            gap = xn * b - a * xd
            if gap > 0:
                k = min(k, (c * xd - xn * d - 1) // gap)
            c, d = c + k * a, d + k * b
    return Fraction(a, b), Fraction(c, d)


def farey(Q: int, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1)):
    """Reduced p/q with q <= Q and lo < p/q < hi, in ascending order."""
    if Q < 1:
        raise DomainError("Q must be positive")
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        return
    if lo < 0:
        lo = Fraction(0)
    if hi > 1:
        hi = Fraction(1)
    left, right = farey_neighbors(lo, Q) if lo < 1 else (None, None)
    if left is None:
        return
    a, b, c, d = left.numerator, left.denominator, right.numerator, right.denominator
    while Fraction(c, d) < hi:
        yield Fraction(c, d)
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The fraction of least denominator in the open interval (lo, hi)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise DomainError("empty interval")
    fl = math.floor(lo)
    if fl + 1 < hi:
        return Fraction(fl + 1)
    if lo == fl:
        # the simplest fraction above an integer: fl + 1/n
        n = math.floor(1 / (hi - fl)) + 1
        return fl + Fraction(1, n)
    inner = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


# ---------------------------------------------------------------------------
# oracles

class _ExactOracle:
    """Compiled orbit cycles in batches, exact fallback when undecided."""

    def __init__(self, base: BetaBase, budget: int):
        self.base = base
        self.budget = budget
        self.params = _params(base.coefficients)

    def run(self, xs: list) -> list:
        """(periodic, preperiod length, period length) per rational."""
        d, m0, m1, m2, p1, p2, e1, e2, A = self.params
        ps = np.array([x.numerator for x in xs], dtype=np.int64)
        qs = np.array([x.denominator for x in xs], dtype=np.int64)
        st, mu, lam = K.batch_orbits(ps, qs, d, m0, m1, m2, p1, p2, e1, e2, A, self.budget)
        out = []
        for x, s, u, l in zip(xs, st, mu, lam):
            if s == K.OK:
                out.append((u == 0, int(u), int(l)))
                continue
            if s == K.BUDGET:
                raise BudgetExceeded(f"orbit of {x} longer than {self.budget} steps")
            e = expand(FieldElement.from_rational(self.base.minpoly, x), self.base,
                       self.budget, engine="hash")
            if e.truncated:
                raise BudgetExceeded(f"orbit of {x} longer than {self.budget} steps")
            out.append((e.purely_periodic, len(e.preperiod), len(e.period) or 1))
        return out


@dataclass
class Counterexample:
    p: int
    q: int
    preperiod_len: int
    period_len: int
    certified: bool = False

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass
class GammaScanReport:
    base: str
    Q: int
    lo: str
    hi: str
    oracle: str
    stop_first: bool
    tested: int = 0
    exact_checks: int = 0
    certified_by_interval: int = 0
    certificate_intervals: int = 0
    complete: bool = True
    verified_frontier: str = "0"
    min_counterexample: str | None = None
    counterexamples: list = field(default_factory=list)
    counterexample_count: int = 0
    max_period: int = 0
    mean_period: float = 0.0
    summary: str = ""

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA}
        out.update(asdict(self))
        return out

    @property
    def frontier(self) -> Fraction:
        return Fraction(self.verified_frontier)

    @property
    def minimum(self) -> Fraction | None:
        return None if self.min_counterexample is None else Fraction(self.min_counterexample)


def _summary(r: GammaScanReport) -> str:
    if r.min_counterexample is None:
        return (f"no counterexample among rationals in ({r.lo}, {r.hi}) with denominator "
                f"<= {r.Q}; this is not a lower bound for gamma")
    head = (f"smallest counterexample {r.min_counterexample} gives gamma <= "
            f"{float(Fraction(r.min_counterexample)):.12g}")
    if r.verified_frontier == r.lo:
        return f"{head}; it is the first rational scanned above {r.lo}"
    return (f"{head}; every rational with denominator <= {r.Q} in "
            f"({r.lo}, {r.verified_frontier}] is purely periodic")


def _scan_range(base: BetaBase, Q: int, lo: Fraction, hi: Fraction, oracle: str,
                stop_first: bool, budget: int) -> GammaScanReport:
    rep = GammaScanReport(base.minpoly.to_text(), Q, str(lo), str(hi), oracle, stop_first,
                          verified_frontier=str(lo))
    exact = _ExactOracle(base, budget)
    cover = IntervalCover(base, min_width=1.0 / (8 * Q * Q)) if oracle == "certified" else None
    periods = []
    pending = []
    done = False

    def flush():
        nonlocal done
        if not pending:
            return
        for x, (ok, mu, lam) in zip(pending, exact.run(pending)):
            rep.exact_checks += 1
            periods.append(lam)
            if done:
                continue
            if ok:
                if rep.min_counterexample is None:
                    rep.verified_frontier = str(x)
                continue
            certified = cover is not None and certify_not_periodic(base, x)
            rep.counterexample_count += 1
            if len(rep.counterexamples) < COUNTEREXAMPLE_CAP:
                rep.counterexamples.append(asdict(Counterexample(
                    x.numerator, x.denominator, mu, lam, certified)))
            if rep.min_counterexample is None:
                rep.min_counterexample = str(x)
                if stop_first:
                    done = True
        pending.clear()

    for x in farey(Q, lo, hi):
        rep.tested += 1
        if cover is not None and (cover.covers(x) or cover.extend_from(x, float(hi))):
            rep.certified_by_interval += 1
            if rep.min_counterexample is None and not pending:
                rep.verified_frontier = str(x)
            continue
        pending.append(x)
        if len(pending) >= _BATCH or cover is not None:
            flush()
            if done:
                break
    flush()
    if done:
        rep.complete = False
    if cover is not None:
        rep.certificate_intervals = len(cover.intervals)
    if periods:
        rep.max_period = int(max(periods))
        rep.mean_period = float(sum(periods) / len(periods))
    return rep


def _merge(parts: list, base: BetaBase, Q, lo, hi, oracle, stop_first) -> GammaScanReport:
    rep = GammaScanReport(base.minpoly.to_text(), Q, str(lo), str(hi), oracle, stop_first,
                          verified_frontier=str(lo))
    total_periods = 0.0
    weight = 0
    for part in parts:
        rep.tested += part.tested
        rep.exact_checks += part.exact_checks
        rep.certified_by_interval += part.certified_by_interval
        rep.certificate_intervals += part.certificate_intervals
        rep.counterexample_count += part.counterexample_count
        rep.max_period = max(rep.max_period, part.max_period)
        total_periods += part.mean_period * part.exact_checks
        weight += part.exact_checks
        room = COUNTEREXAMPLE_CAP - len(rep.counterexamples)
        rep.counterexamples.extend(part.counterexamples[:max(room, 0)])
        if rep.min_counterexample is None:
            if part.min_counterexample is None:
                if part.tested:
                    rep.verified_frontier = part.verified_frontier
            else:
                if Fraction(part.verified_frontier) > Fraction(part.lo):
                    rep.verified_frontier = part.verified_frontier
                rep.min_counterexample = part.min_counterexample
                if stop_first:
                    rep.complete = False
                    break
        if not part.complete:
            rep.complete = False
    rep.mean_period = total_periods / weight if weight else 0.0
    return rep


def _worker(args):
    coeffs, Q, lo, hi, oracle, stop_first, budget = args
    return _scan_range(make_base(coeffs), Q, lo, hi, oracle, stop_first, budget)


def interval_scan(base: BetaBase, lo, hi, Q: int, oracle: str = "exact",
                  stop_first: bool = False, threads: int | None = None,
                  budget: int = DEFAULT_BUDGET) -> GammaScanReport:
    """Scan the reduced p/q in (lo, hi) with q <= Q in ascending order.

    With several workers the range is cut into equal pieces scanned
    independently and merged in interval order, so the report does not depend
    on the worker count.
    """
    if oracle not in ("exact", "certified"):
        raise ValueError(f"unknown oracle {oracle!r}")
    if Q < 1:
        raise DomainError("Q must be positive")
    lo, hi = Fraction(lo), Fraction(hi)
    if not (0 <= lo < hi <= 1):
        raise DomainError("need 0 <= lo < hi <= 1")
    if threads is None:
        threads = int(os.environ.get("PERIBETA_THREADS", "1") or 1)
    pieces = max(1, int(threads))
    if pieces == 1:
        part = _scan_range(base, Q, lo, hi, oracle, stop_first, budget)
        rep = _merge([part], base, Q, lo, hi, oracle, stop_first)
    else:
        cuts = [lo + (hi - lo) * k / pieces for k in range(pieces + 1)]
        # each piece scans (cut_k, cut_{k+1}); the interior cut points themselves
        # are scanned as their own tiny ranges so nothing is skipped
        jobs, order = [], []
        coeffs = base.coefficients
        for k in range(pieces):
            jobs.append((coeffs, Q, cuts[k], cuts[k + 1], oracle, stop_first, budget))
        with ProcessPoolExecutor(max_workers=pieces) as ex:
            parts = list(ex.map(_worker, jobs))
        extra = []
        for k in range(1, pieces):
            c = cuts[k]
            if c.denominator <= Q:
                extra.append((k, _scan_point(base, c, Q, oracle, budget)))
        for k, part in enumerate(parts):
            order.append(part)
            for kk, pt in extra:
                if kk == k + 1:
                    order.append(pt)
        rep = _merge(order, base, Q, lo, hi, oracle, stop_first)
    rep.summary = _summary(rep)
    return rep


def _scan_point(base, x: Fraction, Q, oracle, budget) -> GammaScanReport:
    rep = GammaScanReport(base.minpoly.to_text(), Q, str(x), str(x), oracle, False,
                          verified_frontier=str(x))
    ok, mu, lam = _ExactOracle(base, budget).run([x])[0]
    rep.tested = rep.exact_checks = 1
    rep.max_period = lam
    rep.mean_period = float(lam)
    if not ok:
        rep.counterexample_count = 1
        rep.min_counterexample = str(x)
        rep.counterexamples.append(asdict(Counterexample(x.numerator, x.denominator, mu, lam)))
    return rep


def gamma_scan(base: BetaBase, Q: int, c_max=Fraction(1), oracle: str = "exact",
               stop_first: bool = False, threads: int | None = None,
               budget: int = DEFAULT_BUDGET) -> GammaScanReport:
    """Scan all reduced p/q in (0, c_max) with q <= Q."""
    return interval_scan(base, Fraction(0), Fraction(c_max), Q, oracle, stop_first,
                         threads, budget)


# ---------------------------------------------------------------------------
# theorem-level checks

# clean prefixes established by scans, per base: (threshold, Q)
KNOWN_PREFIXES = {
    "-1,-1,0,1": (Fraction(66, 100), 200),
}


def theorem_checks(base: BetaBase, Q: int = 500, threshold=None) -> dict:
    """Compare scans with the classification.

    (a) not a Pisot unit, or a cubic without (F): a counterexample below 1/50;
    (b) (F): no counterexample below the per-base threshold;
    (c) cubic (F) with complex conjugates: additionally some counterexample in
        (threshold, 1).
    """
    rep = classify(base)
    out = {"base": rep.base, "property_F": rep.property_F, "family": rep.family}
    gate = rep.is_pisot and rep.is_unit
    if not gate or rep.property_F == "fails":
        scan = gamma_scan(base, Q, Fraction(1, 50), stop_first=True)
        out.update(case="a", expected="counterexample below 1/50",
                   counterexample=scan.min_counterexample,
                   passed=scan.min_counterexample is not None)
        return out
    if rep.property_F != "holds":
        out.update(case="undetermined", passed=None)
        return out
    if threshold is None:
        if base.degree == 2:
            threshold, q_used = Fraction(1), min(Q, 200)
        else:
            threshold, q_used = KNOWN_PREFIXES.get(rep.base, (None, Q))
    else:
        threshold, q_used = Fraction(threshold), Q
    if threshold is None:
        out.update(case="b", expected="no documented threshold", passed=None)
        return out
    clean = interval_scan(base, 0, threshold, q_used, stop_first=True)
    out.update(case="b", threshold=str(threshold), prefix_clean=clean.min_counterexample is None)
    passed = clean.min_counterexample is None
    if base.degree == 3 and rep.conjugate_kind == "complex_pair" and threshold < 1:
        above = interval_scan(base, threshold, 1, q_used, stop_first=True)
        out.update(case="c", counterexample_above=above.min_counterexample)
        passed = passed and above.min_counterexample is not None
    out["passed"] = passed
    return out
