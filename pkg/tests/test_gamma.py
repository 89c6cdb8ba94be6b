import math
import os
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from peribeta import parse_base
from peribeta.errors import DomainError
from peribeta.expansion import expand
from peribeta.field import FieldElement
from peribeta.gamma import (
    COUNTEREXAMPLE_CAP,
    farey,
    farey_neighbors,
    gamma_scan,
    interval_scan,
    simplest_between,
    theorem_checks,
)


def brute_farey(Q, lo, hi):
    return sorted({Fraction(p, q) for q in range(1, Q + 1) for p in range(q + 1)
                   if lo < Fraction(p, q) < hi})


def rat(base, x):
    return FieldElement.from_rational(base.minpoly, Fraction(x))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.fractions(0, 1), st.fractions(0, 1))
def test_farey_matches_brute_force(Q, a, b):
    lo, hi = min(a, b), max(a, b)
    assert list(farey(Q, lo, hi)) == brute_farey(Q, lo, hi)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.fractions(0, 1).filter(lambda x: x < 1))
def test_farey_neighbors_brute_force(Q, x):
    seq = brute_farey(Q, Fraction(-1), Fraction(2))
    left = max(f for f in seq if f <= x)
    right = min(f for f in seq if f > x)
    assert farey_neighbors(x, Q) == (left, right)


@settings(max_examples=80, deadline=None)
@given(st.fractions(0, 3, max_denominator=200), st.fractions(0, 3, max_denominator=200))
def test_simplest_between_brute_force(a, b):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    q = 1
    # the smallest p/q above lo is the only candidate for each q
    while Fraction(math.floor(lo * q) + 1, q) >= hi:
        q += 1
    got = simplest_between(lo, hi)
    assert got.denominator == q and lo < got < hi


def test_farey_domain():
    with pytest.raises(DomainError):
        list(farey(0))
    assert list(farey(5, Fraction(1, 2), Fraction(1, 2))) == []
    with pytest.raises(DomainError):
        simplest_between(Fraction(1, 2), Fraction(1, 3))


def test_phi_clean(phi):
    rep = gamma_scan(phi, 200)
    assert rep.min_counterexample is None and rep.counterexample_count == 0
    assert rep.tested == len(brute_farey(200, Fraction(0), Fraction(1)))
    assert "not a lower bound" in rep.summary


def test_theta_first_rational_fails(theta):
    rep = gamma_scan(theta, 100, stop_first=True)
    assert rep.min_counterexample == "1/100" and rep.verified_frontier == "0"
    full = gamma_scan(theta, 30)
    assert full.counterexample_count == full.tested


def test_nonf_small_counterexample(nonf):
    rep = gamma_scan(nonf, 500, Fraction(1, 50), stop_first=True)
    assert rep.minimum == Fraction(1, 334)
    assert not expand(rat(nonf, Fraction(1, 334)), nonf).purely_periodic


def test_eta_certified_window(eta):
    rep = interval_scan(eta, Fraction(3, 5), Fraction(33, 50), 1000, oracle="certified")
    assert rep.min_counterexample is None
    assert rep.certified_by_interval + rep.exact_checks == rep.tested
    assert rep.certified_by_interval > 0
    assert Fraction(rep.verified_frontier) == max(brute_farey(1000, Fraction(3, 5), Fraction(33, 50)))


def test_eta_counterexamples_above_two_thirds(eta):
    rep = interval_scan(eta, Fraction(2, 3), Fraction(7, 10), 60)
    assert rep.counterexample_count > 0
    for c in rep.counterexamples:
        e = expand(rat(eta, Fraction(c["p"], c["q"])), eta, engine="hash")
        assert not e.purely_periodic
        assert len(e.preperiod) == c["preperiod_len"] and len(e.period) == c["period_len"]


def test_eta_first_counterexample(eta):
    rep = interval_scan(eta, Fraction(3, 5), Fraction(7, 10), 50, stop_first=True)
    assert rep.minimum == Fraction(33, 49)
    assert rep.counterexamples[0]["preperiod_len"] == 30
    assert rep.counterexamples[0]["period_len"] == 336


def test_report_invariants(eta):
    for Q in (30, 60):
        rep = interval_scan(eta, Fraction(1, 2), Fraction(1), Q)
        lo, hi = farey_neighbors(rep.frontier, Q)
        assert lo == rep.frontier and hi == rep.minimum
        for x in farey(Q, Fraction(1, 2), rep.minimum):
            assert expand(rat(eta, x), eta).purely_periodic
        assert len(rep.counterexamples) <= COUNTEREXAMPLE_CAP
    # more denominators can only move the first counterexample down
    m = [interval_scan(eta, Fraction(1, 2), 1, Q, stop_first=True).minimum for Q in (40, 50, 60)]
    assert m[0] >= m[1] >= m[2]


def test_threads_are_deterministic(eta):
    one = interval_scan(eta, Fraction(1, 2), 1, 40, threads=1).to_dict()
    three = interval_scan(eta, Fraction(1, 2), 1, 40, threads=3).to_dict()
    assert one == three


def test_thread_cut_points_are_scanned(theta):
    # 1/2 is a cut point with two workers
    rep = interval_scan(theta, 0, 1, 3, threads=2)
    assert rep.tested == 3 and rep.counterexample_count == 3


def test_env_thread_default(eta, monkeypatch):
    monkeypatch.setenv("PERIBETA_THREADS", "2")
    a = interval_scan(eta, Fraction(1, 2), 1, 20).to_dict()
    monkeypatch.delenv("PERIBETA_THREADS")
    assert a == interval_scan(eta, Fraction(1, 2), 1, 20).to_dict()


def test_scan_arguments(eta):
    with pytest.raises(DomainError):
        interval_scan(eta, Fraction(1, 2), Fraction(1, 3), 10)
    with pytest.raises(ValueError):
        interval_scan(eta, 0, 1, 10, oracle="guess")
    rep = interval_scan(eta, Fraction(1, 3), Fraction(1, 2), 1)
    assert rep.tested == 0 and rep.min_counterexample is None


def test_report_schema(phi):
    d = gamma_scan(phi, 10).to_dict()
    assert d["schema"] == "peribeta.gamma/1"
    assert d["tested"] == len(brute_farey(10, Fraction(0), Fraction(1)))


def test_theorem_checks(phi, theta, nonf):
    assert theorem_checks(phi, 100)["passed"]
    out = theorem_checks(theta, 100)
    assert out["case"] == "a" and out["passed"]
    out = theorem_checks(nonf, 500)
    assert out["case"] == "a" and out["counterexample"] == "1/334"
    assert theorem_checks(parse_base("-2,-2,1"), 100)["passed"]


def test_theorem_checks_complex_cubic(eta):
    out = theorem_checks(eta, 60, threshold=Fraction(66, 100))
    assert out["case"] == "c" and out["prefix_clean"] and out["passed"]
