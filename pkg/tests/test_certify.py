from fractions import Fraction
from math import gcd

import pytest

from peribeta import parse_base
from peribeta.certify import (
    IntervalCover,
    certify_interval,
    certify_not_periodic,
    dyadic_bracket,
)
from peribeta.expansion import expand, is_purely_periodic
from peribeta.field import FieldElement


def rat(base, x):
    return FieldElement.from_rational(base.minpoly, Fraction(x))


@pytest.mark.parametrize("text", ["-1,-1,0,1", "-1,2,-3,1", "1,-3,1"])
def test_point_certificates_are_sound(text):
    base = parse_base(text)
    certified = 0
    for q in range(2, 61):
        for p in range(1, q):
            if gcd(p, q) != 1:
                continue
            x = Fraction(p, q)
            if certify_not_periodic(base, x):
                certified += 1
                assert not is_purely_periodic(rat(base, x), base)
    assert certified > 0


def test_point_certificates_are_sharp_for_theta(theta):
    # every rational fails for a base with a positive conjugate
    for q in range(2, 40):
        for p in range(1, q):
            if gcd(p, q) == 1:
                assert certify_not_periodic(theta, Fraction(p, q))


def test_interval_certificate(eta):
    u, v = Fraction(1, 8), Fraction(1, 8) + Fraction(1, 1024)
    assert certify_interval(eta, u, v)
    for q in range(2, 600, 3):
        for p in range(q // 8, q // 8 + 3):
            x = Fraction(p, q)
            if u <= x <= v:
                assert expand(rat(eta, x), eta).purely_periodic


def test_interval_refused_across_a_gap(eta):
    # T^1(1) = beta - 1 lies inside, so the eligible classes change there
    g = float(eta.beta - 1)
    u, _ = dyadic_bracket(Fraction(g) - Fraction(1, 1000))
    _, v = dyadic_bracket(Fraction(g) + Fraction(1, 1000))
    assert not certify_interval(eta, u, v)


def test_interval_refused_beyond_two_thirds(eta):
    u, v = dyadic_bracket(Fraction(2, 3))
    assert not certify_interval(eta, u, Fraction(0.671875))


def test_interval_arguments(eta):
    with pytest.raises(ValueError):
        certify_interval(eta, Fraction(1, 3), Fraction(1, 2))
    with pytest.raises(ValueError):
        certify_interval(eta, Fraction(1, 2), Fraction(1, 4))


def test_dyadic_bracket():
    for x in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 7)):
        u, v = dyadic_bracket(x)
        assert u <= x <= v and float(u) == u and float(v) == v


def test_cover_grows_along_scan(eta):
    cover = IntervalCover(eta)
    x = Fraction(1, 5)
    assert cover.extend_from(x, 0.3)
    assert cover.covers(x)
    u, v = cover.intervals[-1]
    assert u <= x <= v < 0.3
