import itertools
import random
from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from peribeta import parse_base
from peribeta.errors import BudgetExceeded, DomainError
from peribeta.expansion import (
    Expansion,
    compare_words,
    expand,
    expansion_of_one,
    expansion_value,
    finite_value,
    is_admissible,
    is_purely_periodic,
    normalize,
    orbit_returns,
    parry_automaton,
    periodic_value,
    successor_gaps,
    t_beta_step,
)
from peribeta.field import FieldElement


def mp_root(base, dps):
    with mpmath.workdps(dps):
        f = lambda t: sum(c * t ** i for i, c in enumerate(base.coefficients))
        return mpmath.findroot(f, base.beta)


def mp_digits(base, x, n, dps=400):
    """Greedy digits of x by high-precision iteration (independent oracle)."""
    with mpmath.workdps(dps):
        b = mp_root(base, dps)
        v = mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else x
        out = []
        for _ in range(n):
            v *= b
            a = int(mpmath.floor(v))
            out.append(a)
            v -= a
        return out


def rat(base, x):
    return FieldElement.from_rational(base.minpoly, Fraction(x))


def word(exp, n):
    return list(exp.prefix(n))


def test_step_examples(phi):
    half = rat(phi, Fraction(1, 2))
    a, nxt = t_beta_step(half, phi)
    b = FieldElement(phi, (0, 1))
    assert a == 0 and nxt == b / 2
    a, nxt = t_beta_step(b / 2, phi)
    assert a == 1 and nxt == (b - 1) / 2
    assert t_beta_step(rat(phi, 0), phi) == (0, rat(phi, 0))


def test_step_rejects_outside(phi):
    with pytest.raises(DomainError):
        t_beta_step(rat(phi, 1), phi)
    with pytest.raises(DomainError):
        expand(rat(phi, -Fraction(1, 3)), phi)


def test_expand_examples(phi, theta, eta):
    e = expand(rat(phi, Fraction(1, 2)), phi)
    assert e.preperiod == () and e.period == (0, 1, 0)
    e = expand(rat(theta, Fraction(1, 2)), theta)
    assert e.preperiod == (1,) and e.period == (0, 2, 0)
    assert not e.purely_periodic
    e = expand(rat(eta, 0), eta)
    assert e.is_finite and e.preperiod == () and e.purely_periodic
    e = expand(rat(eta, Fraction(3, 5)), eta)
    assert e.purely_periodic and len(e.period) == 24


@pytest.mark.parametrize("text", ["-1,-1,0,1", "-1,-1,1", "1,-3,1", "-1,2,-3,1", "-1,-1,-1,1"])
def test_digits_match_high_precision(text):
    base = parse_base(text)
    random.seed(hash(text) % 1000)
    for _ in range(12):
        q = random.randint(2, 60)
        p = random.randint(1, q - 1)
        e = expand(rat(base, Fraction(p, q)), base)
        n = min(len(e.preperiod) + 2 * max(len(e.period), 1), 300)
        assert word(e, n) == mp_digits(base, Fraction(p, q), n)


def test_engines_agree(eta, nonf):
    for base in (eta, nonf):
        for q in range(2, 40):
            for p in range(1, q):
                if gcd(p, q) != 1:
                    continue
                x = rat(base, Fraction(p, q))
                k = expand(x, base, engine="kernel")
                h = expand(x, base, engine="hash")
                assert (k.preperiod, k.period) == (h.preperiod, h.period)
                assert orbit_returns(x, base) == k.purely_periodic


def test_engines_agree_on_field_elements(eta):
    random.seed(3)
    for _ in range(40):
        c = [Fraction(random.randint(-30, 30), random.randint(1, 12)) for _ in range(3)]
        x = FieldElement(eta, c)
        v = float(x)
        x = x - int(v // 1)
        if not (0 <= float(x) < 1):
            continue
        k = expand(x, eta, engine="kernel")
        h = expand(x, eta, engine="hash")
        assert (k.preperiod, k.period) == (h.preperiod, h.period)
        assert expansion_value(k, eta) == x


def test_budget(eta):
    x = rat(eta, Fraction(1331, 1997))
    e = expand(x, eta, budget=1000)
    assert e.truncated
    with pytest.raises(BudgetExceeded):
        is_purely_periodic(x, eta, budget=1000)


def test_long_orbit(eta):
    x = rat(eta, Fraction(1331, 1997))
    e = expand(x, eta)
    assert e.purely_periodic and len(e.period) == 997002


def test_unknown_engine(eta):
    with pytest.raises(ValueError):
        expand(rat(eta, Fraction(1, 3)), eta, engine="nope")


def test_expansion_of_one(eta, phi, theta):
    one = expansion_of_one(eta)
    assert one.d_one.preperiod == (1, 0, 0, 0, 1) and one.d_one.period == ()
    assert one.d_star.preperiod == () and one.d_star.period == (1, 0, 0, 0, 0)
    one = expansion_of_one(phi)
    assert one.d_one.preperiod == (1, 1) and one.d_star.period == (1, 0)
    one = expansion_of_one(theta)
    assert one.d_one.preperiod == (2,) and one.d_one.period == (1,)
    assert one.d_star == one.d_one
    for base in (eta, phi, theta):
        d = expansion_of_one(base).d_one
        n = len(d.preperiod) + 6
        # nudge above 1 so a finite expansion is not rounded down
        with mpmath.workdps(200):
            assert list(d.prefix(n)) == mp_digits(base, 1 + mpmath.mpf(10) ** -150, n, 200)


def test_expansion_of_one_non_pisot():
    with pytest.raises(DomainError):
        expansion_of_one(parse_base("-1,-3,0,1"))


def test_normalize():
    assert normalize((1, 0), (1, 0)) == ((), (1, 0))
    assert normalize((), (0, 1, 0, 1)) == ((), (0, 1))
    assert normalize((2,), (1, 1)) == ((2,), (1,))


def test_compare_words():
    assert compare_words(((), (1, 0)), ((1,), (1,))) < 0
    assert compare_words(((1, 0), (1, 0)), ((), (1, 0))) == 0
    assert compare_words(((), (0,)), ((), (0, 1))) < 0


def brute_admissible(w, dstar_word, length=80):
    """Every shift of the finite word followed by 0s is below d* (independent)."""
    pre, per = dstar_word
    d = list(pre) + list(per) * (length // max(len(per), 1) + 2)
    for k in range(len(w)):
        tail = list(w[k:]) + [0] * length
        if tail[:length] >= d[:length]:
            return False
    return True


def test_admissibility_examples(phi):
    assert not is_admissible((1, 1), phi)
    # (01)^w shifts to (10)^w = d*(1), so it is not a greedy expansion
    assert not is_admissible(((), (0, 1)), phi)
    assert is_admissible(((), (0, 0, 1)), phi)
    assert is_admissible((), phi)
    with pytest.raises(DomainError):
        is_admissible((2,), phi)


@pytest.mark.parametrize("text", ["-1,-1,0,1", "-1,-1,1", "1,-3,1", "-1,2,-3,1"])
def test_admissibility_brute_force(text):
    base = parse_base(text)
    A = base.alphabet_size
    dstar = expansion_of_one(base).d_star.as_word()
    auto = parry_automaton(base)
    for n in range(0, 7):
        for w in itertools.product(range(A), repeat=n):
            expect = brute_admissible(w, dstar)
            assert is_admissible(w, base) == expect
            assert (auto.run(w, 0) is not None) == expect


def test_expansions_are_admissible(eta, nonf):
    for base in (eta, nonf):
        for q in range(2, 20):
            for p in range(1, q):
                e = expand(rat(base, Fraction(p, q)), base)
                assert is_admissible(e.as_word(), base)


def test_periodic_value_examples(phi, eta):
    assert periodic_value((0, 1, 0), phi) == rat(phi, Fraction(1, 2))
    assert periodic_value((0,), eta).is_zero()
    b = FieldElement(eta, (0, 1))
    assert periodic_value((1,), eta) == 1 / (b - 1)
    assert finite_value((1, 0, 1), eta) == 1 / b + 1 / b ** 3


def test_gaps(eta, phi):
    g = successor_gaps(eta)
    b = FieldElement(eta, (0, 1))
    assert g == [rat(eta, 1), b - 1, b ** 2 - b, b ** 3 - b ** 2, b ** 4 - b ** 3]
    assert successor_gaps(phi) == [rat(phi, 1), FieldElement(phi, (0, 1)) - 1]
    for gap in g:
        assert not gap.is_rational() or gap == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 300), st.data())
def test_roundtrip_value(q, data):
    base = parse_base("-1,-1,0,1")
    p = data.draw(st.integers(1, q - 1))
    x = rat(base, Fraction(p, q))
    e = expand(x, base)
    assert expansion_value(e, base) == x
    if e.purely_periodic:
        assert periodic_value(e.period, base) == x


def test_expansion_dataclass():
    e = Expansion((1,), (0, 2))
    assert e.prefix(5) == (1, 0, 2, 0, 2)
    assert Expansion((), (), truncated=True).purely_periodic is False
    with pytest.raises(DomainError):
        Expansion((), (), truncated=True).as_word()
