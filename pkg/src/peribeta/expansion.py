"""Greedy beta-expansions, Parry admissibility and the periodicity oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import DomainError
from .field import BetaBase, FieldElement, _float_powers, _float_sign, make_base, sign_of

DEFAULT_BUDGET = 10 ** 7
ONE_BUDGET = 2_000
MAX_COORD_BITS = 2_000


@dataclass(frozen=True)
class Expansion:
    """preperiod . period^omega.  An empty period means a finite expansion."""

    preperiod: tuple
    period: tuple
    truncated: bool = False
    steps: int = 0

    @property
    def is_finite(self) -> bool:
        return not self.truncated and not self.period

    @property
    def purely_periodic(self) -> bool:
        # the empty expansion is that of 0, which counts as purely periodic
        return not self.truncated and not self.preperiod

    def as_word(self) -> tuple:
        """(preperiod, period) with a finite expansion padded by 0^omega."""
        if self.truncated:
            raise DomainError("truncated expansion has no infinite word")
        return normalize(self.preperiod, self.period or (0,))

    def prefix(self, n: int) -> tuple:
        pre, per = self.preperiod, self.period or (0,)
        out = list(pre[:n])
        i = 0
        while len(out) < n:
            out.append(per[i % len(per)])
            i += 1
        return tuple(out)


def _primitive(word):
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def normalize(pre, per):
    """Minimal (preperiod, period) describing pre . per^omega."""
    pre, per = tuple(pre), tuple(per)
    if not per:
        return pre, per
    per = _primitive(per)
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = per[-1:] + per[:-1]
    return pre, per


def format_digits(word, alphabet_size: int) -> str:
    if alphabet_size <= 10:
        return "".join(str(a) for a in word)
    return ",".join(str(a) for a in word)


# ---------------------------------------------------------------------------
# single exact steps

def _check_unit_interval(x: FieldElement):
    if sign_of(x) < 0 or sign_of(x - 1) >= 0:
        raise DomainError("x must satisfy 0 <= x < 1")


def t_beta_step(x: FieldElement, base: BetaBase | None = None):
    """(floor(beta x), beta x - floor(beta x)) computed exactly."""
    _check_unit_interval(x)
    b = base if base is not None else make_base(x.poly)
    bx = x * FieldElement(x.poly, (0, 1))
    for a in range(b.alphabet_size):
        if sign_of(bx - a) >= 0 and sign_of(bx - (a + 1)) < 0:
            return a, bx - a
    raise AssertionError("digit outside the alphabet")


@lru_cache(maxsize=64)
def _params(coeffs):
    base = make_base(coeffs)
    pows, errs = _float_powers(coeffs)
    d = len(coeffs) - 1
    m = list(coeffs[:d]) + [0] * (3 - d)
    p = list(pows[1:]) + [0.0] * (3 - d)
    e = list(errs[1:]) + [0.0] * (3 - d)
    return (d, int(m[0]), int(m[1]), int(m[2]), float(p[0]), float(p[1]),
            float(e[0]), float(e[1]), base.alphabet_size)


def _times_beta(c, coeffs):
    d = len(coeffs) - 1
    top = c[d - 1]
    out = [-coeffs[0] * top]
    for i in range(1, d):
        out.append(c[i - 1] - coeffs[i] * top)
    return tuple(out)


def _exact_sign_int(c, coeffs, poly):
    s = _float_sign(c, coeffs)
    if s is None:
        s = sign_of(FieldElement(poly, c))
    return s


def _py_step(c, q, coeffs, poly, A):
    """Exact step on integer coordinates over denominator q."""
    n = _times_beta(c, coeffs)
    pows, _ = _float_powers(coeffs)
    try:
        guess = math.floor(sum(float(v) * p for v, p in zip(n, pows)) / q)
    except (OverflowError, ValueError):
        guess = 0
    a = min(max(guess, 0), A - 1)
    while 0 <= a < A:
        w = (n[0] - a * q,) + n[1:]
        if _exact_sign_int(w, coeffs, poly) < 0:
            a -= 1
            continue
        w1 = (n[0] - (a + 1) * q,) + n[1:]
        if _exact_sign_int(w1, coeffs, poly) >= 0:
            a += 1
            continue
        break
    if not 0 <= a < A:
        raise DomainError("orbit left the unit interval")
    return a, (n[0] - a * q,) + n[1:]


def _expand_hash(c, q, base, budget):
    coeffs = base.coefficients
    poly = base.minpoly
    A = base.alphabet_size
    seen = {c: 0}
    digits = []
    state = c
    while True:
        if len(digits) >= budget:
            return Expansion(tuple(digits[:1000]), (), True, len(digits))
        a, state = _py_step(state, q, coeffs, poly, A)
        digits.append(a)
        if max(abs(v) for v in state).bit_length() > MAX_COORD_BITS:
            # only non-Pisot bases grow their orbit coordinates without bound
            return Expansion(tuple(digits[:1000]), (), True, len(digits))
        if state in seen:
            mu = seen[state]
            if not any(state):
                return Expansion(*normalize(digits[:mu], ()), False, len(digits))
            return Expansion(*normalize(digits[:mu], digits[mu:]), False, len(digits))
        seen[state] = len(digits)


def _expand_kernel(c, q, base, budget):
    d, m0, m1, m2, p1, p2, e1, e2, A = _params(base.coefficients)
    c3 = tuple(c) + (0,) * (3 - len(c))
    if max(abs(v) for v in c3 + (q,)) > 2 ** 48:
        return None
    st, mu, lam, steps = K.orbit_cycle(c3[0], c3[1], c3[2], q, d, m0, m1, m2,
                                       p1, p2, e1, e2, A, budget)
    if st == K.BUDGET:
        st2, digs, _ = K.orbit_digits(c3[0], c3[1], c3[2], q, d, m0, m1, m2,
                                      p1, p2, e1, e2, A, min(steps, 1000))
        return Expansion(tuple(int(a) for a in digs), (), True, int(steps))
    if st != K.OK:
        return None
    st, digs, _ = K.orbit_digits(c3[0], c3[1], c3[2], q, d, m0, m1, m2,
                                 p1, p2, e1, e2, A, mu + lam)
    if st != K.OK:
        return None
    st, _, cyc = K.orbit_digits(c3[0], c3[1], c3[2], q, d, m0, m1, m2,
                                p1, p2, e1, e2, A, mu)
    digs = tuple(int(a) for a in digs)
    if st == K.OK and not cyc.any():
        return Expansion(*normalize(digs[:mu], ()), False, int(steps))
    return Expansion(*normalize(digs[:mu], digs[mu:]), False, int(steps))


def expand(x: FieldElement, base: BetaBase | None = None, budget: int = DEFAULT_BUDGET,
           engine: str = "kernel") -> Expansion:
    """Greedy expansion of x in [0, 1) as preperiod + period.

    ``engine`` is "kernel" (compiled Brent cycle detection, falling back to
    the exact engine when a digit cannot be decided in floating point) or
    "hash" (exact states recorded in a dictionary).
    """
    b = base if base is not None else make_base(x.poly)
    _check_unit_interval(x)
    c, q = x.integer_form()
    if engine == "kernel":
        out = _expand_kernel(c, q, b, budget)
        if out is not None:
            return out
    elif engine != "hash":
        raise ValueError(f"unknown engine {engine!r}")
    return _expand_hash(c, q, b, budget)


def is_purely_periodic(x: FieldElement, base: BetaBase | None = None,
                       budget: int = DEFAULT_BUDGET) -> bool:
    exp = expand(x, base, budget)
    if exp.truncated:
        from .errors import BudgetExceeded
        raise BudgetExceeded(f"orbit longer than {budget} steps")
    return exp.purely_periodic


def orbit_returns(x: FieldElement, base: BetaBase | None = None,
                  budget: int = DEFAULT_BUDGET) -> bool:
    """True iff T^k(x) = x for some k >= 1, checked by direct iteration."""
    b = base if base is not None else make_base(x.poly)
    _check_unit_interval(x)
    c, q = x.integer_form()
    coeffs, poly, A = b.coefficients, b.minpoly, b.alphabet_size
    state = c
    seen = {c}
    for _ in range(budget):
        _, state = _py_step(state, q, coeffs, poly, A)
        if state == c:
            return True
        if state in seen:
            # the orbit entered a cycle that avoids x
            return False
        seen.add(state)
    from .errors import BudgetExceeded
    raise BudgetExceeded(f"orbit longer than {budget} steps")


# ---------------------------------------------------------------------------
# the expansion of 1

@dataclass(frozen=True)
class OneExpansion:
    d_one: Expansion
    d_star: Expansion

    @property
    def m(self) -> int:
        return len(self.d_star.preperiod)

    @property
    def n(self) -> int:
        return len(self.d_star.period)

    @property
    def t(self) -> tuple:
        """t_1 ... t_{m+n} of the quasi-greedy expansion."""
        return self.d_star.preperiod + self.d_star.period


@lru_cache(maxsize=64)
def _one(coeffs):
    base = make_base(coeffs)
    poly = base.minpoly
    beta = FieldElement(poly, (0, 1))
    lo, _ = base.beta_enclosure
    t1 = math.floor(lo)
    while sign_of(beta - (t1 + 1)) >= 0:
        t1 += 1
    while sign_of(beta - t1) < 0:
        t1 -= 1
    rest = expand(beta - t1, base, budget=ONE_BUDGET)
    if rest.truncated:
        raise DomainError(f"expansion of 1 is not eventually periodic within {ONE_BUDGET} digits")
    if rest.period:
        d_one = Expansion(*normalize((t1,) + rest.preperiod, rest.period), False, rest.steps + 1)
        d_star = d_one
    else:
        word = (t1,) + rest.preperiod
        d_one = Expansion(word, (), False, rest.steps + 1)
        d_star = Expansion(*normalize((), word[:-1] + (word[-1] - 1,)), False, rest.steps + 1)
    return OneExpansion(d_one, d_star)


def expansion_of_one(base: BetaBase) -> OneExpansion:
    """d_beta(1) and the quasi-greedy d*_beta(1)."""
    return _one(base.coefficients)


# ---------------------------------------------------------------------------
# words

def _as_infinite(word):
    """Coerce to a (preperiod, period) pair with nonempty period."""
    if isinstance(word, Expansion):
        return word.as_word()
    if isinstance(word, tuple) and len(word) == 2 and all(isinstance(w, (tuple, list)) for w in word):
        pre, per = tuple(word[0]), tuple(word[1])
        return normalize(pre, per or (0,))
    return normalize(tuple(word), (0,))


def _digit_at(word, i):
    pre, per = word
    if i < len(pre):
        return pre[i]
    return per[(i - len(pre)) % len(per)]


def compare_words(u, v) -> int:
    """Lexicographic comparison (-1, 0, 1) of eventually periodic words."""
    u, v = _as_infinite(u), _as_infinite(v)
    n = len(u[0]) + len(v[0]) + math.lcm(len(u[1]), len(v[1]))
    for i in range(n):
        a, b = _digit_at(u, i), _digit_at(v, i)
        if a != b:
            return -1 if a < b else 1
    return 0


def shift(word, k: int):
    pre, per = word
    if k <= len(pre):
        return normalize(pre[k:], per)
    k -= len(pre)
    k %= len(per)
    return normalize((), per[k:] + per[:k])


def is_admissible(word, base: BetaBase) -> bool:
    """Parry's condition: every suffix is smaller than d*_beta(1).

    ``word`` may be a finite digit sequence (read as word . 0^omega), a
    (preperiod, period) pair or an Expansion.
    """
    A = base.alphabet_size
    w = _as_infinite(word)
    for a in w[0] + w[1]:
        if not 0 <= a < A:
            raise DomainError(f"digit {a} outside the alphabet")
    dstar = expansion_of_one(base).d_star.as_word()
    for k in range(len(w[0]) + len(w[1])):
        if compare_words(shift(w, k), dstar) >= 0:
            return False
    return True


@dataclass(frozen=True)
class ParryAutomaton:
    """Recognizer of admissible words.

    State s means the longest suffix read so far that is a prefix of d* has
    length s (reduced into the periodic part).  A digit a < t_{s+1} resets to
    0, a = t_{s+1} advances, and a > t_{s+1} is forbidden.
    """

    t: tuple
    m: int
    n: int

    @property
    def size(self) -> int:
        return self.m + self.n

    def delta(self, s: int, a: int):
        ts = self.t[s]
        if a < ts:
            return 0
        if a == ts:
            return s + 1 if s + 1 < self.size else self.m
        return None

    def transitions(self):
        """All (source, digit, target) triples."""
        out = []
        for s in range(self.size):
            for a in range(self.t[s] + 1):
                out.append((s, a, self.delta(s, a)))
        return out

    def run(self, word, start: int = 0):
        s = start
        for a in word:
            s = self.delta(s, a)
            if s is None:
                return None
        return s


def parry_automaton(base: BetaBase) -> ParryAutomaton:
    one = expansion_of_one(base)
    return ParryAutomaton(one.t, one.m, one.n)


# ---------------------------------------------------------------------------
# values

def _horner_int(word, coeffs):
    """Integer coordinates of a_1 beta^(p-1) + ... + a_p."""
    d = len(coeffs) - 1
    acc = (0,) * d
    for a in word:
        acc = _times_beta(acc, coeffs)
        acc = (acc[0] + a,) + acc[1:]
    return acc


def _beta_pow_int(k, coeffs):
    d = len(coeffs) - 1
    acc = (1,) + (0,) * (d - 1)
    for _ in range(k):
        acc = _times_beta(acc, coeffs)
    return acc


def periodic_value(word: Sequence[int], base: BetaBase) -> FieldElement:
    """Value of the purely periodic word (a_1 ... a_p)^omega."""
    word = tuple(word)
    if not word:
        raise DomainError("empty period")
    coeffs = base.coefficients
    num = FieldElement(base.minpoly, _horner_int(word, coeffs))
    den = FieldElement(base.minpoly, _beta_pow_int(len(word), coeffs)) - 1
    return num / den


def finite_value(word: Sequence[int], base: BetaBase) -> FieldElement:
    """Value of .a_1 ... a_k."""
    word = tuple(word)
    num = FieldElement(base.minpoly, _horner_int(word, base.coefficients))
    return num / FieldElement(base.minpoly, _beta_pow_int(len(word), base.coefficients))


def expansion_value(exp, base: BetaBase) -> FieldElement:
    """Value of an eventually periodic digit word after the radix point."""
    if isinstance(exp, Expansion):
        if exp.truncated:
            raise DomainError("truncated expansion")
        pre, per = exp.preperiod, exp.period
    else:
        pre, per = exp
    val = finite_value(pre, base)
    if per:
        shift_ = FieldElement(base.minpoly, _beta_pow_int(len(pre), base.coefficients))
        val = val + periodic_value(per, base) / shift_
    return val


@lru_cache(maxsize=64)
def _gaps(coeffs):
    base = make_base(coeffs)
    one = expansion_of_one(base)
    beta = FieldElement(base.minpoly, (0, 1))
    t = one.t
    g = [FieldElement(base.minpoly, (1,))]
    for i in range(one.m + one.n):
        g.append(beta * g[-1] - t[i])
    if g[one.m + one.n] != g[one.m]:
        raise AssertionError("successor gaps are not periodic")
    return tuple(g[: one.m + one.n])


def successor_gaps(base: BetaBase) -> list:
    """T^0(1) = 1, T^1(1), ..., T^(m+n-1)(1) as exact elements.

    Values are taken along d*_beta(1) so none of them is 0; for finite
    d_beta(1) these coincide with the iterates of the transformation.
    """
    return list(_gaps(base.coefficients))
