"""Compiled inner loops for beta-transformation orbits.

A point x of Q(beta) in [0, 1) is held as integer coordinates (c0, c1, c2)
over a fixed denominator q.  Digits are decided with a floating evaluation
that carries an explicit error bound; when the bound cannot separate the
value from an integer the kernel stops with BAIL and the caller finishes the
computation exactly.
"""
import math

import numpy as np
from numba import njit

OK = 0
BAIL = 1
OVERFLOW = 2
RANGE = 3
BUDGET = 4

_U = 2.0 ** -52
_LIMIT = 2 ** 50


@njit(cache=True)
def _sgn(w0, w1, w2, p1, p2, e1, e2):
    if w0 == 0 and w1 == 0 and w2 == 0:
        return 0
    f0 = float(w0)
    f1 = float(w1) * p1
    f2 = float(w2) * p2
    v = f0 + f1 + f2
    err = abs(float(w1)) * e1 + abs(float(w2)) * e2 + 8.0 * _U * (abs(f0) + abs(f1) + abs(f2))
    if v > err:
        return 1
    if v < -err:
        return -1
    return 2


@njit(cache=True)
def step(c0, c1, c2, q, d, m0, m1, m2, p1, p2, e1, e2, A):
    """One application of T_beta.  Returns (status, digit, n0, n1, n2)."""
    if d == 3:
        n0 = -m0 * c2
        n1 = c0 - m1 * c2
        n2 = c1 - m2 * c2
    else:
        n0 = -m0 * c1
        n1 = c0 - m1 * c1
        n2 = 0
    if abs(n0) > _LIMIT or abs(n1) > _LIMIT or abs(n2) > _LIMIT:
        return OVERFLOW, 0, c0, c1, c2
    v = (float(n0) + float(n1) * p1 + float(n2) * p2) / float(q)
    a = int(math.floor(v))
    if a < 0:
        a = 0
    if a > A - 1:
        a = A - 1
    for _ in range(A + 2):
        s = _sgn(n0 - a * q, n1, n2, p1, p2, e1, e2)
        if s == 2:
            return BAIL, 0, c0, c1, c2
        if s < 0:
            a -= 1
            if a < 0:
                return RANGE, 0, c0, c1, c2
            continue
        s2 = _sgn(n0 - (a + 1) * q, n1, n2, p1, p2, e1, e2)
        if s2 == 2:
            return BAIL, 0, c0, c1, c2
        if s2 >= 0:
            a += 1
            if a > A - 1:
                return RANGE, 0, c0, c1, c2
            continue
        return OK, a, n0 - a * q, n1, n2
    return RANGE, 0, c0, c1, c2


@njit(cache=True)
def orbit_cycle(c0, c1, c2, q, d, m0, m1, m2, p1, p2, e1, e2, A, budget):
    """Brent cycle detection on the orbit of (c0, c1, c2)/q.

    Returns (status, mu, lam, steps) where mu is the preperiod length and lam
    the period length.  A return to the start point is reported directly.
    """
    power = 1
    lam = 1
    t0, t1, t2 = c0, c1, c2
    st, a, h0, h1, h2 = step(c0, c1, c2, q, d, m0, m1, m2, p1, p2, e1, e2, A)
    if st != OK:
        return st, 0, 0, 1
    steps = 1
    while True:
        if h0 == c0 and h1 == c1 and h2 == c2:
            return OK, 0, steps, steps
        if h0 == t0 and h1 == t1 and h2 == t2:
            break
        if steps >= budget:
            return BUDGET, 0, 0, steps
        if power == lam:
            t0, t1, t2 = h0, h1, h2
            power *= 2
            lam = 0
        st, a, h0, h1, h2 = step(h0, h1, h2, q, d, m0, m1, m2, p1, p2, e1, e2, A)
        if st != OK:
            return st, 0, 0, steps
        lam += 1
        steps += 1
    # locate the start of the cycle
    h0, h1, h2 = c0, c1, c2
    for _ in range(lam):
        st, a, h0, h1, h2 = step(h0, h1, h2, q, d, m0, m1, m2, p1, p2, e1, e2, A)
    t0, t1, t2 = c0, c1, c2
    mu = 0
    while not (t0 == h0 and t1 == h1 and t2 == h2):
        st, a, t0, t1, t2 = step(t0, t1, t2, q, d, m0, m1, m2, p1, p2, e1, e2, A)
        st, a, h0, h1, h2 = step(h0, h1, h2, q, d, m0, m1, m2, p1, p2, e1, e2, A)
        mu += 1
    return OK, mu, lam, steps + lam + 2 * mu


@njit(cache=True)
def orbit_digits(c0, c1, c2, q, d, m0, m1, m2, p1, p2, e1, e2, A, count):
    """First ``count`` digits of the orbit.  Returns (status, digits, state)."""
    out = np.zeros(count, dtype=np.int64)
    for i in range(count):
        st, a, c0, c1, c2 = step(c0, c1, c2, q, d, m0, m1, m2, p1, p2, e1, e2, A)
        if st != OK:
            return st, out[:i], np.array([c0, c1, c2], dtype=np.int64)
        out[i] = a
    return OK, out, np.array([c0, c1, c2], dtype=np.int64)


@njit(cache=True)
def batch_period_check(nums, q, d, m0, m1, m2, p1, p2, e1, e2, A, budget):
    """Pure periodicity of rationals nums[i]/q: 1 periodic, 0 not, -1 unresolved.

    ``lam`` receives the period length (or the preperiod + period when the
    orbit is not purely periodic).
    """
    n = nums.shape[0]
    verdict = np.full(n, -1, dtype=np.int64)
    lam_out = np.zeros(n, dtype=np.int64)
    mu_out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        st, mu, lam, steps = orbit_cycle(nums[i], 0, 0, q, d, m0, m1, m2, p1, p2, e1, e2, A, budget)
        if st == OK:
            # the fixed point 0 is the only cycle of a finite expansion
            mu_out[i] = mu
            lam_out[i] = lam
            verdict[i] = 1 if mu == 0 else 0
    return verdict, mu_out, lam_out


@njit(cache=True)
def batch_orbits(ps, qs, d, m0, m1, m2, p1, p2, e1, e2, A, budget):
    """Cycle data for rationals ps[i]/qs[i]: status, preperiod, period arrays."""
    n = ps.shape[0]
    status = np.zeros(n, dtype=np.int64)
    mu_out = np.zeros(n, dtype=np.int64)
    lam_out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        st, mu, lam, steps = orbit_cycle(ps[i], 0, 0, qs[i], d, m0, m1, m2, p1, p2, e1, e2, A, budget)
        status[i] = st
        mu_out[i] = mu
        lam_out[i] = lam
    return status, mu_out, lam_out
