"""Exclusion certificates for the Ito-Rao criterion.

A rational x in [0, 1) is purely periodic iff -Xi(x) lies in the union of the
subtiles T_i with x < T^i(1).  Since the tiles T(y), y in Z[beta] cap [0, 1),
cover the embedding space, it is enough to show that -Xi(x) avoids every
T(y) with y != 0 and every subtile T_i with T^i(1) <= x.  Both facts reduce
to proving that a segment misses a subtile, which is done by unfolding the
graph-directed equation T_s = union over p --a--> s of (a + alpha T_p) and
pruning with the certified bounding discs.  Floating error is carried along
explicitly, so a successful exclusion is a proof up to the radii being true
bounds.

A point certificate of non-periodicity excludes -Xi(x) from every eligible
subtile.  Counterexamples are still re-verified exactly by the callers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .field import BetaBase, FieldElement, lattice_points, plane, sign_of
from .tiling import TileGeometry, abs_norm, geometry, ppow

_INITIAL_ERROR = 1e-12
_NODE_BUDGET = 20_000


def _pdiv(base: BetaBase, z: complex, w: complex) -> complex:
    if base.coord_kinds == ("complex",):
        return z / w
    if base.coord_kinds == ("real",):
        return complex(z.real / w.real, 0.0)
    return complex(z.real / w.real, z.imag / w.imag)


def _contraction_floor(base: BetaBase) -> float:
    """Smallest modulus among the packed coordinates of alpha."""
    a = complex(base.packed_powers[1])
    if base.coord_kinds == ("complex",):
        return abs(a)
    if base.coord_kinds == ("real",):
        return abs(a.real)
    return min(abs(a.real), abs(a.imag))


def _segment_distance(base, p0: complex, p1: complex, c: complex) -> float:
    """A lower bound for the max-norm distance from c to the segment."""
    d = p1 - p0
    u = p0 - c
    aa = d.real * d.real + d.imag * d.imag
    if aa == 0.0:
        dist = abs(u)
    else:
        t = -(u.real * d.real + u.imag * d.imag) / aa
        t = min(1.0, max(0.0, t))
        dist = abs(u + t * d)
    if base.coord_kinds == ("real", "real"):
        # the Euclidean norm overstates the max-norm by at most sqrt 2
        dist /= math.sqrt(2.0)
    return dist * (1 - 1e-12)


class _Excluder:
    def __init__(self, base: BetaBase, budget: int = _NODE_BUDGET):
        self.base = base
        self.g: TileGeometry = geometry(base)
        self.floor = _contraction_floor(base)
        self.budget = budget
        self.nodes = 0

    def misses(self, p0: complex, p1: complex, s: int, err: float = _INITIAL_ERROR) -> bool:
        """True when the segment [p0, p1], known up to err, provably misses T_s."""
        g, base = self.g, self.base
        alpha = g.alpha
        stack = [(p0, p1, s, err)]
        while stack:
            p0, p1, s, err = stack.pop()
            self.nodes += 1
            if self.nodes > self.budget:
                return False
            r = g.radii[s]
            if _segment_distance(base, p0, p1, g.centers[s]) > r + err:
                continue
            if err > 1e-3 * r:
                return False
            if abs_norm(base, p1 - p0) > 0.25 * r:
                mid = (p0 + p1) / 2
                stack.append((p0, mid, s, err))
                stack.append((mid, p1, s, err))
                continue
            for p, a in g.preds[s]:
                q0 = _pdiv(base, p0 - a, alpha)
                q1 = _pdiv(base, p1 - a, alpha)
                grow = err / self.floor + 1e-14 * (1.0 + abs(q0) + abs(q1))
                stack.append((q0, q1, p, grow))
        return True


def _plane_of(base: BetaBase, y: FieldElement) -> complex:
    coords, q = y.integer_form()
    return complex(plane(base, [coords])[0]) / q


def _rational_point(base: BetaBase, x: float) -> complex:
    return x * ppow(base, 0)


def _gap_inside(g: TileGeometry, u: Fraction, v: Fraction) -> bool:
    """True when some gap T^i(1) lies in [u, v]."""
    poly = g.base.minpoly
    for gap, gf in zip(g.gaps, g.gap_floats):
        if gf < float(u) - 1e-9 or gf > float(v) + 1e-9:
            continue
        lo = sign_of(gap - FieldElement.from_rational(poly, u))
        hi = sign_of(gap - FieldElement.from_rational(poly, v))
        if lo >= 0 and hi <= 0:
            return True
    return False


def certify_interval(base: BetaBase, u: Fraction, v: Fraction,
                     budget: int = _NODE_BUDGET) -> bool:
    """True only if every x in [u, v] has a purely periodic expansion.

    u and v must be dyadic (exact floats) with 0 <= u <= v < 1.
    """
    u, v = Fraction(u), Fraction(v)
    if not (0 <= u <= v < 1):
        raise ValueError("need 0 <= u <= v < 1")
    if float(u) != u or float(v) != v:
        raise ValueError("interval ends must be exact floats")
    g = geometry(base)
    if _gap_inside(g, u, v):
        return False
    ex = _Excluder(base, budget)
    z0 = _rational_point(base, -float(u))
    z1 = _rational_point(base, -float(v))
    mid = (z0 + z1) / 2
    reach = g.extent + abs_norm(base, z1 - z0) / 2 + 1e-9
    ineligible = [i for i, gf in enumerate(g.gap_floats) if gf <= float(u)]
    for i in ineligible:
        if not ex.misses(z0, z1, i):
            return False
    for y in lattice_points(base, mid, reach):
        if y.is_zero():
            continue
        off = _plane_of(base, y)
        # T(y) is the union of Xi(y) + T_i over the classes with y < T^i(1)
        for i in g.eligible(y):
            if not ex.misses(z0 - off, z1 - off, i):
                return False
    return True


def certify_not_periodic(base: BetaBase, x: Fraction, budget: int = _NODE_BUDGET) -> bool:
    """True only if the rational x in [0, 1) is provably not purely periodic."""
    x = Fraction(x)
    g = geometry(base)
    ex = _Excluder(base, budget)
    poly = base.minpoly
    xv = FieldElement.from_rational(poly, x)
    # -Xi(x) is known to within the float rounding of x
    z = _rational_point(base, -float(x))
    err = _INITIAL_ERROR + abs(float(x) - x) * abs_norm(base, ppow(base, 0))
    for i in g.eligible(xv):
        if not ex.misses(z, z, i, float(err)):
            return False
    return True


@dataclass
class IntervalCover:
    """Certified intervals, grown lazily along an ascending scan."""

    base: BetaBase
    intervals: list
    attempts: int = 0
    min_width: float = 1e-12

    def __init__(self, base: BetaBase, min_width: float = 1e-12):
        self.base = base
        self.intervals = []
        self.attempts = 0
        self.min_width = min_width
        self._width = 1.0 / 64

    def covers(self, x: Fraction) -> bool:
        if self.intervals:
            u, v = self.intervals[-1]
            if u <= x <= v:
                return True
        return False

    def extend_from(self, x: Fraction, limit: float = 1.0) -> bool:
        """Try to certify an interval starting at x; True when x is covered.

        Widths adapt: doubled after a success, halved after a failure, and the
        attempt is abandoned below ``min_width``.
        """
        u = Fraction(float(x))
        if u > x:
            u = Fraction(math.nextafter(float(x), -1.0))
        u = max(u, Fraction(0))
        w = self._width
        while w >= self.min_width:
            v = Fraction(min(float(u) + w, math.nextafter(limit, 0.0)))
            if v < x:
                break
            self.attempts += 1
            if certify_interval(self.base, u, v):
                self.intervals.append((u, v))
                self._width = min(2 * w, 0.25)
                return True
            w /= 2
        self._width = max(w, self.min_width)
        return False


def dyadic_bracket(x: Fraction) -> tuple:
    """Adjacent floats (u, v) with u <= x <= v."""
    f = float(x)
    u = v = Fraction(f)
    if u > x:
        u = Fraction(math.nextafter(f, -math.inf))
    elif u < x:
        v = Fraction(math.nextafter(f, math.inf))
    return u, v
