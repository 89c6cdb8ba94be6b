"""Exact arithmetic in Q(beta) and certified embeddings of its elements.

Elements are stored as rational coordinates in the power basis
1, beta, ..., beta^(d-1).  Every decision (signs, floors, equality) is made
exactly; floats only appear in embeddings, always with an error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvalidBaseError

__all__ = [
    "MinimalPolynomial",
    "RootEnclosure",
    "BetaBase",
    "FieldElement",
    "EmbeddedPoint",
    "make_base",
    "parse_base",
    "is_pisot",
    "is_unit",
    "arith",
    "sign_of",
    "embed",
    "lattice_points",
]

_U = 2.0 ** -52


# ---------------------------------------------------------------------------
# polynomials over Q, coefficient lists from constant term upwards

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _prem(a, b):
    a = [Fraction(c) for c in a]
    b = _trim(b)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
    return _trim(a) if a else [Fraction(0)]


def _deriv(p):
    return [i * p[i] for i in range(1, len(p))] or [0]


def _sturm_chain(p):
    chain = [[Fraction(c) for c in p], [Fraction(c) for c in _deriv(p)]]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        r = _prem(chain[-2], chain[-1])
        if len(r) == 1 and r[0] == 0:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x):
    signs = []
    for q in chain:
        v = _peval(q, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _isolate_real_roots(coeffs):
    """Isolating intervals (lo, hi] with rational ends, in ascending order."""
    chain = _sturm_chain(coeffs)
    bound = Fraction(1 + max(abs(c) for c in coeffs[:-1]))
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        k = _sign_changes(chain, lo) - _sign_changes(chain, hi)
        if k == 0:
            continue
        if k == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    out.sort()
    return out


@lru_cache(maxsize=4096)
def _refine_root(coeffs, lo, hi, bits):
    """Bisect an isolating interval until its width is at most 2^-bits."""
    target = Fraction(1, 1 << bits)
    slo = _peval(coeffs, lo) > 0
    while hi - lo > target:
        mid = (lo + hi) / 2
        v = _peval(coeffs, mid)
        if v == 0:
            return mid, mid
        if (v > 0) == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _sqrt_bounds(y: Fraction, bits: int):
    """Rational lower and upper bounds on sqrt(y), y >= 0."""
    if y <= 0:
        return Fraction(0), Fraction(0)
    scale = 1 << (2 * bits)
    n = math.isqrt(y.numerator * scale // y.denominator)
    return Fraction(n, 1 << bits), Fraction(n + 1, 1 << bits)


def _imul(a, b):
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(ps), max(ps)


def _iadd(a, b):
    return a[0] + b[0], a[1] + b[1]


def _iscale(c, a):
    return (c * a[0], c * a[1]) if c >= 0 else (c * a[1], c * a[0])


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic integer polynomial of degree 2 or 3, constant term first."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) not in (3, 4):
            raise InvalidBaseError("only degree 2 and 3 polynomials are supported")
        if coeffs[-1] != 1:
            raise InvalidBaseError("polynomial must be monic")
        c0 = coeffs[0]
        if c0 == 0:
            raise InvalidBaseError("polynomial is reducible (root 0)")
        for r in _divisors(abs(c0)):
            for cand in (r, -r):
                if sum(c * cand ** i for i, c in enumerate(coeffs)) == 0:
                    raise InvalidBaseError(f"polynomial is reducible (rational root {cand})")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def parse(cls, text: str) -> "MinimalPolynomial":
        try:
            coeffs = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
        except ValueError as exc:
            raise InvalidBaseError(f"malformed polynomial {text!r}") from exc
        return cls(tuple(coeffs))

    def to_text(self) -> str:
        return ",".join(str(c) for c in self.coefficients)

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(c)
            body = (str(mag) if mag != 1 or i == 0 else "") + mono
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def is_reciprocal(self) -> bool:
        c = self.coefficients
        return c == c[::-1] or c == tuple(-x for x in c[::-1])


def _divisors(n):
    return [k for k in range(1, n + 1) if n % k == 0] if n else []


@dataclass(frozen=True)
class RootEnclosure:
    """Real interval (im = (0, 0)) or complex rectangle with rational corners."""

    kind: str
    re: tuple
    im: tuple = (Fraction(0), Fraction(0))

    def contains_float(self, z: complex, slack: float = 0.0) -> bool:
        return (float(self.re[0]) - slack <= z.real <= float(self.re[1]) + slack
                and float(self.im[0]) - slack <= z.imag <= float(self.im[1]) + slack)


@dataclass(frozen=True)
class BetaBase:
    """A real algebraic base beta > 1 with certified root enclosures.

    ``enclosures`` lists the dominant root first, then the other real roots in
    descending order, then one enclosure per complex conjugate pair (the member
    with positive imaginary part).  This is also the coordinate order of the
    embedding map.
    """

    minpoly: MinimalPolynomial
    enclosures: tuple
    signature: tuple
    bits: int = 32
    dominant_index: int = 0
    _real_isolators: tuple = field(default=(), repr=False, compare=False)

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def coefficients(self) -> tuple:
        return self.minpoly.coefficients

    @property
    def beta_enclosure(self) -> tuple:
        return self.enclosures[self.dominant_index].re

    def refined(self, bits: int) -> "BetaBase":
        """A new base object whose enclosures have width about 2^-bits."""
        if bits <= self.bits:
            return self
        return _build_base(self.minpoly, self._real_isolators, bits)

    def beta_interval(self, bits: int | None = None) -> tuple:
        b = self if bits is None else self.refined(bits)
        return b.beta_enclosure

    @property
    def beta(self) -> float:
        return _float_data(self.minpoly.coefficients)[0]

    @property
    def conjugates(self) -> tuple:
        """Float values of the non-dominant embeddings of beta, in embedding order."""
        return _float_data(self.minpoly.coefficients)[1]

    @cached_property
    def coord_kinds(self) -> tuple:
        return tuple(e.kind for e in self.enclosures[1:])

    @property
    def alphabet_size(self) -> int:
        lo, hi = self.beta_enclosure
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo) + 1
        return self.refined(self.bits * 2).alphabet_size

    @property
    def rho_max(self) -> float:
        return max(abs(c) for c in self.conjugates)

    def modulus_and_angle(self) -> list:
        """Certified (modulus interval, angle interval) for each complex conjugate."""
        out = []
        for e in self.enclosures[1:]:
            if e.kind != "complex":
                continue
            re2 = _imul(e.re, e.re)
            im2 = _imul(e.im, e.im)
            ms = _iadd(re2, im2)
            mlo = _sqrt_bounds(ms[0], self.bits + 8)[0]
            mhi = _sqrt_bounds(ms[1], self.bits + 8)[1]
            xm = float((e.re[0] + e.re[1]) / 2)
            ym = float((e.im[0] + e.im[1]) / 2)
            theta = math.atan2(ym, xm)
            spread = (float(e.re[1] - e.re[0]) + float(e.im[1] - e.im[0])) / float(mlo)
            slack = spread + 8 * _U * abs(theta) + 1e-300
            out.append(((mlo, mhi), (theta - slack, theta + slack)))
        return out

    @property
    def packed_powers(self) -> np.ndarray:
        """Packed plane coordinates of 1, beta, ..., beta^(d-1) (see ``plane``)."""
        return _float_data(self.minpoly.coefficients)[2]

    def __str__(self):
        return str(self.minpoly)


@lru_cache(maxsize=64)
def _float_data(coeffs):
    base = make_base(MinimalPolynomial(coeffs)).refined(64)
    mids = []
    for e in base.enclosures:
        mids.append(complex(float((e.re[0] + e.re[1]) / 2), float((e.im[0] + e.im[1]) / 2)))
    beta = mids[0].real
    conj = []
    for e, z in zip(base.enclosures[1:], mids[1:]):
        conj.append(z.real if e.kind == "real" else z)
    d = len(coeffs) - 1
    kinds = tuple(e.kind for e in base.enclosures[1:])
    packed = np.zeros(d, dtype=np.complex128)
    for j in range(d):
        if kinds == ("complex",):
            packed[j] = conj[0] ** j
        elif kinds == ("real",):
            packed[j] = complex(conj[0] ** j, 0.0)
        else:
            packed[j] = complex(conj[0] ** j, conj[1] ** j)
    packed.setflags(write=False)
    return beta, tuple(conj), packed


def _build_base(minpoly, isolators, bits):
    coeffs = tuple(Fraction(c) for c in minpoly.coefficients)
    reals = [_refine_root(coeffs, lo, hi, bits) for lo, hi in isolators]
    reals.sort(key=lambda iv: iv[0], reverse=True)
    d = minpoly.degree
    r = len(reals)
    s = (d - r) // 2
    encl = [RootEnclosure("real", iv) for iv in reals]
    if s == 1:
        # complex pair of a cubic from the real root: re = -(c2 + beta)/2,
        # |alpha|^2 = -c0 / beta
        blo, bhi = reals[0]
        c0, c2 = coeffs[0], coeffs[2]
        re = (-(c2 + bhi) / 2, -(c2 + blo) / 2)
        msq = sorted((-c0 / blo, -c0 / bhi))
        re2 = (Fraction(0) if re[0] <= 0 <= re[1] else min(re[0] ** 2, re[1] ** 2),
               max(re[0] ** 2, re[1] ** 2))
        im2 = (msq[0] - re2[1], msq[1] - re2[0])
        if im2[0] <= 0:
            return _build_base(minpoly, isolators, bits + 16)
        im = (_sqrt_bounds(im2[0], bits + 4)[0], _sqrt_bounds(im2[1], bits + 4)[1])
        encl.append(RootEnclosure("complex", re, im))
    return BetaBase(minpoly, tuple(encl), (r, s), bits, 0, tuple(isolators))


@lru_cache(maxsize=256)
def _make_base_cached(coeffs):
    minpoly = MinimalPolynomial(coeffs)
    fc = tuple(Fraction(c) for c in coeffs)
    isolators = _isolate_real_roots(fc)
    if not isolators:
        raise InvalidBaseError("polynomial has no real root")
    base = _build_base(minpoly, tuple(isolators), 32)
    lo, hi = base.beta_enclosure
    while lo <= 1 <= hi:
        base = base.refined(base.bits * 2)
        lo, hi = base.beta_enclosure
    if hi < 1:
        raise InvalidBaseError("largest real root is below 1: not an expansion base")
    return base


def make_base(minpoly) -> BetaBase:
    """Isolate the roots of ``minpoly`` and return the base it defines.

    Accepts a MinimalPolynomial, a coefficient sequence (constant term first)
    or the comma separated text form.
    """
    if isinstance(minpoly, str):
        minpoly = MinimalPolynomial.parse(minpoly)
    elif not isinstance(minpoly, MinimalPolynomial):
        minpoly = MinimalPolynomial(tuple(minpoly))
    return _make_base_cached(minpoly.coefficients)


def parse_base(text: str) -> BetaBase:
    return make_base(MinimalPolynomial.parse(text))


def _conjugate_moduli_below_one(base: BetaBase) -> bool:
    b = base
    for _ in range(40):
        verdicts = []
        for e in b.enclosures[1:]:
            if e.kind == "real":
                hi = max(abs(e.re[0]), abs(e.re[1]))
                lo = Fraction(0) if e.re[0] <= 0 <= e.re[1] else min(abs(e.re[0]), abs(e.re[1]))
            else:
                re2 = _imul(e.re, e.re)
                im2 = _imul(e.im, e.im)
                lo, hi = _iadd(re2, im2)
            if hi < 1:
                verdicts.append(True)
            elif lo > 1:
                verdicts.append(False)
            else:
                verdicts.append(None)
        if None not in verdicts:
            return all(verdicts)
        if False in verdicts:
            return False
        b = b.refined(b.bits * 2)
    # a conjugate of modulus exactly one: only possible when |c0| = 1 and the
    # polynomial is reciprocal, which never gives a Pisot number
    return False


def is_pisot(base: BetaBase) -> bool:
    """True iff every conjugate other than beta lies in the open unit disc."""
    return _conjugate_moduli_below_one(base)


def is_unit(base: BetaBase) -> bool:
    return abs(base.coefficients[0]) == 1


# ---------------------------------------------------------------------------

def _reduce(prod, mcoef):
    """Reduce a coefficient list modulo the monic polynomial with coefficients mcoef."""
    d = len(mcoef) - 1
    prod = list(prod)
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for i in range(d):
                prod[k - d + i] -= c * mcoef[i]
        prod[k] = 0
    prod = prod[:d] + [0] * (d - len(prod))
    return prod


def _solve(mat, rhs):
    n = len(rhs)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


class FieldElement:
    """Exact element c_0 + c_1 beta + ... of Q(beta)."""

    __slots__ = ("poly", "coords", "_hash")

    def __init__(self, poly, coords):
        if isinstance(poly, BetaBase):
            poly = poly.minpoly
        coords = tuple(Fraction(c) for c in coords)
        d = poly.degree
        if len(coords) > d:
            coords = tuple(_reduce(coords, poly.coefficients))
        elif len(coords) < d:
            coords = coords + (Fraction(0),) * (d - len(coords))
        self.poly = poly
        self.coords = coords
        self._hash = None

    # constructors
    @classmethod
    def from_rational(cls, poly, q) -> "FieldElement":
        return cls(poly, (Fraction(q),))

    @classmethod
    def beta_power(cls, poly, k: int) -> "FieldElement":
        b = cls(poly, (0, 1))
        if k >= 0:
            return b ** k
        return b.inverse() ** (-k)

    @classmethod
    def parse(cls, poly, text: str) -> "FieldElement":
        parts = [p for p in text.replace(" ", "").split(";") if p]
        try:
            return cls(poly, [Fraction(p) for p in parts])
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"malformed field element {text!r}") from exc

    def serialize(self) -> str:
        return ";".join(f"{c.numerator}/{c.denominator}" for c in self.coords)

    # helpers
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.poly != self.poly:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.poly, (other,))
        return None

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def integer_form(self):
        """(integer coordinates, positive common denominator)."""
        q = 1
        for c in self.coords:
            q = q * c.denominator // math.gcd(q, c.denominator)
        return tuple(int(c * q) for c in self.coords), q

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.poly, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.poly, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.poly, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.poly.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        return FieldElement(self.poly, _reduce(prod, self.poly.coefficients))

    __rmul__ = __mul__

    def _mul_matrix(self):
        d = self.poly.degree
        cols = []
        e = self
        b = FieldElement(self.poly, (0, 1))
        for _ in range(d):
            cols.append(e.coords)
            e = e * b
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        d = self.poly.degree
        return FieldElement(self.poly, _solve(self._mul_matrix(), [1] + [0] * (d - 1)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            if o.coords[0] == 0:
                raise ZeroDivisionError("division by zero")
            return FieldElement(self.poly, [a / o.coords[0] for a in self.coords])
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElement(self.poly, (1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (FieldElement, int, Fraction)) else None
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.poly.coefficients, self.coords))
        return self._hash

    def __repr__(self):
        return f"FieldElement({self.serialize()})"

    def __float__(self):
        return float(sum(float(c) * self.poly_beta() ** i for i, c in enumerate(self.coords)))

    def poly_beta(self) -> float:
        return _float_data(self.poly.coefficients)[0]


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Dispatch helper: op in {'add', 'sub', 'mul', 'div'}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# signs

@lru_cache(maxsize=64)
def _float_powers(coeffs):
    """Float powers of beta with rigorous absolute error bounds."""
    base = make_base(MinimalPolynomial(coeffs)).refined(80)
    lo, hi = base.beta_enclosure
    bf = float((lo + hi) / 2)
    e = float(hi - lo) + abs(bf) * _U
    d = len(coeffs) - 1
    pows, errs = [1.0], [0.0]
    for i in range(1, d):
        pows.append(pows[-1] * bf)
        errs.append(2.0 * i * (abs(bf) + e) ** (i - 1) * e + 4 * i * _U * abs(pows[-1]))
    return tuple(pows), tuple(errs)


def _interval_value(coords, lo, hi):
    acc = (Fraction(0), Fraction(0))
    plo, phi = Fraction(1), Fraction(1)
    for c in coords:
        if c:
            acc = _iadd(acc, _iscale(c, (plo, phi)))
        plo, phi = plo * lo, phi * hi
    return acc


def _float_sign(int_coords, coeffs):
    pows, errs = _float_powers(coeffs)
    try:
        fc = [float(c) for c in int_coords]
    except OverflowError:
        return None
    if any(math.isinf(c) for c in fc):
        return None
    val = 0.0
    err = 0.0
    mag = 0.0
    for c, ic, p, e in zip(fc, int_coords, pows, errs):
        t = c * p
        val += t
        mag += abs(t)
        err += abs(c) * e
    err += 8 * _U * mag
    if val > err:
        return 1
    if val < -err:
        return -1
    return None


def sign_of(x: FieldElement, base: BetaBase | None = None) -> int:
    """Exact sign (-1, 0 or 1) of x evaluated at beta."""
    if x.is_zero():
        return 0
    ic, _ = x.integer_form()
    coeffs = x.poly.coefficients
    s = _float_sign(ic, coeffs)
    if s is not None:
        return s
    b = base if base is not None else make_base(x.poly)
    bits = max(b.bits, 64)
    while True:
        lo, hi = b.beta_interval(bits)
        vlo, vhi = _interval_value(x.coords, lo, hi)
        if vlo > 0:
            return 1
        if vhi < 0:
            return -1
        bits *= 2


def floor_of(x: FieldElement) -> int:
    """Exact floor of the real value of x."""
    guess = math.floor(float(x)) if abs(float(x)) < 2 ** 52 else None
    if guess is None:
        guess = _exact_floor_slow(x)
    while sign_of(x - guess) < 0:
        guess -= 1
    while sign_of(x - (guess + 1)) >= 0:
        guess += 1
    return guess


def _exact_floor_slow(x):
    b = make_base(x.poly)
    bits = 64
    while True:
        lo, hi = _interval_value(x.coords, *b.beta_interval(bits))
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        bits *= 2


# ---------------------------------------------------------------------------
# embeddings

@dataclass(frozen=True)
class EmbeddedPoint:
    """Xi(x): the non-dominant embeddings of x with a common error bound.

    ``coords`` holds a float for each real embedding and a complex number for
    each complex one; ``error`` bounds the distance of every coordinate from
    its true value.
    """

    coords: tuple
    error: float
    kinds: tuple

    def packed(self) -> complex:
        return _pack(self.coords, self.kinds)

    def distance(self, other: "EmbeddedPoint") -> float:
        return max(abs(complex(a) - complex(b)) for a, b in zip(self.coords, other.coords))


def _pack(values, kinds):
    if kinds == ("complex",):
        return complex(values[0])
    if kinds == ("real",):
        return complex(float(values[0].real if isinstance(values[0], complex) else values[0]), 0.0)
    return complex(float(values[0]), float(values[1]))


def embed(x: FieldElement, base: BetaBase | None = None, width: float = 2.0 ** -32) -> EmbeddedPoint:
    """Certified Xi(x) with every coordinate within ``width`` of the truth."""
    if width < 2.0 ** -48:
        raise DomainError("requested width is below double precision")
    b = base if base is not None else make_base(x.poly)
    bits = max(b.bits, 40)
    kinds = tuple(e.kind for e in b.enclosures[1:])
    while True:
        bb = b.refined(bits)
        coords, err = [], 0.0
        for e in bb.enclosures[1:]:
            if e.kind == "real":
                v = _interval_value(x.coords, *e.re) if e.re[0] > 0 else _real_interval_eval(x.coords, e.re)
                mid = (v[0] + v[1]) / 2
                coords.append(float(mid))
                err = max(err, float(v[1] - v[0]) / 2 + abs(float(mid)) * _U)
            else:
                re, im = _complex_interval_eval(x.coords, e.re, e.im)
                mr, mi = (re[0] + re[1]) / 2, (im[0] + im[1]) / 2
                coords.append(complex(float(mr), float(mi)))
                err = max(err, math.hypot(float(re[1] - re[0]) / 2, float(im[1] - im[0]) / 2)
                          + (abs(float(mr)) + abs(float(mi))) * _U)
        if err <= width:
            return EmbeddedPoint(tuple(coords), err, kinds)
        bits *= 2


def _real_interval_eval(coords, iv):
    acc = (Fraction(0), Fraction(0))
    p = (Fraction(1), Fraction(1))
    for c in coords:
        if c:
            acc = _iadd(acc, _iscale(c, p))
        p = _imul(p, iv)
    return acc


def _complex_interval_eval(coords, re, im):
    acc_r = (Fraction(0), Fraction(0))
    acc_i = (Fraction(0), Fraction(0))
    pr, pi = (Fraction(1), Fraction(1)), (Fraction(0), Fraction(0))
    for c in coords:
        if c:
            acc_r = _iadd(acc_r, _iscale(c, pr))
            acc_i = _iadd(acc_i, _iscale(c, pi))
        nr = _iadd(_imul(pr, re), _iscale(-1, _imul(pi, im)))
        ni = _iadd(_imul(pr, im), _imul(pi, re))
        pr, pi = nr, ni
    return acc_r, acc_i


def plane(base: BetaBase, int_coords) -> np.ndarray:
    """Packed float embedding of integer coordinate rows.

    One complex number per element: the complex embedding itself, a single real
    embedding on the real axis, or two real embeddings packed as (x1, x2).
    """
    arr = np.asarray(int_coords, dtype=np.float64)
    return arr @ base.packed_powers


def plane_norm(base: BetaBase, pts: np.ndarray) -> np.ndarray:
    """Max over coordinates of the Euclidean norm, for packed points."""
    kinds = base.coord_kinds
    if kinds == ("complex",):
        return np.abs(pts)
    if kinds == ("real",):
        return np.abs(pts.real)
    return np.maximum(np.abs(pts.real), np.abs(pts.imag))


# ---------------------------------------------------------------------------
# lattice enumeration

def _linear_map(base: BetaBase) -> np.ndarray:
    """Rows: real value, then the real components of the packed embedding."""
    d = base.degree
    b = base.beta
    pk = base.packed_powers
    rows = [[b ** j for j in range(d)]]
    rows.append([pk[j].real for j in range(d)])
    if base.coord_kinds != ("real",):
        rows.append([pk[j].imag for j in range(d)])
    return np.array(rows)


def lattice_points(base: BetaBase, center: complex = 0j, radius: float = 1.0,
                   max_points: int = 5_000_000) -> list:
    """All y in Z[beta] with 0 <= y < 1 whose embedding lies near ``center``.

    The embedding distance uses the max-of-norms metric on packed points.  The
    returned list is a superset by at most a 1e-9 margin and is sorted by the
    real value of y.
    """
    d = base.degree
    M = _linear_map(base)
    Minv = np.linalg.inv(M)
    cen = np.array([0.5, center.real, center.imag][:d])
    half = np.array([0.5, radius, radius][:d]) + 1e-9
    lo = Minv @ cen - np.abs(Minv) @ half
    hi = Minv @ cen + np.abs(Minv) @ half
    ranges = [np.arange(math.floor(lo[j]) - 1, math.ceil(hi[j]) + 2) for j in range(1, d)]
    size = math.prod(len(r) for r in ranges)
    if size > max_points:
        raise DomainError(f"lattice search region too large ({size} candidates)")
    grids = np.meshgrid(*ranges, indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    b = base.beta
    s = sum(ks[:, j - 1] * b ** j for j in range(1, d))
    k0 = -np.floor(s).astype(np.int64)
    full = np.column_stack([k0, ks])
    pts = plane(base, full)
    dist = plane_norm(base, pts - center)
    keep = dist <= radius + 1e-9
    out = []
    for row in full[keep]:
        y = FieldElement(base.minpoly, [int(v) for v in row])
        # repair the integer part when the float floor was near an integer
        fl = floor_of(y)
        if fl != 0:
            y = y - fl
            if plane_norm(base, plane(base, [[int(c) for c in y.integer_form()[0]]]) - center)[0] > radius + 1e-9:
                continue
        out.append(y)
    uniq = {y.coords: y for y in out}
    return sorted(uniq.values(), key=float)
