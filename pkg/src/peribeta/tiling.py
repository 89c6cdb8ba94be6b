"""Central tile, subtiles and tiles T(y) through the embedding map Xi.

Points of the embedding space are handled in a packed form: one complex
number per element, holding the complex embedding itself, a single real
embedding on the real axis, or two real embeddings as (x1, x2).  Distances
use the max over coordinates of the Euclidean norm.

Subtiles are generated from the Parry automaton: an integral word read from
state 0 ends in the state s equal to the length of the longest suffix that is
a prefix of d*_beta(1), reduced into the periodic part, and s is its gap
class.  The successor of such a beta-integer lies at distance T^s(1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .expansion import (
    ParryAutomaton,
    compare_words,
    expand,
    expansion_of_one,
    finite_value,
    is_admissible,
    normalize,
    parry_automaton,
    periodic_value,
    successor_gaps,
    _beta_pow_int,
    _horner_int,
    _times_beta,
)
from .field import (
    BetaBase,
    FieldElement,
    embed,
    lattice_points,
    make_base,
    plane,
    plane_norm,
    sign_of,
)


# ---------------------------------------------------------------------------
# packed arithmetic

def pmul(base: BetaBase, pts, w: complex):
    """Multiply packed points by the packed embedding w of a field element."""
    if base.coord_kinds == ("complex",):
        return pts * w
    return pts.real * w.real + 1j * (pts.imag * w.imag)


def ppow(base: BetaBase, k: int) -> complex:
    """Packed embedding of beta^k."""
    a = complex(base.packed_powers[1])
    if base.coord_kinds == ("complex",):
        return a ** k
    return complex(a.real ** k, a.imag ** k)


def xi(x: FieldElement, base: BetaBase | None = None) -> complex:
    """Packed float embedding of an exact element."""
    b = base if base is not None else make_base(x.poly)
    return embed(x, b, 1e-13).packed()


# ---------------------------------------------------------------------------
# geometry of the subtiles

@dataclass(frozen=True)
class TileGeometry:
    """Automaton, gaps and certified bounding discs of the subtiles.

    ``radii[s]`` bounds the max-norm distance of every point of T_s from
    ``centers[s]``.  The discs satisfy a + alpha D_p inside D_s for every
    transition p --a--> s, so the attractor lies inside them.
    """

    base: BetaBase
    automaton: ParryAutomaton
    gaps: tuple
    gap_floats: tuple
    centers: tuple
    radii: tuple
    rho: float
    alpha: complex
    preds: tuple

    @property
    def size(self) -> int:
        return self.automaton.size

    @property
    def extent(self) -> float:
        """Max norm of any point of the central tile."""
        return max(abs_norm(self.base, c) + r for c, r in zip(self.centers, self.radii))

    def eligible(self, y: FieldElement) -> tuple:
        """Classes i with y < T^i(1), decided exactly."""
        yf = float(y)
        out = []
        for i, (g, gf) in enumerate(zip(self.gaps, self.gap_floats)):
            d = gf - yf
            if abs(d) > 1e-9 * (1 + abs(yf)):
                if d > 0:
                    out.append(i)
            elif sign_of(g - y) > 0:
                out.append(i)
        return tuple(out)

    def tail_constant(self) -> float:
        """C with dist(T_i, depth k + m + n - 1 cloud of class i) <= C rho^k."""
        t = self.automaton.t
        best = 0.0
        for p in range(self.size):
            u = t[:p]
            val = 0j
            for a in u:
                val = pmul(self.base, val, self.alpha) + a
            best = max(best, self.radii[p] + abs_norm(self.base, self.centers[p] - val))
        return best

    def accuracy(self, depth: int) -> float:
        """Hausdorff accuracy of clouds generated at ``depth``."""
        k = depth - (self.size - 1)
        if k < 0:
            return math.inf
        return self.tail_constant() * self.rho ** k

    def depth_for_cell(self, cell: float, fraction: float = 0.25) -> int:
        c = self.tail_constant()
        k = max(0, math.ceil(math.log(fraction * cell / c) / math.log(self.rho)))
        while c * self.rho ** k > fraction * cell:
            k += 1
        return k + self.size - 1


def abs_norm(base, z):
    kinds = base.coord_kinds
    z = complex(z)
    if kinds == ("complex",):
        return abs(z)
    if kinds == ("real",):
        return abs(z.real)
    return max(abs(z.real), abs(z.imag))


def _cloud_level(base, auto, pts, states, alpha):
    new_p, new_s = [], []
    for s in range(auto.size):
        mask = states == s
        if not mask.any():
            continue
        scaled = pmul(base, pts[mask], alpha)
        for a in range(auto.t[s] + 1):
            new_p.append(scaled + a)
            new_s.append(np.full(scaled.shape[0], auto.delta(s, a), dtype=np.int64))
    return np.concatenate(new_p), np.concatenate(new_s)


@lru_cache(maxsize=32)
def geometry(base: BetaBase) -> TileGeometry:
    auto = parry_automaton(base)
    gaps = tuple(successor_gaps(base))
    alpha = complex(base.packed_powers[1])
    rho = base.rho_max
    preds = [[] for _ in range(auto.size)]
    for p, a, s in auto.transitions():
        preds[s].append((p, a))
    # centers from a moderate cloud
    pts = np.zeros(1, dtype=np.complex128)
    st = np.zeros(1, dtype=np.int64)
    while pts.shape[0] < 100_000:
        pts, st = _cloud_level(base, auto, pts, st, alpha)
    centers = []
    for s in range(auto.size):
        sel = pts[st == s]
        centers.append(complex(sel.mean()) if sel.size else 0j)
    # radii by value iteration, then inflated and verified
    r = [0.0] * auto.size
    for _ in range(100_000):
        new = [max((abs_norm(base, a + pmul(base, centers[p], alpha) - centers[s]) + rho * r[p])
                   for p, a in preds[s]) for s in range(auto.size)]
        if max(abs(x - y) for x, y in zip(new, r)) < 1e-14:
            r = new
            break
        r = new
    r = [x * (1 + 1e-9) + 1e-12 for x in r]
    for s in range(auto.size):
        for p, a in preds[s]:
            need = abs_norm(base, a + pmul(base, centers[p], alpha) - centers[s]) + rho * r[p]
            if need > r[s]:
                raise AssertionError("bounding discs are not invariant")
    return TileGeometry(base, auto, gaps, tuple(float(g) for g in gaps), tuple(centers),
                        tuple(r), rho, alpha, tuple(tuple(p) for p in preds))


# ---------------------------------------------------------------------------
# clouds

@dataclass
class PointCloud:
    """Packed embeddings of generated points with their gap classes.

    ``points`` and ``classes`` are aligned numpy arrays; ``values`` holds the
    real values of the generating beta-integers, in ascending order, when the
    cloud is small enough to be sorted (which is also lexicographic order of
    the padded words).  ``offset`` is the packed Xi(y) added for tiles T(y).
    """

    label: str
    points: np.ndarray
    classes: np.ndarray
    depth: int
    values: np.ndarray | None = None
    offset: complex = 0j

    def __len__(self):
        return int(self.points.shape[0])


def beta_integers(base: BetaBase, depth: int) -> list:
    """All admissible integral words of length <= depth and their exact values.

    Words carry no leading zeros (the empty word is 0).  The list is sorted by
    value.
    """
    auto = parry_automaton(base)
    coeffs = base.coefficients
    d = base.degree
    out = []
    # (word without leading zeros, state, integer coords); depth-first by word
    level = [((), 0, (0,) * d)]
    for _ in range(depth):
        nxt = []
        for word, s, c in level:
            for a in range(auto.t[s] + 1):
                t = auto.delta(s, a)
                nc = _times_beta(c, coeffs)
                nc = (nc[0] + a,) + nc[1:]
                nw = word + (a,) if (word or a) else ()
                nxt.append((nw, t, nc))
        level = nxt
    for word, s, c in level:
        out.append((word, FieldElement(base.minpoly, c)))
    out.sort(key=lambda wv: (len(wv[0]), wv[0]))
    return out


def word_class(base: BetaBase, word) -> int:
    s = parry_automaton(base).run(word)
    if s is None:
        raise DomainError("word is not admissible")
    return s


def _full_cloud(base, depth, with_values=True):
    g = geometry(base)
    auto = g.automaton
    pts = np.zeros(1, dtype=np.complex128)
    st = np.zeros(1, dtype=np.int64)
    vals = np.zeros(1)
    b = base.beta
    for _ in range(depth):
        new_p, new_s, new_v = [], [], []
        for s in range(auto.size):
            mask = st == s
            if not mask.any():
                continue
            scaled = pmul(base, pts[mask], g.alpha)
            sv = vals[mask] * b
            for a in range(auto.t[s] + 1):
                new_p.append(scaled + a)
                new_s.append(np.full(scaled.shape[0], auto.delta(s, a), dtype=np.int64))
                new_v.append(sv + a)
        pts, st, vals = np.concatenate(new_p), np.concatenate(new_s), np.concatenate(new_v)
    if with_values:
        order = np.argsort(vals, kind="stable")
        return pts[order], st[order], vals[order]
    return pts, st, None


MAX_SORTED = 3_000_000


def central_tile_cloud(base: BetaBase, depth: int) -> PointCloud:
    pts, st, vals = _full_cloud(base, depth, with_values=True)
    return PointCloud("central", pts, st, depth, vals)


def subtile_cloud(base: BetaBase, i: int, depth: int) -> PointCloud:
    g = geometry(base)
    if not 0 <= i < g.size:
        raise DomainError(f"subtile index {i} out of range")
    pts, st, vals = _full_cloud(base, depth)
    mask = st == i
    return PointCloud(f"T{i}", pts[mask], st[mask], depth, vals[mask])


def tile_cloud(base: BetaBase, y: FieldElement, depth: int) -> PointCloud:
    """Xi(y) + images of the words w with w . d(y) admissible."""
    if sign_of(y) < 0 or sign_of(y - 1) >= 0:
        raise DomainError("y must lie in [0, 1)")
    g = geometry(base)
    elig = np.array(g.eligible(y), dtype=np.int64)
    pts, st, vals = _full_cloud(base, depth)
    mask = np.isin(st, elig)
    off = xi(y, base)
    label = "central" if y.is_zero() else f"T({y.serialize()})"
    return PointCloud(label, pts[mask] + off, st[mask], depth, vals[mask], off)


def tile_words_direct(base: BetaBase, y: FieldElement, depth: int) -> list:
    """Reference enumeration: words w (length <= depth) with w . d(y) admissible."""
    dy = expand(y, base).as_word()
    out = []
    for word, v in beta_integers(base, depth):
        if is_admissible((word + dy[0], dy[1]), base):
            out.append(word)
    return out


def word_counts(base: BetaBase, depth: int) -> list:
    """Number of admissible padded words of each length up to depth."""
    auto = parry_automaton(base)
    vec = np.zeros(auto.size, dtype=object)
    vec[0] = 1
    out = [1]
    for _ in range(depth):
        nv = np.zeros(auto.size, dtype=object)
        for p, a, s in auto.transitions():
            nv[s] += vec[p]
        vec = nv
        out.append(int(sum(vec)))
    return out


def iter_cloud_chunks(base: BetaBase, depth: int, chunk: int = 1 << 21):
    """Stream (points, classes) of all depth-``depth`` words without sorting."""
    g = geometry(base)
    auto = g.automaton
    counts = word_counts(base, depth)
    k2 = 0
    while k2 < depth and counts[k2 + 1] <= 1 << 16:
        k2 += 1
    k1 = depth - k2
    pre_p, pre_s, _ = _full_cloud(base, k1, with_values=False)
    scale = ppow(base, k2)
    for s in range(auto.size):
        rows = pre_p[pre_s == s]
        if rows.size == 0:
            continue
        suf_p = np.zeros(1, dtype=np.complex128)
        suf_s = np.full(1, s, dtype=np.int64)
        for _ in range(k2):
            suf_p, suf_s = _cloud_level(base, auto, suf_p, suf_s, g.alpha)
        rows = pmul(base, rows, scale)
        step = max(1, chunk // suf_p.size)
        for i in range(0, rows.size, step):
            block = rows[i:i + step]
            yield ((block[:, None] + suf_p[None, :]).ravel(),
                   np.broadcast_to(suf_s, (block.size, suf_s.size)).ravel())


# ---------------------------------------------------------------------------
# rasters

@dataclass
class Raster:
    """Occupancy counts per label on a regular grid.

    Cell (j, i) covers [x0 + i h, x0 + (i+1) h) x [y0 + j h, y0 + (j+1) h).
    For one-dimensional embedding spaces the grid has a single row centred on
    the real axis.
    """

    x0: float
    y0: float
    cell: float
    nx: int
    ny: int
    labels: list
    counts: np.ndarray
    accuracy: float | None = None

    @classmethod
    def empty(cls, bbox, cell, labels, one_dim=False):
        (xa, ya), (xb, yb) = bbox
        if cell <= 0:
            raise DomainError("cell size must be positive")
        if one_dim:
            ya, yb = -cell / 2, cell / 2
        if not (xb > xa and yb > ya):
            raise DomainError("empty bounding box")
        nx = max(1, int(math.ceil((xb - xa) / cell - 1e-9)))
        ny = max(1, int(math.ceil((yb - ya) / cell - 1e-9)))
        return cls(xa, ya, cell, nx, ny, list(labels),
                   np.zeros((len(labels), ny, nx), dtype=np.int64))

    @property
    def occupancy(self) -> np.ndarray:
        return self.counts > 0

    @property
    def multiplicity(self) -> np.ndarray:
        return self.occupancy.sum(axis=0)

    def dilated_multiplicity(self, radius: int) -> np.ndarray:
        """Number of labels present within ``radius`` cells (square neighborhood)."""
        occ = self.occupancy
        out = np.zeros_like(occ)
        ry = radius if self.ny > 1 else 0
        for dj in range(-ry, ry + 1):
            for di in range(-radius, radius + 1):
                src = occ[:, max(0, dj):self.ny + min(0, dj), max(0, di):self.nx + min(0, di)]
                out[:, max(0, -dj):self.ny + min(0, -dj), max(0, -di):self.nx + min(0, -di)] |= src
        return out.sum(axis=0)

    def cell_of(self, z: complex):
        i = math.floor((z.real - self.x0) / self.cell)
        j = math.floor((z.imag - self.y0) / self.cell)
        return j, i

    def in_bounds(self, j, i, margin=0) -> bool:
        return margin <= i < self.nx - margin and margin <= j < self.ny - margin

    def add(self, label_index: int, pts: np.ndarray):
        self.add_many(np.full(pts.shape[0], label_index, dtype=np.int64), pts)

    def add_many(self, label_idx: np.ndarray, pts: np.ndarray):
        ix = np.floor((pts.real - self.x0) / self.cell).astype(np.int64)
        iy = np.floor((pts.imag - self.y0) / self.cell).astype(np.int64)
        ok = (ix >= 0) & (ix < self.nx) & (iy >= 0) & (iy < self.ny)
        flat = (label_idx[ok] * self.ny + iy[ok]) * self.nx + ix[ok]
        size = len(self.labels) * self.ny * self.nx
        self.counts += np.bincount(flat, minlength=size).reshape(self.counts.shape)

    def _box_range(self, z: complex, m: float):
        i0 = math.floor((z.real - m - self.x0) / self.cell)
        i1 = math.floor((z.real + m - self.x0) / self.cell)
        if self.ny == 1:
            j0 = j1 = 0
        else:
            j0 = math.floor((z.imag - m - self.y0) / self.cell)
            j1 = math.floor((z.imag + m - self.y0) / self.cell)
        return j0, j1, i0, i1

    def box_shape(self, z: complex, m: float):
        j0, j1, i0, i1 = self._box_range(z, m)
        return (j1 - j0 + 1, i1 - i0 + 1)

    def box(self, z: complex, m: float):
        """Occupancy of the cells meeting the square of half side m around z.

        Clipped to the grid; None when the square misses the grid entirely.
        """
        j0, j1, i0, i1 = self._box_range(z, m)
        j0, i0 = max(j0, 0), max(i0, 0)
        j1, i1 = min(j1, self.ny - 1), min(i1, self.nx - 1)
        if j0 > j1 or i0 > i1:
            return None
        return self.occupancy[:, j0:j1 + 1, i0:i1 + 1]

    def block(self, j, i, radius=1):
        """Occupancy of the (2 radius + 1)^2 block around a cell (clipped)."""
        j0, j1 = max(0, j - radius), min(self.ny, j + radius + 1)
        i0, i1 = max(0, i - radius), min(self.nx, i + radius + 1)
        return self.occupancy[:, j0:j1, i0:i1]

    def interior_mask(self, label_index: int) -> np.ndarray:
        """Cells whose full neighbor ring carries only the given label."""
        occ = self.occupancy
        mine = occ[label_index]
        others = np.delete(occ, label_index, axis=0).any(axis=0) if len(self.labels) > 1 \
            else np.zeros_like(mine)
        good = mine & ~others
        out = np.zeros_like(good)
        if self.ny >= 3:
            core = np.ones((self.ny - 2, self.nx - 2), dtype=bool)
            for dj in (-1, 0, 1):
                for di in (-1, 0, 1):
                    core &= good[1 + dj:self.ny - 1 + dj, 1 + di:self.nx - 1 + di]
            out[1:-1, 1:-1] = core
        else:
            core = np.ones(self.nx - 2, dtype=bool)
            for di in (-1, 0, 1):
                core &= good[0, 1 + di:self.nx - 1 + di]
            out[0, 1:-1] = core
        return out


def _default_bbox(base, pad=0.05):
    g = geometry(base)
    e = g.extent + pad
    if base.coord_kinds == ("real",):
        return ((-e, -0.5), (e, 0.5))
    return ((-e, -e), (e, e))


def rasterize(clouds, bbox=None, cell: float = 0.01) -> Raster:
    """Grid occupancy of a list of PointCloud objects, one label each."""
    if not clouds:
        raise DomainError("no clouds to rasterize")
    base_kind_1d = bool(np.all(np.concatenate([c.points.imag for c in clouds]) == 0)) \
        if bbox is None else False
    if bbox is None:
        allp = np.concatenate([c.points for c in clouds])
        pad = 2 * cell
        bbox = ((allp.real.min() - pad, allp.imag.min() - pad),
                (allp.real.max() + pad, allp.imag.max() + pad))
    r = Raster.empty(bbox, cell, [c.label for c in clouds], one_dim=base_kind_1d)
    for k, c in enumerate(clouds):
        r.add(k, c.points)
    return r


def subtile_raster(base: BetaBase, depth: int, cell: float, bbox=None) -> Raster:
    """Raster with one layer per subtile, streamed at any depth."""
    g = geometry(base)
    one_dim = base.coord_kinds == ("real",)
    r = Raster.empty(bbox or _default_bbox(base), cell,
                     [f"T{i}" for i in range(g.size)], one_dim=one_dim)
    for pts, cls in iter_cloud_chunks(base, depth):
        r.add_many(np.ascontiguousarray(cls), pts)
    r.accuracy = g.accuracy(depth)
    return r


# ---------------------------------------------------------------------------
# Ito-Rao membership

def ito_rao_membership(x: FieldElement, base: BetaBase, raster: Raster,
                       inner_margin: float | None = None, refine: bool = False) -> str:
    """Decide (-Xi(x), x) in E_beta at raster fidelity.

    ``raster`` must carry one layer per subtile.  The subtiles allowed at
    height x are those with x < T^i(1).  The verdict is "outside" when no
    allowed subtile marks a cell within the cloud accuracy of -Xi(x) (this is
    a certificate, since every tile point has a cloud point that close), and
    "inside" when every cell within ``inner_margin`` (default half a cell) is
    marked by allowed subtiles only.  Anything else is "uncertain".

    "inside" is limited by the resolution: holes of the tile smaller than a
    cell go unseen.  With ``refine`` a rational x whose raster verdict is not
    "outside" is also submitted to the exclusion certificate, which can turn
    the verdict into a rigorous "outside".
    """
    verdict = _raster_membership(x, base, raster, inner_margin)
    if refine and verdict != "outside" and x.is_rational():
        from .certify import certify_not_periodic
        if certify_not_periodic(base, x.coords[0]):
            return "outside"
    return verdict


def _raster_membership(x, base, raster, inner_margin):
    if sign_of(x) < 0 or sign_of(x - 1) >= 0:
        raise DomainError("x must lie in [0, 1)")
    g = geometry(base)
    elig = list(g.eligible(x))
    others = [k for k in range(g.size) if k not in elig]
    z = -xi(x, base)
    outer = raster.accuracy if raster.accuracy is not None else raster.cell
    inner = raster.cell / 2 if inner_margin is None else inner_margin
    near = raster.box(z, outer)
    if near is None:
        return "outside"
    if not near[elig].any():
        return "outside"
    ring = raster.box(z, inner)
    if ring is None or ring.shape[1:] != raster.box_shape(z, inner):
        return "uncertain"
    allowed = ring[elig].any(axis=0)
    forbidden = ring[others].any(axis=0) if others else np.zeros_like(allowed)
    if allowed.all() and not forbidden.any():
        return "inside"
    return "uncertain"


# ---------------------------------------------------------------------------
# Xi(beta)-representations

@dataclass(frozen=True)
class XiRepresentation:
    """^omega(left_period) left_pre . d(y): a two-sided expansion.

    Both left parts are written left to right; the right part is the greedy
    expansion of ``y``.
    """

    left_period: tuple
    left_pre: tuple
    y: FieldElement
    right: tuple

    def left_value(self, base: BetaBase) -> FieldElement:
        coeffs = base.coefficients
        poly = base.minpoly
        u = FieldElement(poly, _horner_int(self.left_pre, coeffs))
        v = FieldElement(poly, _horner_int(self.left_period, coeffs))
        bq = FieldElement(poly, _beta_pow_int(len(self.left_pre), coeffs))
        bp = FieldElement(poly, _beta_pow_int(len(self.left_period), coeffs))
        return u + bq * v / (1 - bp)

    def value(self, base: BetaBase) -> FieldElement:
        return self.left_value(base) + self.y

    def __str__(self):
        fmt = lambda w: "".join(str(a) for a in w)
        pre, per = self.right
        right = fmt(pre) + (f"({fmt(per)})^w" if per else "0^w")
        return f"^w({fmt(self.left_period)}){fmt(self.left_pre)}.{right}"


def bi_admissible(left_period, left_pre, right, base: BetaBase) -> bool:
    """Admissibility of ^omega(v) u . r with r = (pre, per) eventually periodic."""
    auto = parry_automaton(base)
    dstar = expansion_of_one(base).d_star.as_word()
    v, u = tuple(left_period), tuple(left_pre)
    rpre, rper = right
    rper = rper or (0,)
    # states reached after 0, 1, 2, ... copies of v, read from the far left
    seen, states, s = {}, [], 0
    while s not in seen:
        seen[s] = len(states)
        states.append(s)
        s = auto.run(v, s)
        if s is None:
            return False
    junction = set(states)
    for s0 in junction:
        s = auto.run(u + rpre, s0)
        if s is None:
            return False
        visited = set()
        pos = 0
        while (s, pos) not in visited:
            visited.add((s, pos))
            s = auto.delta(s, rper[pos])
            if s is None:
                return False
            pos = (pos + 1) % len(rper)
    # no suffix may equal d*
    right_word = normalize(u + rpre, rper)
    for k in range(len(u) + len(rpre) + len(rper)):
        if compare_words(_shift(right_word, k), dstar) == 0:
            return False
    reps = len(auto.t) // max(1, len(v)) + 2 * math.lcm(auto.n, len(v)) // len(v) + 2
    for j in range(len(v)):
        rot = v[j:]
        for J in range(reps):
            w = normalize(rot + v * J + u + rpre, rper)
            if compare_words(w, dstar) == 0:
                return False
    return True


def _shift(word, k):
    pre, per = word
    if k <= len(pre):
        return normalize(pre[k:], per)
    k = (k - len(pre)) % len(per)
    return normalize((), per[k:] + per[:k])


@lru_cache(maxsize=32)
def _inverse_beta_int(coeffs):
    poly = make_base(coeffs).minpoly
    inv = FieldElement(poly, (0, 1)).inverse()
    if not inv.is_integral():
        raise DomainError("beta is not a unit")
    d = len(coeffs) - 1
    cols = []
    e = [0] * d
    for j in range(d):
        e = [0] * d
        e[j] = 1
        cols.append(tuple(int(c) for c in (FieldElement(poly, e) * inv).coords))
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def _apply(mat, c):
    return tuple(sum(mat[i][j] * c[j] for j in range(len(c))) for i in range(len(c)))


@dataclass
class XiSearchResult:
    representations: list
    nodes: int
    exhausted: bool
    branching: bool


def find_xi_representation(x: FieldElement, base: BetaBase, depth_bound: int = 50_000,
                           period_bound: int = 200, max_results: int = 64) -> list:
    """Certified eventually periodic Xi(beta)-representations of Xi(x)."""
    return xi_search(x, base, depth_bound, period_bound, max_results).representations


def xi_search(x: FieldElement, base: BetaBase, depth_bound: int = 50_000,
              period_bound: int = 200, max_results: int = 64) -> XiSearchResult:
    """Backward search over (remainder, class) pairs.

    A node (v, s) asks for a left-infinite admissible word of class s whose
    value is Xi(v).  Its children are ((v - a)/beta, p) for the automaton
    transitions p --a--> s, kept only while Xi of the remainder stays in the
    bounding disc of T_p and the real value stays bounded.  Infinite paths of
    the resulting finite graph give the representations; each is verified by
    exact evaluation and by an admissibility check of the whole word.
    """
    g = geometry(base)
    coeffs = base.coefficients
    poly = base.minpoly
    inv = _inverse_beta_int(coeffs)
    A = base.alphabet_size
    zx = xi(x, base)
    reach = max(abs_norm(base, c) + r for c, r in zip(g.centers, g.radii))
    cands = lattice_points(base, zx, reach + 1e-9)
    pk = base.packed_powers
    tol = 1e-9

    c_x, q = x.integer_form()
    real_cap = None
    nodes = {}
    exhausted = False
    roots = []
    for y in cands:
        elig = g.eligible(y)
        v0 = x - y
        cv = tuple(int(c) for c in (v0 * q).coords)
        real_cap_y = abs(float(v0)) + A / (base.beta - 1) + 1
        real_cap = real_cap_y if real_cap is None else max(real_cap, real_cap_y)
        zv = complex(np.dot(np.array(cv, dtype=float) / q, pk))
        for s in elig:
            if abs_norm(base, zv - g.centers[s]) <= g.radii[s] + tol:
                roots.append((y, (cv, s)))
    # explore
    bpows = [base.beta ** j for j in range(base.degree)]
    stack = [r for _, r in roots]
    children = {}
    while stack:
        node = stack.pop()
        if node in children:
            continue
        if len(children) >= depth_bound:
            exhausted = True
            break
        cv, s = node
        out = []
        for p, a in g.preds[s]:
            w = (cv[0] - a * q,) + cv[1:]
            nv = _apply(inv, w)
            zv = complex(np.dot(np.array(nv, dtype=float) / q, pk))
            if abs_norm(base, zv - g.centers[p]) > g.radii[p] + tol:
                continue
            rv = sum(c * b for c, b in zip(nv, bpows)) / q
            if abs(rv) > real_cap:
                continue
            out.append((a, (nv, p)))
            stack.append((nv, p))
        children[node] = out
    # prune nodes without infinite continuation
    alive = {n for n in children}
    changed = True
    while changed:
        changed = False
        for n in list(alive):
            if not any(ch in alive for _, ch in children.get(n, [])):
                alive.discard(n)
                changed = True
    branching = False
    for n in alive:
        live = [ch for _, ch in children[n] if ch in alive]
        if len(live) > 1:
            branching = True
            break
    reps = []
    seen = set()
    for y, root in roots:
        if root not in alive:
            continue
        right = expand(y, base).as_word()
        right = (right[0], right[1]) if right[1] != (0,) else (right[0], ())
        # depth-first enumeration of simple paths closing a cycle
        path_stack = [(root, [], {root: 0})]
        while path_stack and len(reps) < max_results:
            node, digits, index = path_stack.pop()
            for a, ch in children[node]:
                if ch not in alive:
                    continue
                nd = digits + [a]
                if ch in index:
                    start = index[ch]
                    cycle = nd[start:]
                    if len(cycle) > period_bound:
                        continue
                    u = tuple(reversed(nd[:start]))
                    v = tuple(reversed(cycle))
                    rep = _make_rep(u, v, y, right)
                    key = (rep.left_period, rep.left_pre, y.coords)
                    if key in seen:
                        continue
                    if rep.value(base) != x:
                        continue
                    rp = (right[0], right[1])
                    if not bi_admissible(rep.left_period, rep.left_pre, rp, base):
                        continue
                    seen.add(key)
                    reps.append(rep)
                else:
                    if len(nd) > depth_bound:
                        continue
                    ni = dict(index)
                    ni[ch] = len(nd)
                    path_stack.append((ch, nd, ni))
    reps.sort(key=lambda r: (float(r.y), r.left_period, r.left_pre))
    return XiSearchResult(reps, len(children), exhausted, branching)


def _make_rep(u, v, y, right):
    """Canonical form: shortest left preperiod, primitive left period."""
    # left word ^omega(v) u; read right-to-left it is reversed(u) reversed(v)^omega
    pre, per = normalize(tuple(reversed(u)), tuple(reversed(v)))
    return XiRepresentation(tuple(reversed(per)), tuple(reversed(pre)), y, right)


def lemma_representation_of_minus_one(base: BetaBase, j: int):
    """^omega(t_1..t_{n-1}(t_n - 1)) t_1..t_{j-1}(t_j - 1) . t_{j+1}..t_n 0^omega.

    Requires a finite d_beta(1) = t_1 ... t_n and t_j > 0.
    """
    one = expansion_of_one(base)
    if not one.d_one.is_finite:
        raise DomainError("d_beta(1) is not finite")
    t = one.d_one.preperiod
    n = len(t)
    if not 1 <= j <= n or t[j - 1] == 0:
        raise DomainError("need 1 <= j <= n with t_j > 0")
    per = t[:-1] + (t[-1] - 1,)
    u = t[: j - 1] + (t[j - 1] - 1,)
    right_digits = t[j:]
    y = finite_value(right_digits, base) if right_digits else FieldElement(base.minpoly, (0,))
    return _make_rep(u, per, y, (tuple(right_digits), ()))


# ---------------------------------------------------------------------------
# spiral probe

@dataclass
class ProbeReport:
    angles: list
    radii: list
    verdicts: list  # per angle, per radius: "interior" | "complement" | "boundary"

    @property
    def per_angle(self):
        return [{"interior": v.count("interior"), "complement": v.count("complement"),
                 "boundary": v.count("boundary")} for v in self.verdicts]

    @property
    def alternating_everywhere(self) -> bool:
        return all(c["interior"] >= 1 and c["complement"] >= 1 for c in self.per_angle)

    def to_dict(self):
        return {"angles": self.angles, "radii": self.radii, "verdicts": self.verdicts,
                "per_angle": self.per_angle, "alternating_everywhere": self.alternating_everywhere}


def classify_point(raster: Raster, z: complex, layers=None) -> str:
    """interior / complement / boundary of the union of ``layers`` near z."""
    j, i = raster.cell_of(z)
    if not raster.in_bounds(j, i, margin=1):
        if not raster.in_bounds(j, i):
            raise DomainError("probe point outside the raster")
        return "boundary"
    blk = raster.block(j, i)
    if layers is not None:
        blk = blk[list(layers)]
    marked = blk.any(axis=0)
    if marked.all():
        return "interior"
    if not marked.any():
        return "complement"
    return "boundary"


def ladder_epsilon(base: BetaBase, cell: float, steps: int = 8, p: int = 1,
                   finest_cells: float = 10.0) -> float:
    """Top rung chosen so the finest rung still spans ``finest_cells`` cells."""
    return finest_cells * cell / base.rho_max ** ((steps - 1) * p)


def radius_ladder(base: BetaBase, eps: float, steps: int = 8, p: int = 1) -> list:
    rho = base.rho_max
    return [eps * rho ** (j * p) for j in range(steps)]


def spiral_probe(z: complex, angles, radii, raster: Raster, layers=None) -> ProbeReport:
    if raster.ny == 1:
        raise DomainError("spiral probes need a planar embedding space")
    j, i = raster.cell_of(z)
    if not raster.in_bounds(j, i):
        raise DomainError("z outside the raster")
    verdicts = []
    for th in angles:
        row = []
        for r in radii:
            row.append(classify_point(raster, z + r * complex(math.cos(th), math.sin(th)), layers))
        verdicts.append(row)
    return ProbeReport(list(angles), list(radii), verdicts)


# ---------------------------------------------------------------------------
# covering audit

@dataclass
class CoveringAudit:
    cell: float
    depth: int
    accuracy: float
    tiles: int
    tile_classes: int
    min_interior: int
    max_multiplicity: int
    histogram: dict
    multi_fraction: float
    covering_bound: int

    def to_dict(self):
        return dict(self.__dict__)


def tile_inventory(base: BetaBase, center: complex, reach: float) -> list:
    """(y, eligible classes) for every tile T(y) that can meet the region."""
    g = geometry(base)
    ys = lattice_points(base, center, reach + g.extent)
    return [(y, g.eligible(y)) for y in ys]


def covering_raster(base: BetaBase, center: complex, half_side: float, cell: float,
                    depth: int | None = None):
    """One layer per tile T(y) meeting the square of the given half side."""
    g = geometry(base)
    if depth is None:
        depth = g.depth_for_cell(cell)
    inv = tile_inventory(base, center, half_side * math.sqrt(2))
    offsets = [xi(y, base) for y, _ in inv]
    one_dim = base.coord_kinds == ("real",)
    bbox = ((center.real - half_side, center.imag - half_side),
            (center.real + half_side, center.imag + half_side))
    r = Raster.empty(bbox, cell, [y.serialize() for y, _ in inv], one_dim=one_dim)
    masks = [np.zeros(g.size, dtype=bool) for _ in inv]
    for m, (_, elig) in zip(masks, inv):
        m[list(elig)] = True
    for pts, cls in iter_cloud_chunks(base, depth):
        for k, off in enumerate(offsets):
            sel = masks[k][cls]
            if sel.any():
                p = pts[sel] + off
                r.add(k, p)
    return r, inv, depth


def covering_audit(base: BetaBase, center: complex = 0j, half_side: float = 1.0,
                   cell: float = 0.01, depth: int | None = None) -> CoveringAudit:
    g = geometry(base)
    r, inv, depth = covering_raster(base, center, half_side, cell, depth)
    mult = r.multiplicity
    interior = mult[1:-1, 1:-1] if r.ny > 2 else mult[:, 1:-1]
    vals, cnts = np.unique(mult, return_counts=True)
    classes = {tuple(e) for _, e in inv}
    # a tile through a point of a cell has a cloud point within the accuracy,
    # so counting labels in the dilated neighborhood bounds the tiles meeting it
    rad = max(1, math.ceil(g.accuracy(depth) / cell))
    dil = r.dilated_multiplicity(rad)
    core = dil[rad:-rad, rad:-rad] if r.ny > 2 * rad else dil[:, rad:-rad]
    return CoveringAudit(
        cell=cell,
        depth=depth,
        accuracy=g.accuracy(depth),
        tiles=len(inv),
        tile_classes=len(classes),
        min_interior=int(interior.min()),
        max_multiplicity=int(mult.max()),
        histogram={int(v): int(c) for v, c in zip(vals, cnts)},
        multi_fraction=float((mult >= 2).mean()),
        covering_bound=int(core.max()),
    )
