"""Exact planar machinery behind the bush module.

A *band* ``(y, lo, hi)`` is the closed strip ``{(a, b): lo <= a + b*y <= hi}``;
``L_Y(G)`` is the union of the bands ``(y, g_lo, g_hi)`` over ``y in Y`` and
components ``[g_lo, g_hi]`` of ``G``.

Two exact routes compute what a rectangle leaves uncovered:

* :func:`uncovered_pieces` returns the uncovered region as convex polygons.
  The rectangle is cut into b-slabs; on each slab the a-values covered for
  *every* b in the slab are found with a float pre-pass whose margin is many
  orders of magnitude above float rounding, so it can only under-report
  coverage.  What remains is resolved by exact clipping of rational polygons.
* :func:`sweep_critical_b` / :func:`covered_at` implement the classical
  event sweep (all pairwise endpoint crossings).  Quadratic in the number of
  lines, kept as a reference for small inputs.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exactset import IntervalSet, _canonical

Band = Tuple[Fraction, Fraction, Fraction]
Point = Tuple[Fraction, Fraction]
# ca*a + cb*b <= d, or < d when strict
Constraint = Tuple[Fraction, Fraction, Fraction, bool]

# Below LOCAL_CAP bands the whole rectangle goes straight to exact clipping.
# A slab is split while one uncertain strip sees more than J_BANDS_CAP bands
# or all strips together exceed WORK_CAP band visits.  Concurrent edges make
# band counts scale-invariant near a concurrency point, so the caps must be
# generous enough that such clusters are clipped rather than refined.
LOCAL_CAP = 24
J_BANDS_CAP = 256
WORK_CAP = 6000
MAX_DEPTH = 40


@dataclass(frozen=True)
class Piece:
    """Convex polygon of uncovered points.

    ``vertices`` describe the closure (counter-clockwise); ``constraints``
    describe the exact point set, with strict inequalities on edges that
    belong to a closed band.
    """

    vertices: Tuple[Point, ...]
    constraints: Tuple[Constraint, ...]

    def contains(self, a: Fraction, b: Fraction) -> bool:
        for ca, cb, d, strict in self.constraints:
            v = ca * a + cb * b
            if v > d or (strict and v == d):
                return False
        return True

    def area(self) -> Fraction:
        return polygon_area(self.vertices)

    def a_range(self) -> Tuple[Fraction, Fraction]:
        xs = [p[0] for p in self.vertices]
        return min(xs), max(xs)

    def b_range(self) -> Tuple[Fraction, Fraction]:
        ys = [p[1] for p in self.vertices]
        return min(ys), max(ys)

    def section(self, b: Fraction) -> Optional[Tuple[Fraction, Fraction]]:
        """The a-interval of the closed polygon at height b."""
        return polygon_section(self.vertices, b)


def polygon_area(vertices: Sequence[Point]) -> Fraction:
    n = len(vertices)
    if n < 3:
        return Fraction(0)
    s = Fraction(0)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return abs(s) / 2


def polygon_section(vertices: Sequence[Point], b: Fraction) -> Optional[Tuple[Fraction, Fraction]]:
    xs = []
    n = len(vertices)
    for i in range(n):
        (x1, y1), (x2, y2) = vertices[i], vertices[(i + 1) % n]
        if y1 == b:
            xs.append(x1)
        if (y1 < b < y2) or (y2 < b < y1):
            xs.append(x1 + (x2 - x1) * (b - y1) / (y2 - y1))
    if not xs:
        return None
    return min(xs), max(xs)


def clip(vertices: Sequence[Point], ca: Fraction, cb: Fraction, d: Fraction) -> List[Point]:
    """Intersect a convex polygon with the closed half-plane ``ca*a + cb*b <= d``."""
    out: List[Point] = []
    n = len(vertices)
    if n == 0:
        return out
    vals = [ca * p[0] + cb * p[1] - d for p in vertices]
    for i in range(n):
        p, vp = vertices[i], vals[i]
        q, vq = vertices[(i + 1) % n], vals[(i + 1) % n]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append((p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t))
    dedup: List[Point] = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def rect_vertices(a0, a1, b0, b1) -> Tuple[Point, ...]:
    return ((a0, b0), (a1, b0), (a1, b1), (a0, b1))


def bands_from(points: Iterable[Fraction], g: IntervalSet) -> List[Band]:
    return [(y, lo, hi) for y in points for lo, hi in g]


def group_bands(bands: Iterable[Band]) -> Dict[Fraction, Tuple[Tuple[Fraction, Fraction], ...]]:
    tmp: Dict[Fraction, list] = {}
    for y, lo, hi in bands:
        tmp.setdefault(y, []).append((lo, hi))
    return {y: _canonical(v) for y, v in tmp.items()}


def local_uncovered(
    vertices: Tuple[Point, ...],
    constraints: Tuple[Constraint, ...],
    grouped: Dict[Fraction, Tuple[Tuple[Fraction, Fraction], ...]],
) -> List[Piece]:
    """Exact uncovered part of a convex region against grouped bands."""
    pieces = [(tuple(vertices), tuple(constraints))]
    for y in sorted(grouped):
        ivs = grouped[y]
        los = [iv[0] for iv in ivs]
        his = [iv[1] for iv in ivs]
        nxt = []
        for verts, cons in pieces:
            vals = [p[0] + p[1] * y for p in verts]
            fmin, fmax = min(vals), max(vals)
            # intervals meeting the closed range [fmin, fmax]; those that only
            # touch an edge still make that edge strict
            j0 = bisect.bisect_left(his, fmin)
            j1 = bisect.bisect_right(los, fmax)
            hit = ivs[j0:j1]
            if not hit:
                nxt.append((verts, cons))
                continue
            if hit[0][0] <= fmin and hit[0][1] >= fmax:
                continue
            gaps = []
            if hit[0][0] > fmin:
                gaps.append((None, hit[0][0]))
            for u, v in zip(hit, hit[1:]):
                gaps.append((u[1], v[0]))
            if hit[-1][1] < fmax:
                gaps.append((hit[-1][1], None))
            for glo, ghi in gaps:
                pv = list(verts)
                pc = list(cons)
                if glo is not None:
                    pv = clip(pv, Fraction(-1), -y, -glo)
                    pc.append((Fraction(-1), -y, -glo, True))
                if ghi is not None and len(pv) >= 3:
                    pv = clip(pv, Fraction(1), y, ghi)
                    pc.append((Fraction(1), y, ghi, True))
                if len(pv) >= 3 and polygon_area(pv) > 0:
                    nxt.append((tuple(pv), tuple(pc)))
        pieces = nxt
        if not pieces:
            break
    return [Piece(v, c) for v, c in pieces]


def _rect_constraints(a0, a1, b0, b1, strict_lo=False, strict_hi=False) -> Tuple[Constraint, ...]:
    one, zero = Fraction(1), Fraction(0)
    return (
        (-one, zero, -a0, strict_lo),
        (one, zero, a1, strict_hi),
        (zero, -one, -b0, False),
        (zero, one, b1, False),
    )


class _Engine:
    """Adaptive slab decomposition for one rectangle and one band list."""

    def __init__(self, bands: Sequence[Band], a0, a1, b0, b1):
        self.a0, self.a1, self.b0, self.b1 = a0, a1, b0, b1
        self.bands = list(bands)
        self.y = np.array([float(t[0]) for t in self.bands], dtype=float)
        self.lo = np.array([float(t[1]) for t in self.bands], dtype=float)
        self.hi = np.array([float(t[2]) for t in self.bands], dtype=float)
        scale = max(abs(float(a0)), abs(float(a1)), abs(float(b0)), abs(float(b1)), 1.0)
        if self.bands:
            scale = max(
                scale,
                float(np.max(np.abs(self.lo))),
                float(np.max(np.abs(self.hi))),
                float(np.max(np.abs(self.y))) * max(abs(float(b0)), abs(float(b1))),
            )
        self.margin = 1e-9 * (1.0 + scale)
        self.a0f, self.a1f = float(a0), float(a1)
        self.min_width = (b1 - b0) / (1 << MAX_DEPTH)
        self.pieces: List[Piece] = []

    def run(self) -> List[Piece]:
        idx = np.arange(len(self.bands))
        self._slab(self.b0, self.b1, idx)
        return self.pieces

    def _analyze(self, b0: Fraction, b1: Fraction, idx: np.ndarray):
        """Float pass: the a-strips not covered throughout the slab and,
        for each strip, the bands that may matter there."""
        m = self.margin
        y, lo, hi = self.y[idx], self.lo[idx], self.hi[idx]
        f0, f1 = float(b0), float(b1)
        by0, by1 = f0 * y, f1 * y
        pmin, pmax = np.minimum(by0, by1), np.maximum(by0, by1)
        slo, shi = lo - pmax - m, hi - pmin + m
        keep = (shi >= self.a0f - m) & (slo <= self.a1f + m)
        idx, slo, shi = idx[keep], slo[keep], shi[keep]
        plo, phi = (lo - pmin + m)[keep], (hi - pmax - m)[keep]

        ok = plo < phi
        order = np.argsort(plo[ok], kind="stable")
        ps, pe = plo[ok][order], phi[ok][order]
        uncertain = []
        cur = self.a0f
        for s, e in zip(ps.tolist(), pe.tolist()):
            if cur >= self.a1f:
                break
            if s > cur:
                uncertain.append((cur, min(s, self.a1f)))
            if e > cur:
                cur = e
        if cur < self.a1f:
            uncertain.append((cur, self.a1f))
        rel = [idx[np.nonzero((slo < jh) & (shi > jl))[0]] for jl, jh in uncertain]
        work = sum(len(r) for r in rel)
        return idx, uncertain, rel, work

    def _slab(self, b0: Fraction, b1: Fraction, idx: np.ndarray, info=None) -> None:
        idx, uncertain, rel, work = info if info is not None else self._analyze(b0, b1, idx)
        if not uncertain:
            return
        heavy = max(len(r) for r in rel) > J_BANDS_CAP or work > WORK_CAP
        if heavy and (b1 - b0) > self.min_width:
            mid = (b0 + b1) / 2
            left = self._analyze(b0, mid, idx)
            right = self._analyze(mid, b1, idx)
            # Near a point where many edges meet, halving leaves the work
            # unchanged at every scale; clip there instead of refining.
            if left[3] + right[3] < 0.75 * work:
                self._slab(b0, mid, idx, left)
                self._slab(mid, b1, idx, right)
                return
        for (jl, jh), r in zip(uncertain, rel):
            self._local(jl, jh, b0, b1, r)

    def _local(self, jl: float, jh: float, b0, b1, idx: np.ndarray) -> None:
        if jl <= self.a0f:
            lo_x, strict_lo = self.a0, False
        else:
            lo_x, strict_lo = max(Fraction(jl), self.a0), True
        if jh >= self.a1f:
            hi_x, strict_hi = self.a1, False
        else:
            hi_x, strict_hi = min(Fraction(jh), self.a1), True
        if lo_x >= hi_x:
            return
        grouped = group_bands(self.bands[i] for i in idx.tolist())
        verts = rect_vertices(lo_x, hi_x, b0, b1)
        cons = _rect_constraints(lo_x, hi_x, b0, b1, strict_lo, strict_hi)
        self.pieces.extend(local_uncovered(verts, cons, grouped))


def uncovered_pieces(bands: Sequence[Band], a0, a1, b0, b1) -> List[Piece]:
    """Uncovered part of ``[a0,a1] x [b0,b1]`` (positive area assumed)."""
    a0, a1, b0, b1 = (Fraction(v) for v in (a0, a1, b0, b1))
    if len(bands) <= LOCAL_CAP:
        grouped = group_bands(bands)
        return local_uncovered(rect_vertices(a0, a1, b0, b1), _rect_constraints(a0, a1, b0, b1), grouped)
    return _Engine(bands, a0, a1, b0, b1).run()


# ---------------------------------------------------------------------------
# reference sweep


def slice_of_bands(bands: Iterable[Band], b: Fraction) -> IntervalSet:
    return IntervalSet._trusted(_canonical([(lo - b * y, hi - b * y) for y, lo, hi in bands]))


def covered_at(bands: Sequence[Band], a0, a1, b: Fraction) -> bool:
    return slice_of_bands(bands, b).covers(a0, a1)


def sweep_critical_b(bands: Sequence[Band], a0, a1, b0, b1) -> List[Fraction]:
    """Every b in [b0, b1] where two endpoint lines (or a rectangle edge) cross."""
    lines = set()
    for y, lo, hi in bands:
        lines.add((lo, y))
        lines.add((hi, y))
    lines.add((Fraction(a0), Fraction(0)))
    lines.add((Fraction(a1), Fraction(0)))
    lines = sorted(lines, key=lambda t: (t[1], t[0]))
    crit = {Fraction(b0), Fraction(b1)}
    for i in range(len(lines)):
        g, y = lines[i]
        for j in range(i + 1, len(lines)):
            g2, y2 = lines[j]
            if y2 == y:
                continue
            b = (g - g2) / (y - y2)
            if b0 < b < b1:
                crit.add(b)
    return sorted(crit)


def sweep_samples(crit: Sequence[Fraction]) -> List[Fraction]:
    out = []
    for i, b in enumerate(crit):
        out.append(b)
        if i + 1 < len(crit):
            out.append((b + crit[i + 1]) / 2)
    return out


def covered_length(bands: Sequence[Band], a0, a1, b: Fraction) -> Fraction:
    return slice_of_bands(bands, b).clip(a0, a1).measure()


def sweep_area(bands: Sequence[Band], a0, a1, b0, b1) -> Fraction:
    """Exact covered area by integrating the piecewise-affine slice measure."""
    crit = sweep_critical_b(bands, a0, a1, b0, b1)
    vals = [covered_length(bands, a0, a1, b) for b in crit]
    total = Fraction(0)
    for i in range(len(crit) - 1):
        total += (vals[i] + vals[i + 1]) * (crit[i + 1] - crit[i]) / 2
    return total
