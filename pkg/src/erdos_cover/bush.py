"""Slices, coverage verification and covered area of ``L_Y(G)``.

``L_Y(G) = {(a, b) : (a + bY) meets G}``; its horizontal section at height
``b`` is ``G - bY``.  Everything here is exact over the rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _geometry as geo
from .errors import BadParams, EmptyPattern, ZeroScale
from .exactset import IntervalSet, as_rational, fmt_rational, union_all
from .patterns import Pattern

CANONICAL = ("0", "1", "1", "2")


@dataclass(frozen=True)
class Rect:
    a_lo: Fraction
    a_hi: Fraction
    b_lo: Fraction
    b_hi: Fraction

    def __post_init__(self):
        vals = [as_rational(v) for v in (self.a_lo, self.a_hi, self.b_lo, self.b_hi)]
        for name, v in zip(("a_lo", "a_hi", "b_lo", "b_hi"), vals):
            object.__setattr__(self, name, v)
        if self.a_lo > self.a_hi or self.b_lo > self.b_hi:
            raise BadParams("rectangle bounds must satisfy a_lo <= a_hi and b_lo <= b_hi")
        if self.b_lo <= 0:
            raise BadParams("rectangles must lie in b > 0; reflect the pattern for negative scales")

    @classmethod
    def canonical(cls) -> "Rect":
        return cls(*CANONICAL)

    @property
    def width(self) -> Fraction:
        return self.a_hi - self.a_lo

    @property
    def height(self) -> Fraction:
        return self.b_hi - self.b_lo

    @property
    def area(self) -> Fraction:
        return self.width * self.height

    def translate(self, alpha) -> "Rect":
        alpha = as_rational(alpha)
        return Rect(self.a_lo + alpha, self.a_hi + alpha, self.b_lo, self.b_hi)

    def scale(self, beta) -> "Rect":
        """Image under ``(a, b) -> beta * (a, b)`` for ``beta > 0``."""
        beta = as_rational(beta)
        return Rect(beta * self.a_lo, beta * self.a_hi, beta * self.b_lo, beta * self.b_hi)

    def to_json(self) -> list:
        return [fmt_rational(v) for v in (self.a_lo, self.a_hi, self.b_lo, self.b_hi)]

    @classmethod
    def from_json(cls, data) -> "Rect":
        return cls(*data)


@dataclass(frozen=True)
class UncoveredCell:
    """Trapezoid ``{(a, b): b0 <= b <= b1, lo(b) <= a <= hi(b)}`` (closure).

    ``lo`` and ``hi`` are affine in ``b``; they are stored by their values at
    ``b0`` and ``b1``.
    """

    b0: Fraction
    b1: Fraction
    lo0: Fraction
    lo1: Fraction
    hi0: Fraction
    hi1: Fraction

    def at(self, b: Fraction) -> Tuple[Fraction, Fraction]:
        if self.b1 == self.b0:
            return self.lo0, self.hi0
        t = (b - self.b0) / (self.b1 - self.b0)
        return self.lo0 + t * (self.lo1 - self.lo0), self.hi0 + t * (self.hi1 - self.hi0)

    @property
    def area(self) -> Fraction:
        return ((self.hi0 - self.lo0) + (self.hi1 - self.lo1)) * (self.b1 - self.b0) / 2

    def a_hull(self) -> Tuple[Fraction, Fraction]:
        return min(self.lo0, self.lo1), max(self.hi0, self.hi1)

    def to_json(self) -> dict:
        return {
            "b": [fmt_rational(self.b0), fmt_rational(self.b1)],
            "lo": [fmt_rational(self.lo0), fmt_rational(self.lo1)],
            "hi": [fmt_rational(self.hi0), fmt_rational(self.hi1)],
        }


@dataclass
class CoverageReport:
    covered: bool
    rect: Rect
    critical_b: List[Fraction]
    uncovered_cells: List[UncoveredCell]
    projection_S: IntervalSet
    max_slice_deficit: Fraction
    uncovered_area: Fraction
    method: str = "slab"
    _pieces: Optional[List[geo.Piece]] = field(default=None, repr=False)
    _bands: Optional[List[geo.Band]] = field(default=None, repr=False)

    def is_uncovered(self, a, b) -> bool:
        """Membership in ``R \\ L_Y(G)`` according to this report."""
        a, b = as_rational(a), as_rational(b)
        r = self.rect
        if not (r.a_lo <= a <= r.a_hi and r.b_lo <= b <= r.b_hi):
            raise BadParams("point outside the report rectangle")
        if self._pieces is None:
            # degenerate rectangles and the sweep method keep the bands instead
            return not geo.slice_of_bands(self._bands, b).contains(a)
        for p in self._pieces:
            if p.contains(a, b):
                return True
        return False

    def uncovered_grid(self, a_values: Sequence, b_values: Sequence) -> np.ndarray:
        """Exact ``is_uncovered`` on the grid ``b_values x a_values``.

        Returns a boolean array indexed ``[j, i]`` for ``(a_values[i],
        b_values[j])``.  Every test is an integer comparison after clearing
        denominators, so the answer is exact.
        """
        a_vals = [as_rational(a) for a in a_values]
        b_vals = [as_rational(b) for b in b_values]
        r = self.rect
        if any(not r.a_lo <= a <= r.a_hi for a in a_vals) or any(not r.b_lo <= b <= r.b_hi for b in b_vals):
            raise BadParams("grid leaves the report rectangle")
        if self._pieces is None:
            return np.array(
                [[not geo.slice_of_bands(self._bands, b).contains(a) for a in a_vals] for b in b_vals], dtype=bool
            )
        Da = math.lcm(*(a.denominator for a in a_vals))
        Db = math.lcm(*(b.denominator for b in b_vals))
        ai = [int(a * Da) for a in a_vals]
        bj = [int(b * Db) for b in b_vals]
        out = np.zeros((len(b_vals), len(a_vals)), dtype=bool)
        for p in self._pieces:
            inside = np.ones_like(out)
            for ca, cb, d, strict in p.constraints:
                L = math.lcm(ca.denominator, cb.denominator, d.denominator)
                # ca*a + cb*b <= d  <=>  A*ai*Db + B*bj*Da <= C*Da*Db
                A, B, C = int(ca * L) * Db, int(cb * L) * Da, int(d * L) * Da * Db
                big = max(abs(A) * max(map(abs, ai)), abs(B) * max(map(abs, bj)), abs(C))
                dtype = np.int64 if big < 2 ** 61 else object
                lhs = np.array([B * v for v in bj], dtype=dtype)[:, None] + np.array(
                    [A * v for v in ai], dtype=dtype
                )[None, :]
                inside &= (lhs < C) if strict else (lhs <= C)
            out |= inside
        return out

    def digest(self) -> dict:
        return {
            "covered": self.covered,
            "rect": self.rect.to_json(),
            "uncovered_cells": len(self.uncovered_cells),
            "uncovered_area": fmt_rational(self.uncovered_area),
            "projection_S": self.projection_S.to_json(),
            "projection_measure": fmt_rational(self.projection_S.measure()),
            "max_slice_deficit": fmt_rational(self.max_slice_deficit),
        }

    def to_json(self) -> dict:
        d = self.digest()
        d["critical_b"] = [fmt_rational(b) for b in self.critical_b]
        d["cells"] = [c.to_json() for c in self.uncovered_cells]
        d["method"] = self.method
        return d


def _points(Y) -> Tuple[Fraction, ...]:
    if isinstance(Y, Pattern):
        return Y.points
    pts = tuple(as_rational(y) for y in Y)
    if not pts:
        raise EmptyPattern("pattern is empty")
    return pts


def _rect(R) -> Rect:
    if R is None:
        return Rect.canonical()
    if isinstance(R, Rect):
        return R
    return Rect(*R)


def slice(Y, G: IntervalSet, b) -> IntervalSet:  # noqa: A001 - domain name
    """``G - bY``: the section of ``L_Y(G)`` at height ``b``."""
    b = as_rational(b)
    if b == 0:
        raise ZeroScale("slice at b = 0")
    pts = _points(Y)
    if not pts:
        raise EmptyPattern("pattern is empty")
    return union_all(G.translate(-b * y) for y in pts)


def bands(Y, G: IntervalSet) -> List[geo.Band]:
    return geo.bands_from(_points(Y), G)


def _trapezoids(pieces: Sequence[geo.Piece]) -> List[UncoveredCell]:
    cells = []
    for p in pieces:
        bs = sorted({v[1] for v in p.vertices})
        for b0, b1 in zip(bs, bs[1:]):
            s0, s1 = p.section(b0), p.section(b1)
            cells.append(UncoveredCell(b0, b1, s0[0], s1[0], s0[1], s1[1]))
    cells.sort(key=lambda c: (c.b0, c.b1, c.lo0, c.lo1))
    return cells


def _deficit(cells: Sequence[UncoveredCell]) -> Fraction:
    # The uncovered length is piecewise affine with breaks at cell heights.
    best = Fraction(0)
    heights = sorted({c.b0 for c in cells} | {c.b1 for c in cells})
    for b in heights:
        secs = [c.at(b) for c in cells if c.b0 <= b <= c.b1]
        best = max(best, IntervalSet(secs).measure())
    return best


def _degenerate_report(pts, G: IntervalSet, R: Rect) -> CoverageReport:
    bl = geo.bands_from(pts, G)
    if R.b_lo == R.b_hi:
        b = R.b_lo
        gaps = IntervalSet.interval(R.a_lo, R.a_hi) - slice(pts, G, b)
        cells = [UncoveredCell(b, b, lo, lo, hi, hi) for lo, hi in gaps]
        covered = not cells
        return CoverageReport(
            covered, R, [b], cells, gaps, gaps.measure(), Fraction(0), "slice", None, bl
        )
    # a fixed, b free: the b-values where a + bY meets G
    a = R.a_lo
    hits = []
    for y in pts:
        for lo, hi in G:
            if y == 0:
                if lo <= a <= hi:
                    hits.append((R.b_lo, R.b_hi))
            elif y > 0:
                hits.append(((lo - a) / y, (hi - a) / y))
            else:
                hits.append(((hi - a) / y, (lo - a) / y))
    missing = IntervalSet.interval(R.b_lo, R.b_hi) - IntervalSet(hits)
    # closure of the missing set may add isolated points that are covered
    cells = [UncoveredCell(b0, b1, a, a, a, a) for b0, b1 in missing]
    crit = sorted({R.b_lo, R.b_hi} | {e for iv in missing for e in iv})
    proj = IntervalSet.interval(a, a) if cells else IntervalSet.empty()
    return CoverageReport(
        not cells, R, crit, cells, proj, Fraction(0), Fraction(0), "segment", None, bl
    )


def _sweep_report(pts, G: IntervalSet, R: Rect) -> CoverageReport:
    bl = geo.bands_from(pts, G)
    crit = geo.sweep_critical_b(bl, R.a_lo, R.a_hi, R.b_lo, R.b_hi)
    cells: List[UncoveredCell] = []
    deficit = Fraction(0)
    window = IntervalSet.interval(R.a_lo, R.a_hi)
    for b in crit:
        deficit = max(deficit, (window - geo.slice_of_bands(bl, b)).measure())
    for b0, b1 in zip(crit, crit[1:]):
        mid = (b0 + b1) / 2
        gaps = window - geo.slice_of_bands(bl, mid)
        for lo, hi in gaps:
            lo_line = _line_through(bl, lo, mid, R.a_lo)
            hi_line = _line_through(bl, hi, mid, R.a_hi)
            cells.append(
                UncoveredCell(b0, b1, lo_line(b0), lo_line(b1), hi_line(b0), hi_line(b1))
            )
    area = sum((c.area for c in cells), Fraction(0))
    proj = IntervalSet([c.a_hull() for c in cells])
    return CoverageReport(not cells, R, crit, cells, proj, deficit, area, "sweep", None, bl)


def _line_through(bl, a, b, edge):
    """The endpoint line (or rectangle edge) passing through ``(a, b)``."""
    if a == edge:
        return lambda _b: edge
    for y, lo, hi in bl:
        for g in (lo, hi):
            if g - b * y == a:
                return lambda bb, g=g, y=y: g - bb * y
    raise AssertionError("gap endpoint is not on any line")


def verify_cover(Y, G: IntervalSet, R=None, method: str = "slab") -> CoverageReport:
    """Exact verdict for ``R ⊆ L_Y(G)``.

    ``method="slab"`` (default) decomposes the uncovered region into convex
    pieces; ``method="sweep"`` checks every critical height and slab
    midpoint of the full line arrangement, which is quadratic in the number
    of endpoint lines and meant for small inputs and cross-checks.
    """
    pts = _points(Y)
    R = _rect(R)
    if R.a_lo == R.a_hi or R.b_lo == R.b_hi:
        return _degenerate_report(pts, G, R)
    if method == "sweep":
        return _sweep_report(pts, G, R)
    if method != "slab":
        raise BadParams(f"unknown verification method {method!r}")
    bl = geo.bands_from(pts, G)
    pieces = geo.uncovered_pieces(bl, R.a_lo, R.a_hi, R.b_lo, R.b_hi)
    cells = _trapezoids(pieces)
    crit = sorted({R.b_lo, R.b_hi} | {c.b0 for c in cells} | {c.b1 for c in cells})
    proj = IntervalSet([p.a_range() for p in pieces])
    area = sum((p.area() for p in pieces), Fraction(0))
    return CoverageReport(
        not pieces, R, crit, cells, proj, _deficit(cells), area, "slab", pieces, bl
    )


def uncovered_projection(Y, G: IntervalSet, R=None) -> IntervalSet:
    """Closure of ``{a : (a, b) not in L_Y(G) for some b}`` within ``R``."""
    return verify_cover(Y, G, R).projection_S


def covered_area(Y, G: IntervalSet, R=None) -> Fraction:
    """Exact planar measure of ``L_Y(G) ∩ R``."""
    R = _rect(R)
    if R.a_lo == R.a_hi or R.b_lo == R.b_hi:
        return Fraction(0)
    return R.area - verify_cover(Y, G, R).uncovered_area


def render_svg(Y, G: IntervalSet, R=None, path=None, report: CoverageReport | None = None) -> str:
    """Deterministic SVG of the strips clipped to ``R`` with uncovered cells.

    Returns the document; writes it to ``path`` when given.
    """
    from .plotting import bush_svg

    R = _rect(R)
    if report is None:
        report = verify_cover(Y, G, R)
    doc = bush_svg(_points(Y), G, R, report.uncovered_cells)
    if path is not None:
        from .certificate import atomic_write

        atomic_write(path, doc)
    return doc
