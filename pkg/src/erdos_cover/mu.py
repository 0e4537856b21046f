"""Bracketing ``mu_Y(R)``, the least measure of a set whose bush covers ``R``.

Lower bound: every slice of the bush is a union of ``|Y|`` translates of
``G``.  Upper bounds: verified constructions.  Oracle: a set-cover search
over unions of grid cells, checked with the exact verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import _geometry as geo
from .bush import Rect, _rect, verify_cover
from .construct_det import lemma3_construct
from .construct_rand import thm15_similarity_cover
from .errors import AllMethodsFailed, BadParams, ErdosCoverError, WindowTooSmall
from .exactset import IntervalSet, as_rational, fmt_rational, union_all
from .patterns import as_pattern, generate

METHODS = ("lemma3", "thm15")


def mu_lower(Y, R=None) -> Fraction:
    """``width(R) / |Y|``; no covering set can be smaller."""
    Y = as_pattern(Y)
    return _rect(R).width / len(Y)


def _height_blocks(R: Rect) -> List[Tuple[Fraction, Fraction]]:
    """Split ``[b_lo, b_hi]`` into pieces ``[beta, beta']`` with ``beta' <= 2 beta``."""
    out = []
    lo = R.b_lo
    while lo < R.b_hi:
        hi = min(2 * lo, R.b_hi)
        out.append((lo, hi))
        lo = hi
    return out or [(R.b_lo, R.b_hi)]


def lemma3_for_rect(Y, R) -> IntervalSet:
    """Layering transported to an arbitrary rectangle.

    ``L_Y(beta G) = beta L_Y(G)``, so each height block ``[beta, beta']``
    is covered by ``beta`` times a layering of the block scaled into
    ``[1, 2]``.
    """
    R = _rect(R)
    parts = []
    for beta, top in _height_blocks(R):
        unit = Rect(R.a_lo / beta, R.a_hi / beta, 1, top / beta)
        parts.append(lemma3_construct(Y, unit, verify=False).G.affine_image(0, beta))
    return union_all(parts)


def thm15_for_rect(X, R, eps, seed: int = 0, relaxed: bool = False) -> IntervalSet:
    """Cover of ``[0,1] x [1,2]`` moved onto ``R`` by translations and scalings."""
    R = _rect(R)
    _, plan, _ = thm15_similarity_cover(X, eps, seed=seed, relaxed=relaxed)
    H = plan.H
    parts = []
    for beta, top in _height_blocks(R):
        lo, hi = R.a_lo / beta, R.a_hi / beta
        for j in range(max(1, math.ceil(hi - lo))):
            parts.append(H.translate(lo + j).affine_image(0, beta))
    return union_all(parts)


@dataclass
class UpperBound:
    value: Fraction
    method: str
    G: IntervalSet
    reasons: Dict[str, str] = field(default_factory=dict)
    measures: Dict[str, Fraction] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": fmt_rational(self.value),
            "method": self.method,
            "G": self.G.to_json(),
            "measures": {k: fmt_rational(v) for k, v in sorted(self.measures.items())},
            "failures": dict(sorted(self.reasons.items())),
        }


def mu_upper(X, R=None, methods: Iterable[str] = ("lemma3",), eps=None, seed: int = 0) -> UpperBound:
    """Smallest verified covering set among the enabled constructions."""
    X = as_pattern(X)
    R = _rect(R)
    methods = list(methods)
    if not methods:
        raise BadParams("enable at least one method")
    found: Dict[str, IntervalSet] = {}
    reasons: Dict[str, str] = {}
    for name in methods:
        try:
            if name == "lemma3":
                G = lemma3_for_rect(X, R)
            elif name == "thm15":
                G = thm15_for_rect(X, R, as_rational(eps if eps is not None else Fraction(1, 2)), seed)
            else:
                raise BadParams(f"unknown method {name!r}; expected one of {', '.join(METHODS)}")
        except ErdosCoverError as exc:
            reasons[name] = f"{type(exc).__name__}: {exc}"
            continue
        if not verify_cover(X, G, R).covered:
            reasons[name] = "construction did not verify"
            continue
        found[name] = G
    if not found:
        raise AllMethodsFailed("no construction produced a verified cover", reasons=reasons)
    best = min(found, key=lambda k: (found[k].measure(), k))
    return UpperBound(found[best].measure(), best, found[best], reasons, {k: g.measure() for k, g in found.items()})


# ---------------------------------------------------------------------------
# set-cover oracle


@dataclass
class OracleResult:
    value: Fraction
    cells: List[int]
    window: Tuple[Fraction, Fraction]
    h: Fraction
    solver: str

    @property
    def G(self) -> IntervalSet:
        lo = self.window[0]
        return IntervalSet([(lo + j * self.h, lo + (j + 1) * self.h) for j in self.cells])

    def to_json(self) -> dict:
        return {
            "value": fmt_rational(self.value),
            "cells": list(self.cells),
            "window": [fmt_rational(self.window[0]), fmt_rational(self.window[1])],
            "h": fmt_rational(self.h),
            "solver": self.solver,
        }


def default_window(Y) -> Tuple[Fraction, Fraction]:
    c = as_pattern(Y).max_abs()
    return -2 * c - 2, 2 * c + 3


def _cell_groups(pts, lo, h, count):
    return [
        geo.group_bands(geo.bands_from(pts, IntervalSet.interval(lo + j * h, lo + (j + 1) * h)))
        for j in range(count)
    ]


def _cut(pieces: Sequence[geo.Piece], grouped) -> List[geo.Piece]:
    out: List[geo.Piece] = []
    for p in pieces:
        out.extend(geo.local_uncovered(p.vertices, p.constraints, grouped))
    return out


def _area(pieces: Sequence[geo.Piece]) -> Fraction:
    return sum((p.area() for p in pieces), Fraction(0))


def oracle_setcover(Y, R=None, window=None, h=Fraction(1, 8), solver: str = "greedy", max_exact_cells: int = 24) -> OracleResult:
    """Cover ``R`` with a union of cells ``[lo + j h, lo + (j + 1) h]``.

    ``greedy`` repeatedly adds the cell removing the most uncovered area
    (ties to the lowest index).  ``exact`` tries all unions in increasing
    size.  Either way the result is an upper bound on the cell-restricted
    optimum checked by the exact geometry.
    """
    Y = as_pattern(Y)
    R = _rect(R)
    h = as_rational(h)
    lo, hi = (as_rational(w) for w in (window or default_window(Y)))
    if h <= 0 or hi <= lo:
        raise BadParams("need h > 0 and a nonempty window")
    count = (hi - lo) / h
    if count.denominator != 1:
        raise BadParams("h must divide the window length")
    count = int(count)
    if R.width == 0 or R.height == 0:
        raise BadParams("the oracle needs a rectangle of positive area")
    groups = _cell_groups(Y.points, lo, h, count)
    start = [geo.Piece(geo.rect_vertices(R.a_lo, R.a_hi, R.b_lo, R.b_hi), geo._rect_constraints(R.a_lo, R.a_hi, R.b_lo, R.b_hi))]
    if solver == "greedy":
        chosen: List[int] = []
        pieces = start
        while pieces:
            current = _area(pieces)
            best = None
            for j in range(count):
                if j in chosen:
                    continue
                after = _cut(pieces, groups[j])
                gain = current - _area(after)
                if best is None or gain > best[0]:
                    best = (gain, j, after)
            if best is None or best[0] == 0:
                raise WindowTooSmall("no remaining cell reduces the uncovered area")
            chosen.append(best[1])
            pieces = best[2]
        chosen.sort()
    elif solver == "exact":
        if count > max_exact_cells:
            raise BadParams(f"exact solver is limited to {max_exact_cells} cells, got {count}")
        first = max(1, math.ceil(mu_lower(Y, R) / h))
        chosen = None
        for size in range(first, count + 1):
            chosen = _first_cover(start, groups, size)
            if chosen is not None:
                break
        if chosen is None:
            raise WindowTooSmall("even the whole window does not cover the rectangle")
    else:
        raise BadParams("solver must be 'greedy' or 'exact'")
    return OracleResult(len(chosen) * h, chosen, (lo, hi), h, solver)


def _first_cover(start, groups, size) -> Optional[List[int]]:
    """Lexicographically first ``size``-subset of cells that covers, by DFS
    carrying the uncovered pieces of each prefix."""
    count = len(groups)

    def dfs(pieces, begin, picked):
        if not pieces:
            return picked
        if len(picked) == size:
            return None
        for j in range(begin, count - (size - len(picked)) + 1):
            res = dfs(_cut(pieces, groups[j]), j + 1, picked + [j])
            if res is not None:
                return res
        return None

    return dfs(start, 0, [])


# ---------------------------------------------------------------------------
# geometric probe


@dataclass
class ProbePair:
    name: str
    left: Fraction
    right: Fraction
    tolerance: Fraction

    @property
    def flagged(self) -> bool:
        return abs(self.left - self.right) > self.tolerance

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "left": fmt_rational(self.left),
            "right": fmt_rational(self.right),
            "tolerance": fmt_rational(self.tolerance),
            "flagged": self.flagged,
        }


def geometric_mu_probe(rho, stage: int, R=None, h=Fraction(1, 8), r: int = 1, solver: str = "greedy") -> List[ProbePair]:
    """Consistency pairs for a geometric truncation.

    * ``transport``: oracle for ``d Y`` against ``d`` times the oracle for
      ``Y`` on the rectangle with ``a`` divided by ``d`` (``d = rho^r``);
      cells and window are transported too, so the two sides must agree.
    * ``self-similarity``: oracle for ``Y`` against oracle for ``rho^r Y``
      on the same rectangle.  The truncations differ, so this is only
      expected to agree up to ``h |Y|``.
    * ``a-translation``: oracle on ``R`` against ``R + 1`` with the window
      moved along.
    """
    rho = as_rational(rho)
    if not 0 < rho < 1:
        raise BadParams("rho must lie in (0, 1)")
    R = _rect(R)
    h = as_rational(h)
    Y = generate("geometric", {"ratio": rho}, stage)
    d = rho ** r
    dY = Y.scaled(d)
    w = default_window(Y)
    tol = h * len(Y)

    base = oracle_setcover(Y, R, w, h, solver).value
    moved = oracle_setcover(dY, R, (w[0] * d, w[1] * d), h * d, solver).value
    # cells of width h*d for dY on R correspond to cells of width h for Y
    # on R with a divided by d
    Ra = Rect(R.a_lo / d, R.a_hi / d, R.b_lo, R.b_hi)
    pulled = d * oracle_setcover(Y, Ra, w, h, solver).value
    dw = default_window(dY)
    same_rect = oracle_setcover(dY, R, dw, h, solver).value
    shifted = oracle_setcover(Y, R.translate(1), (w[0] + 1, w[1] + 1), h, solver).value
    return [
        ProbePair("transport", moved, pulled, Fraction(0)),
        ProbePair("self-similarity", base, same_rect, tol),
        ProbePair("a-translation", base, shifted, Fraction(0)),
    ]
