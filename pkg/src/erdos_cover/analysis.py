"""Fineness and separation diagnostics of finite patterns."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .errors import NotFineEnough, OutOfRange, TooFewPoints
from .exactset import as_rational, fmt_rational
from .patterns import Pattern, as_pattern


@dataclass(frozen=True)
class FinenessReport:
    k: int
    span: Fraction
    rel_fineness: Fraction
    rel_separation: Fraction
    arf_score: Fraction
    ulf_bound: int
    lb_ratio: Fraction

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "span": fmt_rational(self.span),
            "rel_fineness": fmt_rational(self.rel_fineness),
            "rel_separation": fmt_rational(self.rel_separation),
            "arf_score": fmt_rational(self.arf_score),
            "ulf_bound": self.ulf_bound,
            "lb_ratio": fmt_rational(self.lb_ratio),
        }


def _need_two(P: Pattern) -> None:
    if len(P) < 2:
        raise TooFewPoints("at least two points are needed")


def arf_score(P: Pattern) -> Fraction:
    """Min over element pairs ``u < v`` of ``longest gap in [u, v] / (v - u) * (|u| + |v| + 1)``."""
    _need_two(P)
    pts = P.points
    best = None
    for i in range(len(pts) - 1):
        v = pts[i]
        widest = Fraction(0)
        for j in range(i + 1, len(pts)):
            u = pts[j]
            widest = max(widest, pts[j - 1] - u)
            score = widest / (v - u) * (abs(u) + abs(v) + 1)
            if best is None or score < best:
                best = score
    return best


def ulf_bound(P: Pattern) -> int:
    """Largest number of points in a window ``[y, y + 1]`` anchored at a point."""
    asc = sorted(P.points)
    return max(bisect.bisect_right(asc, y + 1) - i for i, y in enumerate(asc))


def lb_ratio(P: Pattern) -> Fraction:
    """Max over ``n = 1..ceil(max|y|)`` of ``card(P ∩ [-n, n]) / n``."""
    top = max(1, math.ceil(P.max_abs()))
    mags = sorted(abs(y) for y in P.points)
    return max(Fraction(bisect.bisect_right(mags, n), n) for n in range(1, top + 1))


def fineness(P) -> FinenessReport:
    P = as_pattern(P)
    _need_two(P)
    gaps = P.gaps()
    span = P.span
    return FinenessReport(
        k=len(P),
        span=span,
        rel_fineness=max(gaps) / span,
        rel_separation=min(gaps) / span,
        arf_score=arf_score(P),
        ulf_bound=ulf_bound(P),
        lb_ratio=lb_ratio(P),
    )


class Extraction(NamedTuple):
    pattern: Pattern
    max_gap_ratio: Fraction
    three_eps_fine: bool


def extract_separated_subset(P, eps) -> Extraction:
    """Greedy thinning keeping both endpoints.

    Gaps of the result are at least ``eps * span``.  Whether they are also
    at most ``3 * eps * span`` is checked, not assumed.
    """
    P = as_pattern(P)
    eps = as_rational(eps)
    _need_two(P)
    if not 0 < eps <= 1:
        raise NotFineEnough("eps must lie in (0, 1]")
    span = P.span
    fine = max(P.gaps()) / span
    if fine > eps:
        raise NotFineEnough(
            f"pattern is only relatively {fmt_rational(fine)}-fine", best=fine
        )
    step = eps * span
    picked = [P.first]
    for y in P.points[1:-1]:
        if picked[-1] - y >= step:
            picked.append(y)
    # keep the last point; drop the previous pick if the tail gap is too short
    if len(picked) > 1 and picked[-1] - P.last < step:
        picked.pop()
    picked.append(P.last)
    sub = P.subset(picked, eps=eps, source="extract_separated_subset")
    ratio = max(sub.gaps()) / span
    return Extraction(sub, ratio, ratio <= 3 * eps)


# ---------------------------------------------------------------------------
# N_delta and delta_n, on integer-scaled coordinates


def _scaled(P: Pattern) -> Tuple[List[int], int]:
    den = reduce(math.lcm, (p.denominator for p in P.points), 1)
    return [p.numerator * (den // p.denominator) for p in P.points], den


def _greedy(ints: Sequence[int], i: int, j: int, thr_num: int, thr_den: int, strict: bool) -> List[int]:
    """Max-size index set from ``i`` to ``j`` (descending values, both kept)
    with consecutive differences ``>= thr`` (``> thr`` when strict).
    The threshold is ``thr_num / thr_den``."""

    def ok(d: int) -> bool:
        return d * thr_den > thr_num if strict else d * thr_den >= thr_num

    out = [i]
    last = ints[i]
    for t in range(i + 1, j):
        if ok(last - ints[t]):
            out.append(t)
            last = ints[t]
    if len(out) > 1 and not ok(last - ints[j]):
        out.pop()
    if ok(ints[out[-1]] - ints[j]):
        out.append(j)
    return out


def n_delta(P, delta) -> int:
    """Size of the largest relatively ``delta``-separated subset."""
    return n_delta_witness(P, delta)[0]


def n_delta_witness(P, delta) -> Tuple[int, Pattern]:
    P = as_pattern(P)
    delta = as_rational(delta)
    if not 0 < delta <= 1:
        raise OutOfRange("delta must lie in (0, 1]")
    if len(P) == 1:
        return 1, P
    ints, _ = _scaled(P)
    k = len(ints)
    best: List[int] = [0, k - 1]
    for i in range(k - 1):
        for j in range(k - 1, i, -1):
            if j - i + 1 <= len(best):
                break
            span = ints[i] - ints[j]
            sel = _greedy(ints, i, j, delta.numerator * span, delta.denominator, False)
            if len(sel) > len(best):
                best = sel
    return len(best), P.subset([P.points[t] for t in best], source="n_delta")


def delta_n(P, n: int) -> Tuple[Fraction, Pattern]:
    """Best relative separation of an ``n``-point subset, with a witness."""
    P = as_pattern(P)
    k = len(P)
    if not 3 <= n <= k:
        raise OutOfRange(f"n must satisfy 3 <= n <= {k}")
    ints, _ = _scaled(P)

    def ratio(sel: Sequence[int]) -> Fraction:
        gaps = [ints[a] - ints[b] for a, b in zip(sel, sel[1:])]
        return Fraction(min(gaps), ints[sel[0]] - ints[sel[-1]])

    def thin(sel: List[int]) -> List[int]:
        # dropping interior points never shrinks the minimum gap
        while len(sel) > n:
            g = [ints[sel[t - 1]] - ints[sel[t + 1]] for t in range(1, len(sel) - 1)]
            drop = 1 + min(range(len(g)), key=g.__getitem__)
            sel = sel[:drop] + sel[drop + 1:]
        return sel

    # start from the best of the spread-out subsets over the whole range
    cur = thin(list(range(k)))
    best = ratio(cur)
    improved = True
    while improved:
        improved = False
        for i in range(k - n + 1):
            for j in range(k - 1, i + n - 2, -1):
                span = ints[i] - ints[j]
                sel = _greedy(ints, i, j, best.numerator * span, best.denominator, True)
                if len(sel) >= n:
                    sel = thin(sel)
                    r = ratio(sel)
                    if r > best:
                        best, cur, improved = r, sel, True
    return best, P.subset([P.points[t] for t in cur], source="delta_n", n=n)


# ---------------------------------------------------------------------------
# selection of a separated subset for the similarity construction


class SelectionRow(NamedTuple):
    n: int
    delta: Optional[Fraction]
    lhs: float
    ok: bool


def selection_q(C: Fraction, eps: Fraction) -> Fraction:
    return eps / (3 * (1 + 4 * C))


def selection_lhs(C: Fraction, q: Fraction, n: int, delta: Fraction) -> Fraction:
    """``4 (1 + C) n (1 - q)^n / delta``, exactly."""
    return 4 * (1 + C) * n * (1 - q) ** n / delta


def selection_table(X, eps, stop_at_first: bool = True) -> List[SelectionRow]:
    X = as_pattern(X)
    eps = as_rational(eps)
    C = X.max_abs()
    q = selection_q(C, eps)
    target = eps / 3
    rows = []
    for n in range(3, len(X) + 1):
        # delta_n <= 1/(n-1) by pigeonhole, which bounds the left side below
        floor_lhs = selection_lhs(C, q, n, Fraction(1, n - 1))
        if floor_lhs > target:
            rows.append(SelectionRow(n, None, float(floor_lhs), False))
            continue
        d, _ = delta_n(X, n)
        lhs = selection_lhs(C, q, n, d)
        rows.append(SelectionRow(n, d, float(lhs), lhs <= target))
        if lhs <= target and stop_at_first:
            break
    return rows
