"""Deterministic covering constructions: periodic layering, staged unions,
and dense separated stages for patterns that are not linearly bounded."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .bush import CoverageReport, Rect, slice as bush_slice, verify_cover
from .errors import BadParams, NotDenseEnough, NotFineEnough, TooFewPoints
from .exactset import IntervalSet, as_rational, fmt_rational
from .patterns import Pattern, as_pattern


@dataclass
class Lemma3Plan:
    pattern: Pattern
    target: Rect
    shift: Fraction
    work_rect: Rect
    M: Fraction
    r: int
    u: List[Fraction]
    G: IntervalSet
    bound: Fraction
    report: Optional[CoverageReport] = field(default=None, repr=False)

    @property
    def measure(self) -> Fraction:
        return self.G.measure()

    @property
    def within_bound(self) -> bool:
        return self.measure < self.bound

    def to_json(self) -> dict:
        return {
            "M": fmt_rational(self.M),
            "r": self.r,
            "u": [fmt_rational(x) for x in self.u],
            "shift": fmt_rational(self.shift),
            "work_rect": self.work_rect.to_json(),
            "bound": fmt_rational(self.bound),
            "measure": fmt_rational(self.measure),
            "within_bound": self.within_bound,
        }


def lemma3_construct(Y, R=None, verify: bool = True) -> Lemma3Plan:
    """Periodic layering ``G = U_j [u_j, u_j + 2M]`` covering ``R``.

    ``R`` must have ``b`` inside ``[1, 2]``.  A pattern reaching below 0 is
    shifted to end at 0 first; its rectangle becomes the bounding box of the
    sheared image, which the construction then covers.
    """
    Y = as_pattern(Y)
    if len(Y) < 2:
        raise TooFewPoints("periodic layering needs at least two points")
    R = Rect.canonical() if R is None else (R if isinstance(R, Rect) else Rect(*R))
    if R.b_lo < 1 or R.b_hi > 2:
        raise BadParams("periodic layering covers heights within [1, 2]; transport the rectangle first")
    shift = min(Fraction(0), Y.last)
    Z = Y.shifted(shift) if shift else Y
    # (a, b) is covered for Y iff (a + b*shift, b) is covered for Y - shift
    work = Rect(R.a_lo + min(R.b_lo * shift, R.b_hi * shift), R.a_hi + max(R.b_lo * shift, R.b_hi * shift), R.b_lo, R.b_hi)
    W = work.width
    y1, span = Z.first, Z.span
    M = max(Z.gaps())
    period = 2 * M + span
    r = max(0, math.ceil((W + y1) / period))
    u = [work.a_lo + y1 + j * period for j in range(r + 1)]
    G = IntervalSet([(x, x + 2 * M) for x in u])
    plan = Lemma3Plan(Y, R, shift, work, M, r, u, G, 4 * M * (W + y1) / span)
    if verify:
        plan.report = verify_cover(Y, G, R)
        if not plan.report.covered:
            raise AssertionError("periodic layering failed to cover; this is a bug")
    return plan


# ---------------------------------------------------------------------------


def best_fine_run(P: Pattern) -> Tuple[int, int, Fraction]:
    """Contiguous run maximizing ``span / (max gap * (1 + |y_first| + |y_last|))``.

    Ties go to the larger span.  Returns ``(i, j, score)``.
    """
    pts = P.points
    best = None
    for i in range(len(pts) - 1):
        widest = Fraction(0)
        for j in range(i + 1, len(pts)):
            widest = max(widest, pts[j - 1] - pts[j])
            span = pts[i] - pts[j]
            score = span / (widest * (1 + abs(pts[i]) + abs(pts[j])))
            key = (score, span)
            if best is None or key > best[0]:
                best = (key, i, j)
    (score, _), i, j = best
    return i, j, score


@dataclass
class StageCertificate:
    stage: int
    run: Pattern
    plan: Lemma3Plan
    budget: Fraction

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "run": self.run.to_json(),
            "budget": fmt_rational(self.budget),
            "G": self.plan.G.to_json(),
            "plan": self.plan.to_json(),
            "verification": self.plan.report.digest() if self.plan.report else None,
        }


def theorem4_witness(X, eps, stages: int) -> Tuple[IntervalSet, List[StageCertificate]]:
    """Union of per-stage layerings, stage ``s`` built on the tail after
    dropping ``s - 1`` points, with stage measure below ``eps / 2**s``."""
    X = as_pattern(X)
    eps = as_rational(eps)
    if eps <= 0 or stages < 1:
        raise BadParams("need eps > 0 and stages >= 1")
    certs = []
    G = IntervalSet.empty()
    for s in range(1, stages + 1):
        tail_pts = X.points[s - 1:]
        if len(tail_pts) < 2:
            raise NotFineEnough(f"stage {s}: truncation exhausted", stage=s, best=None)
        tail = Pattern(tail_pts, X.family, X.params, X.stage)
        i, j, _ = best_fine_run(tail)
        run = tail.subset(tail.points[i:j + 1])
        budget = eps / 2 ** s
        plan = lemma3_construct(run, verify=False)
        if plan.measure >= budget:
            fine = _best_relative_fineness(tail)
            raise NotFineEnough(
                f"stage {s}: best layering has measure {fmt_rational(plan.measure)} >= {fmt_rational(budget)}; "
                f"best relative fineness {fmt_rational(fine)}",
                stage=s,
                best=fine,
            )
        plan.report = verify_cover(run, plan.G, plan.target)
        if not plan.report.covered:
            raise AssertionError("stage layering failed to cover; this is a bug")
        certs.append(StageCertificate(s, run, plan, budget))
        G = G | plan.G
    return G, certs


def _best_relative_fineness(P: Pattern) -> Fraction:
    pts = P.points
    best = Fraction(1)
    for i in range(len(pts) - 1):
        widest = Fraction(0)
        for j in range(i + 1, len(pts)):
            widest = max(widest, pts[j - 1] - pts[j])
            best = min(best, widest / (pts[i] - pts[j]))
    return best


# ---------------------------------------------------------------------------


@dataclass
class Lemma10Stage:
    m: int
    n_m: int
    delta: Fraction
    Z: Pattern
    p: int
    H: IntervalSet
    C: Fraction
    D: Fraction
    min_slice: Fraction
    argmin_b: Fraction
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n_m": self.n_m,
            "delta": fmt_rational(self.delta),
            "Z": [fmt_rational(z) for z in self.Z.points],
            "p": self.p,
            "H": self.H.to_json(),
            "multiplicity": self.p,
            "C": fmt_rational(self.C),
            "D": fmt_rational(self.D),
            "min_slice": fmt_rational(self.min_slice),
            "argmin_b": fmt_rational(self.argmin_b),
            "checks": dict(self.checks),
        }


def _greedy_ascending(values: Sequence[Fraction], gap: Fraction) -> List[Fraction]:
    out: List[Fraction] = []
    for v in values:
        if not out or v - out[-1] >= gap:
            out.append(v)
    return out


def _min_clipped_measure(Z: Sequence[Fraction], delta: Fraction, C, D, b0, b1) -> Tuple[Fraction, Fraction]:
    """Exact ``min`` over ``b`` in ``[b0, b1]`` of ``|([0, delta] - bZ) ∩ [C, D]|``.

    The function is piecewise affine in ``b`` and breaks only where two
    endpoint lines ``g - b z`` cross or one meets ``C`` or ``D``.
    """
    lines = [(g, z) for z in Z for g in (Fraction(0), delta)]
    crit = {b0, b1}
    for idx, (g, z) in enumerate(lines):
        for g2, z2 in lines[idx + 1:]:
            if z != z2:
                b = (g - g2) / (z - z2)
                if b0 < b < b1:
                    crit.add(b)
        if z != 0:
            for c in (C, D):
                b = (g - c) / z
                if b0 < b < b1:
                    crit.add(b)
    window = IntervalSet.interval(C, D)
    H = IntervalSet.interval(0, delta)
    best = None
    for b in sorted(crit):
        val = (bush_slice(Z, H, b) & window).measure()
        if best is None or val < best[0]:
            best = (val, b)
    return best


def lemma10_stage(X, m: int, delta=None) -> Lemma10Stage:
    X = as_pattern(X)
    if m < 1:
        raise BadParams("m must be >= 1")
    need = 2 ** m
    top = max(1, math.ceil(X.max_abs()))
    asc = sorted(X.points)
    n = next(
        (n for n in range(1, top + 1) if sum(1 for x in asc if -n <= x <= n) >= need * n),
        None,
    )
    if n is None:
        raise NotDenseEnough(f"no n <= {top} with at least 2^{m} n points in [-n, n]")
    N = need * n
    window = [x for x in asc if -n <= x <= n]
    if delta is None:
        delta = Fraction(1, 2 ** (m + 1))
        while len(_greedy_ascending(window, delta)) < N:
            delta /= 2
    else:
        delta = as_rational(delta)
        if not 0 < delta < Fraction(1, need):
            raise BadParams("delta must lie in (0, 2^-m)")
    picks = _greedy_ascending(window, delta)
    if len(picks) < N:
        raise NotDenseEnough(f"no {fmt_rational(delta)}-separated set of {N} points in [-{n}, {n}]")
    Z = X.subset(picks[:N], family="lemma10", m=m)
    p = math.floor(Fraction(1, need) / delta)
    C, D = Fraction(-2 * n - 1), Fraction(2 * n + 1)
    H = IntervalSet.interval(0, delta)
    min_val, argmin = _min_clipped_measure(Z.points, delta, C, D, Fraction(1), Fraction(2))
    # (a) holds for every b once Z is a subset of X; the inner set is the
    # literal union of translates, which slice() computes exactly
    in_x = set(X.points).issuperset(Z.points)
    lhs_d = p * min_val / (4 * n + 3)
    rhs_d = Fraction(p * N, 4 * n + 3) * delta
    checks = {
        "a": in_x and all(-n <= z <= n for z in Z.points),
        "b": min_val >= N * delta,
        "c": p * delta <= Fraction(1, need),
        "d": lhs_d >= rhs_d >= Fraction(1, 16),
    }
    return Lemma10Stage(m, n, delta, Z, p, H, C, D, min_val, argmin, checks)
