"""Seeded randomized constructions: random cell covers for similarities,
random translates for translations, and greedy placement guided by the
exponential leftover bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _geometry as geo
from ._parallel import first_success
from .analysis import delta_n, selection_lhs, selection_q, selection_table
from .bush import CoverageReport, Rect, slice as bush_slice, uncovered_projection, verify_cover
from .errors import (
    BadParams,
    EmptyBox,
    NotClusteredEnough,
    SelectionFailed,
    TrialBudgetExceeded,
)
from .exactset import IntervalSet, as_rational, fmt_rational
from .patterns import Pattern, as_pattern

TWO64 = 1 << 64
PRNG_NAME = "numpy.PCG64(SeedSequence(entropy=seed, spawn_key=(trial,)))"
BERNOULLI_RULE = "Z = [r * den(q) < num(q) * 2^64] for r uniform on 64 bits; bias < 2^-64"
DEFAULT_TRIALS = 64
MAX_CELLS = 1 << 20


# ---------------------------------------------------------------------------
# randomness


def prng_stream(seed: int, trial_index: int) -> np.random.Generator:
    """Generator for one trial; independent of evaluation order."""
    if seed < 0 or trial_index < 0:
        raise BadParams("seed and trial index must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.PCG64(ss))


def draw_u64(gen: np.random.Generator, count: int) -> List[int]:
    return [int(v) for v in gen.integers(0, np.iinfo(np.uint64).max, size=count, dtype=np.uint64, endpoint=True)]


def bernoulli(gen: np.random.Generator, q: Fraction, count: int) -> List[bool]:
    """``count`` independent Bernoulli(q) draws by exact integer comparison."""
    q = as_rational(q)
    if not 0 <= q <= 1:
        raise BadParams("Bernoulli parameter must lie in [0, 1]")
    cut = q.numerator * TWO64
    return [r * q.denominator < cut for r in draw_u64(gen, count)]


def uniform_rational(gen: np.random.Generator, lo: Fraction, hi: Fraction, count: int) -> List[Fraction]:
    return [lo + (hi - lo) * Fraction(r, TWO64) for r in draw_u64(gen, count)]


# ---------------------------------------------------------------------------
# records


@dataclass
class RandomPlan:
    method: str
    seed: int
    trial_index: int
    G: IntervalSet
    S: IntervalSet
    H: IntervalSet
    target_bound: Fraction
    q: Optional[Fraction] = None
    tau: Optional[Fraction] = None
    cell_range: Optional[Tuple[int, int]] = None
    chosen_cells: List[int] = field(default_factory=list)
    placements: List[Fraction] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def measures(self) -> Tuple[Fraction, Fraction, Fraction]:
        return self.G.measure(), self.S.measure(), self.H.measure()

    def to_json(self) -> dict:
        lg, ls, lh = self.measures
        d = {
            "method": self.method,
            "seed": self.seed,
            "trial_index": self.trial_index,
            "prng": PRNG_NAME,
            "G": self.G.to_json(),
            "S": self.S.to_json(),
            "H": self.H.to_json(),
            "measures": {"G": fmt_rational(lg), "S": fmt_rational(ls), "H": fmt_rational(lh)},
            "target_bound": fmt_rational(self.target_bound),
        }
        if self.q is not None:
            d["q"] = fmt_rational(self.q)
            d["bernoulli"] = BERNOULLI_RULE
        if self.tau is not None:
            d["tau"] = fmt_rational(self.tau)
        if self.cell_range is not None:
            d["cell_range"] = list(self.cell_range)
            d["chosen_cells"] = list(self.chosen_cells)
        if self.placements:
            d["placements"] = [fmt_rational(u) for u in self.placements]
        d.update(self.extra)
        return d


@dataclass
class Thm15Params:
    C_X: Fraction
    eps: Fraction
    q: Fraction
    n: int
    X_star: Pattern
    Y: Pattern
    delta: Fraction
    tau: Fraction
    A: Fraction
    B: Fraction
    selection_lhs: Fraction
    selection_satisfied: bool

    def to_json(self) -> dict:
        return {
            "C_X": fmt_rational(self.C_X),
            "eps": fmt_rational(self.eps),
            "q": fmt_rational(self.q),
            "n": self.n,
            "X_star": [fmt_rational(x) for x in self.X_star.points],
            "delta": fmt_rational(self.delta),
            "tau": fmt_rational(self.tau),
            "A": fmt_rational(self.A),
            "B": fmt_rational(self.B),
            # the left side is a huge exact rational; its float is what matters to readers
            "selection_lhs_approx": float(self.selection_lhs),
            "selection_target": fmt_rational(self.eps / 3),
            "selection_satisfied": self.selection_satisfied,
        }


# ---------------------------------------------------------------------------
# similarity cover


def select_Xstar(X, eps) -> Tuple[Pattern, Fraction, int]:
    """Smallest ``n`` whose best relatively separated ``n``-subset satisfies
    ``4 (1 + C) n (1 - q)^n / delta <= eps / 3``."""
    X = as_pattern(X)
    eps = as_rational(eps)
    if eps <= 0:
        raise BadParams("eps must be positive")
    if len(X) < 3:
        raise SelectionFailed("at least three points are needed", table=[])
    rows = selection_table(X, eps)
    if not rows or not rows[-1].ok:
        best = min(rows, key=lambda r: r.lhs)
        raise SelectionFailed(
            f"no subset satisfies the selection inequality; smallest left side {best.lhs:.4g} "
            f"at n={best.n} against {float(eps / 3):.4g}",
            table=rows,
        )
    n = rows[-1].n
    d, witness = delta_n(X, n)
    return witness, d, n


def thm15_params(X, eps, relaxed: bool = False) -> Thm15Params:
    X = as_pattern(X)
    eps = as_rational(eps)
    if eps <= 0:
        raise BadParams("eps must be positive")
    C = X.max_abs()
    q = selection_q(C, eps)
    try:
        Xs, d, n = select_Xstar(X, eps)
        satisfied = True
    except SelectionFailed:
        if not relaxed or len(X) < 3:
            raise
        # whole truncation; the certificate records that the inequality fails
        Xs, n = X, len(X)
        d = X.min_gap() / X.span
        satisfied = False
    xn = Xs.last
    Y = Xs.shifted(xn)
    tau = Xs.min_gap()
    # bounding box of {a + b * x_n : a in [0, 1], b in [1, 2]}
    A, B = min(xn, 2 * xn), 1 + max(xn, 2 * xn)
    return Thm15Params(C, eps, q, n, Xs, Y, d, tau, A, B, selection_lhs(C, q, n, d), satisfied)


@dataclass
class _Trial:
    index: int
    chosen: List[int]
    G: IntervalSet
    S: Optional[IntervalSet]
    reason: str


def thm15_similarity_cover(
    X,
    eps,
    seed: int = 0,
    max_trials: int = DEFAULT_TRIALS,
    relaxed: bool = False,
    workers: Optional[int] = None,
) -> Tuple[Thm15Params, RandomPlan, CoverageReport]:
    """Random cell cover of the sheared rectangle, repaired by its
    uncovered projection, then verified for ``X*`` on ``[0,1] x [1,2]``.

    ``relaxed=True`` falls back to the whole truncation when no subset meets
    the selection inequality; acceptance is still decided exactly.
    """
    P = thm15_params(X, eps, relaxed)
    eps, q, tau = P.eps, P.q, P.tau
    y1 = P.Y.first
    m = math.floor(P.A / tau)
    M = math.floor((P.B + 2 * y1) / tau) + 1
    if M - m > MAX_CELLS:
        raise BadParams(f"{M - m} cells exceed the limit of {MAX_CELLS}")
    rect = Rect(P.A, P.B, 1, 2)

    def trial(t: int):
        gen = prng_stream(seed, t)
        chosen = [m + j for j, z in enumerate(bernoulli(gen, q, M - m)) if z]
        G = IntervalSet([(j * tau, (j + 1) * tau) for j in chosen])
        if G.measure() >= eps:
            return False, _Trial(t, chosen, G, None, "measure(G) >= eps")
        S = uncovered_projection(P.Y, G, rect)
        if S.measure() >= eps:
            return False, _Trial(t, chosen, G, S, "measure(S) >= eps")
        return True, _Trial(t, chosen, G, S, "accepted")

    winner, results = first_success(trial, max_trials, workers)
    if winner is None:
        tried = [r for _, r in results]
        best = min(tried, key=lambda r: (r.S is None, r.S.measure() if r.S is not None else r.G.measure()))
        raise TrialBudgetExceeded(
            f"no accepted trial in {max_trials}; each trial succeeds with probability >= 1/3 "
            "when the selection inequality holds",
            best={"trial": best.index, "reason": best.reason, "G": best.G.measure(),
                  "S": best.S.measure() if best.S is not None else None},
            bound=Fraction(1, 3),
        )
    tr = results[winner][1]
    H = tr.G | tr.S
    report = verify_cover(P.X_star, H, Rect.canonical())
    plan = RandomPlan(
        method="thm15",
        seed=seed,
        trial_index=winner,
        G=tr.G,
        S=tr.S,
        H=H,
        target_bound=2 * eps,
        q=q,
        tau=tau,
        cell_range=(m, M),
        chosen_cells=tr.chosen,
        extra={
            "rejected_trials": [{"trial": r.index, "reason": r.reason} for _, r in results[:-1]],
            "collision_free": all(g >= tau for g in P.Y.gaps()),
        },
    )
    if not report.covered or H.measure() >= 2 * eps:
        raise AssertionError("repaired set failed its exact check; this is a bug")
    return P, plan, report


# ---------------------------------------------------------------------------
# greedy placement against the exponential bound


@dataclass
class Lemma8Result:
    u: List[Fraction]
    bound: float
    greedy_value: float
    exact_leftover: Fraction
    tolerance: float
    cells: int

    @property
    def within_bound(self) -> bool:
        return float(self.exact_leftover) <= self.bound * (1 + self.tolerance) + self.tolerance

    def to_json(self) -> dict:
        return {
            "u": [fmt_rational(x) for x in self.u],
            "bound": {"approx": self.bound, "cells": self.cells, "tolerance": self.tolerance},
            "greedy_value": {"approx": self.greedy_value, "cells": self.cells},
            "exact_leftover": fmt_rational(self.exact_leftover),
        }


def _samples(R: Rect, cells: int):
    a = float(R.a_lo) + (np.arange(cells) + 0.5) * float(R.width) / cells
    if R.b_lo == R.b_hi:
        return a, np.full(cells, float(R.b_lo)), float(R.width) / cells
    b = float(R.b_lo) + (np.arange(cells) + 0.5) * float(R.height) / cells
    aa, bb = np.meshgrid(a, b, indexing="xy")
    return aa.ravel(), bb.ravel(), float(R.area) / cells ** 2


def _window_measure(I: IntervalSet, Y: Sequence[Fraction], a, b, A: float, B: float):
    """``|(I - bY) ∩ [a - B, a - A]|`` at each sample (float)."""
    out = np.zeros_like(a)
    for y in Y:
        for lo, hi in I:
            s = float(lo) - b * float(y)
            e = float(hi) - b * float(y)
            out += np.clip(np.minimum(e, a - A) - np.maximum(s, a - B), 0.0, None)
    return out


def _hit(I: IntervalSet, Y: Sequence[Fraction], a, b, u: float):
    hit = np.zeros(a.shape, dtype=bool)
    for y in Y:
        v = a - u + b * float(y)
        for lo, hi in I:
            hit |= (v >= float(lo)) & (v <= float(hi))
    return hit


def lemma8_place(E_specs, U, R, quadrature_cells: int = 256, candidates: Optional[int] = None) -> Lemma8Result:
    """Greedy coordinate choice of translates ``u_i in [A_i, B_i]``.

    Each ``u_i`` minimizes the expected leftover given the earlier choices,
    with the later translates still uniform; the quantity is evaluated by
    midpoint quadrature.  The returned leftover is exact.
    """
    if quadrature_cells < 2:
        raise BadParams("quadrature_cells must be >= 2")
    R = R if isinstance(R, Rect) else Rect(*R)
    specs = [(I, tuple(as_pattern(Y).points)) for I, Y in E_specs]
    box = [(as_rational(A), as_rational(B)) for A, B in U]
    if len(box) != len(specs) or any(A >= B for A, B in box) or not box:
        raise EmptyBox("placement box must give one nonempty interval per set")
    a, b, w = _samples(R, quadrature_cells)
    fractions = [
        _window_measure(I, Y, a, b, float(A), float(B)) / float(B - A) for (I, Y), (A, B) in zip(specs, box)
    ]
    bound_integrand = np.exp(-np.sum(fractions, axis=0))
    bound = float(np.sum(bound_integrand) * w)
    # coarser rule for an error estimate
    a2, b2, w2 = _samples(R, max(2, quadrature_cells // 2))
    coarse = np.exp(-np.sum([
        _window_measure(I, Y, a2, b2, float(A), float(B)) / float(B - A) for (I, Y), (A, B) in zip(specs, box)
    ], axis=0))
    tolerance = max(1e-6, abs(float(np.sum(coarse) * w2) - bound))

    ncand = max(2, candidates or quadrature_cells)
    survive = np.ones_like(a)
    chosen: List[Fraction] = []
    for i, ((I, Y), (A, B)) in enumerate(zip(specs, box)):
        rest = np.prod([1 - f for f in fractions[i + 1:]], axis=0) if i + 1 < len(specs) else np.ones_like(a)
        best = None
        for c in range(ncand):
            u = A + (B - A) * Fraction(c, ncand - 1)
            val = float(np.sum(survive * ~_hit(I, Y, a, b, float(u)) * rest))
            if best is None or val < best[0]:
                best = (val, u)
        chosen.append(best[1])
        survive = survive * ~_hit(I, Y, a, b, float(best[1]))
    greedy_value = float(np.sum(survive) * w)

    bands = [band for (I, Y), u in zip(specs, chosen) for band in geo.bands_from(Y, I.translate(u))]
    if R.b_lo == R.b_hi:
        window = IntervalSet.interval(R.a_lo, R.a_hi)
        leftover = (window - geo.slice_of_bands(bands, R.b_lo)).measure()
    else:
        pieces = geo.uncovered_pieces(bands, R.a_lo, R.a_hi, R.b_lo, R.b_hi)
        leftover = sum((p.area() for p in pieces), Fraction(0))
    return Lemma8Result(chosen, bound, greedy_value, leftover, tolerance, quadrature_cells)


# ---------------------------------------------------------------------------
# translation cover


@dataclass
class Thm14bParams:
    eps: Fraction
    n: int
    u: Fraction
    Y: Pattern
    delta: Fraction
    A: Fraction
    B: Fraction
    k: int
    bound: float

    def to_json(self) -> dict:
        return {
            "eps": fmt_rational(self.eps),
            "n": self.n,
            "u": fmt_rational(self.u),
            "Y": [fmt_rational(y) for y in self.Y.points],
            "delta": fmt_rational(self.delta),
            "A": fmt_rational(self.A),
            "B": fmt_rational(self.B),
            "k": self.k,
            "leftover_bound": {"approx": self.bound, "form": "exp(-k n delta / (2 + delta))"},
        }


def thm14b_params(X, eps) -> Thm14bParams:
    X = as_pattern(X)
    eps = as_rational(eps)
    if not 0 < eps < 1:
        raise BadParams("eps must lie in (0, 1)")
    n = math.floor(3 * abs(math.log(eps)) / eps) + 1
    asc = sorted(X.points)
    start = next(
        (i for i in range(len(asc)) if i + n <= len(asc) and asc[i + n - 1] <= asc[i] + 1), None
    )
    if start is None:
        raise NotClusteredEnough(f"no unit interval holds {n} points of the pattern")
    u = asc[start]
    Y = X.subset(asc[start:start + n], family="thm14b-window")
    g = Y.min_gap()
    delta = g if g < eps / 8 else eps / 9
    k = math.ceil(eps / delta) - 1
    bound = math.exp(-k * n * float(delta) / (2 + float(delta)))
    return Thm14bParams(eps, n, u, Y, delta, u - delta, u + 2, k, bound)


def thm14b_translation_cover(
    X, eps, seed: int = 0, max_trials: int = DEFAULT_TRIALS, workers: Optional[int] = None
) -> Tuple[Thm14bParams, RandomPlan]:
    """``k`` random translates of ``[0, delta]`` whose differences with ``Y``
    nearly cover ``[0, 1]``, plus a translated copy of what they miss."""
    P = thm14b_params(X, eps)
    I = IntervalSet.interval(0, P.delta)
    unit = IntervalSet.interval(0, 1)

    def leftover(us: Sequence[Fraction]) -> Tuple[IntervalSet, IntervalSet]:
        G = IntervalSet([(x, x + P.delta) for x in us])
        return G, unit - bush_slice(P.Y, G, 1)

    def trial(t: int):
        us = uniform_rational(prng_stream(seed, t), P.A, P.B, P.k)
        G, S = leftover(us)
        ok = S.measure() < P.eps and S.measure() <= Fraction(P.bound)
        return ok, (us, G, S)

    winner, results = first_success(trial, max_trials, workers)
    method = "random"
    if winner is None:
        res = lemma8_place([(I, P.Y)] * P.k, [(P.A, P.B)] * P.k, Rect(0, 1, 1, 1))
        G, S = leftover(res.u)
        if not (S.measure() < P.eps and S.measure() <= Fraction(P.bound)):
            best = min((r[1][2].measure() for r in results), default=S.measure())
            raise TrialBudgetExceeded(
                f"no placement in {max_trials} trials or by greedy placement left less than the bound",
                best=min(best, S.measure()),
                bound=P.bound,
            )
        us, winner, method = res.u, -1, "lemma8-greedy"
    else:
        us, G, S = results[winner][1]
    H = G | S.translate(P.Y.first)
    if not bush_slice(P.Y, H, 1).covers(0, 1) or H.measure() >= 2 * P.eps:
        raise AssertionError("repaired set failed its exact check; this is a bug")
    plan = RandomPlan(
        method="thm14b",
        seed=seed,
        trial_index=winner,
        G=G,
        S=S,
        H=H,
        target_bound=2 * P.eps,
        tau=P.delta,
        placements=list(us),
        extra={"placement_method": method, "repair_shift": fmt_rational(P.Y.first)},
    )
    return P, plan
