import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erdos_cover.analysis import (
    arf_score,
    delta_n,
    extract_separated_subset,
    fineness,
    lb_ratio,
    n_delta,
    n_delta_witness,
    selection_lhs,
    selection_q,
    selection_table,
    ulf_bound,
)
from erdos_cover.errors import NotFineEnough, OutOfRange, TooFewPoints
from erdos_cover.patterns import Pattern, generate
from oracles import delta_n_brute, n_delta_brute
from strategies import points

GRID5 = Pattern.of([1, F(3, 4), F(1, 2), F(1, 4), 0])


def test_fineness_equal_gaps():
    r = fineness([1, F(1, 2), 0])
    assert (r.rel_fineness, r.rel_separation) == (F(1, 2), F(1, 2))
    r = fineness(GRID5)
    assert (r.rel_fineness, r.rel_separation) == (F(1, 4), F(1, 4))


def test_arf_score_by_hand():
    # (0, 1): longest gap 1/2, span 1, weight 2; the half-length pairs score higher
    assert arf_score(Pattern.of([1, F(1, 2), 0])) == 1


def test_arf_score_brute():
    P = Pattern.of([3, F(5, 2), F(9, 4), 2, 1, 0])
    pts = sorted(P.points)
    best = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            u, v = pts[i], pts[j]
            gap = max(b - a for a, b in zip(pts[i:j + 1], pts[i + 1:j + 1]))
            s = gap / (v - u) * (abs(u) + abs(v) + 1)
            best = s if best is None else min(best, s)
    assert arf_score(P) == best


def test_ulf_and_lb():
    Z = generate("integers", {}, 5)
    assert ulf_bound(Z) == 2
    assert lb_ratio(Z) == 3  # |Z ∩ [-1, 1]| / 1
    assert ulf_bound(GRID5) == 5


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        fineness([1])


def test_extract_eleven_points():
    P = Pattern.of([F(i, 10) for i in range(11)])
    ex = extract_separated_subset(P, F(1, 5))
    gaps = ex.pattern.gaps()
    assert ex.pattern.first == 1 and ex.pattern.last == 0
    assert all(F(1, 5) <= g <= F(3, 5) for g in gaps)
    assert ex.three_eps_fine
    assert ex.pattern.points == (1, F(4, 5), F(3, 5), F(2, 5), F(1, 5), 0)


@pytest.mark.parametrize("pts, eps", [([1, 0], 1), ([1, F(1, 2), 0], F(1, 2))])
def test_extract_keeps_everything(pts, eps):
    assert extract_separated_subset(pts, eps).pattern.points == tuple(F(p) for p in pts)


def test_extract_requires_fine():
    with pytest.raises(NotFineEnough):
        extract_separated_subset([1, F(1, 10), 0], F(1, 2))


def test_n_delta_examples():
    assert n_delta(GRID5, F(1, 4)) == 5
    n, w = n_delta_witness(GRID5, F(1, 3))
    assert n == 4
    assert min(w.gaps()) >= F(1, 3) * w.span


def test_delta_n_example():
    assert delta_n(GRID5, 5)[0] == F(1, 4)
    with pytest.raises(OutOfRange):
        delta_n(GRID5, 2)


@settings(max_examples=60)
@given(points(min_k=2, max_k=16, lo=0, hi=4, den=16), st.integers(1, 12).map(lambda d: F(1, d)))
def test_n_delta_matches_brute_force(vals, delta):
    assert n_delta(vals, delta) == n_delta_brute([F(v) for v in vals], delta)


@settings(max_examples=60)
@given(points(min_k=3, max_k=12, lo=0, hi=4, den=16), st.data())
def test_delta_n_matches_brute_force(vals, data):
    n = data.draw(st.integers(3, len(vals)))
    d, witness = delta_n(vals, n)
    assert d == delta_n_brute(vals, n)
    assert len(witness) == n and min(witness.gaps()) == d * witness.span


def test_selection_q_formula():
    assert selection_q(F(1), F(3, 10)) == F(1, 50)


def test_selection_lhs_exact():
    assert selection_lhs(F(1), F(1, 2), 3, F(1, 2)) == 4 * 2 * 3 * F(1, 8) * 2


def test_selection_table_prefilter_matches_exact():
    X = Pattern.of([F(j, 64) for j in range(65)])
    rows = selection_table(X, F(1, 2), stop_at_first=False)
    assert [r.n for r in rows] == list(range(3, 66))
    # the pigeonhole prefilter never hides a satisfiable row
    for r in rows:
        if r.delta is None:
            assert r.lhs > 1 / 6
    geo = selection_table(generate("geometric", {"ratio": F(1, 2)}, 12), F(1, 10), stop_at_first=False)
    assert not any(r.ok for r in geo)
    assert min(r.lhs for r in geo) >= math.log(2) - 0.01
