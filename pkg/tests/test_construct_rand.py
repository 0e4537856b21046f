import math
from fractions import Fraction as F

import pytest

from erdos_cover.bush import Rect, slice, verify_cover
from erdos_cover.construct_rand import (
    TWO64,
    bernoulli,
    draw_u64,
    lemma8_place,
    prng_stream,
    select_Xstar,
    thm14b_params,
    thm14b_translation_cover,
    thm15_params,
    thm15_similarity_cover,
    uniform_rational,
)
from erdos_cover.errors import NotClusteredEnough, SelectionFailed
from erdos_cover.exactset import IntervalSet
from erdos_cover.patterns import Pattern, generate


def test_streams_are_reproducible_and_distinct():
    a = draw_u64(prng_stream(3, 5), 8)
    assert a == draw_u64(prng_stream(3, 5), 8)
    assert a != draw_u64(prng_stream(3, 6), 8)
    assert a != draw_u64(prng_stream(4, 5), 8)
    assert all(0 <= v < TWO64 for v in a)


def test_bernoulli_extremes_and_rate():
    gen = prng_stream(0, 0)
    assert not any(bernoulli(gen, F(0), 100))
    assert all(bernoulli(gen, F(1), 100))
    hits = sum(bernoulli(prng_stream(1, 0), F(1, 4), 20000))
    assert abs(hits / 20000 - 0.25) < 0.02


def test_uniform_rational_range():
    us = uniform_rational(prng_stream(2, 0), F(-1), F(3), 500)
    assert all(-1 <= u < 3 for u in us)


def test_selection_two_points():
    with pytest.raises(SelectionFailed):
        select_Xstar([1, 0], F(1, 2))


def test_selection_geometric_fails_with_table():
    with pytest.raises(SelectionFailed) as info:
        select_Xstar(generate("geometric", {"ratio": F(1, 2)}, 16), F(1, 10))
    assert info.value.table
    assert min(r.lhs for r in info.value.table) > float(F(1, 10) / 3)


def test_selection_dense_pattern_succeeds():
    """Separation decaying polynomially loses to (1 - q)^n, so a dense
    enough pattern meets the inequality."""
    eps, n = F(9, 10), 160
    X = Pattern.of([F(j, 2 * (n - 1)) for j in range(n)])
    C = X.max_abs()
    q = eps / (3 * (1 + 4 * C))
    Xs, delta, size = select_Xstar(X, eps)
    assert len(Xs) == size
    assert 4 * (1 + C) * size * (1 - q) ** size / delta <= eps / 3
    # the smallest qualifying size is returned
    d_prev = F(1, size - 2)
    assert 4 * (1 + C) * (size - 1) * (1 - q) ** (size - 1) / d_prev > eps / 3


def test_thm15_relaxed_small():
    X = [F(j, 64) for j in range(65)]
    P, plan, report = thm15_similarity_cover(X, F(1, 2), seed=0, relaxed=True)
    assert report.covered
    G, S, H = plan.measures
    assert G < F(1, 2) and S < F(1, 2) and H < 1
    assert verify_cover(P.X_star, plan.H, Rect.canonical()).covered
    assert P.tau == min(P.Y.gaps())
    # chosen cells lie inside the declared range
    lo, hi = plan.cell_range
    assert all(lo <= c < hi for c in plan.chosen_cells)


def test_thm15_strict_rejects_when_inequality_fails():
    with pytest.raises(SelectionFailed):
        thm15_params([F(j, 64) for j in range(65)], F(1, 2))


def test_thm15_worker_count_does_not_matter():
    X = [F(j, 32) for j in range(33)]
    runs = [thm15_similarity_cover(X, F(1, 2), seed=3, relaxed=True, workers=w)[1] for w in (1, 3)]
    assert runs[0].trial_index == runs[1].trial_index
    assert runs[0].H == runs[1].H


def test_thm14b_cluster():
    X = generate("cluster", {"n": 40}, 1)
    P, plan = thm14b_translation_cover(X, F(3, 10), seed=1)
    assert (P.n, P.delta, P.k) == (13, F(1, 39), 11)
    assert math.isclose(P.bound, math.exp(-11 * 13 * (1 / 39) / (2 + 1 / 39)))
    assert plan.H.measure() < F(3, 5)
    assert slice(P.Y, plan.H, 1).covers(0, 1)
    assert float(plan.S.measure()) <= P.bound + 1e-6


def test_thm14b_not_clustered():
    with pytest.raises(NotClusteredEnough):
        thm14b_params(generate("integers", {}, 20), F(1, 10))


def test_lemma8_trivial_and_constant():
    whole = IntervalSet([(-10, 10)])
    res = lemma8_place([(whole, Pattern.of([0]))], [(F(0), F(1))], Rect(0, 1, 1, 1))
    assert res.exact_leftover == 0 and res.within_bound
    # k identical strips, constant hit length c = 1/2 on a window of length 2
    I = IntervalSet([(0, F(1, 2))])
    k = 3
    res = lemma8_place([(I, Pattern.of([0]))] * k, [(F(-1), F(1))] * k, Rect(0, 1, 1, 1))
    assert math.isclose(res.bound, math.exp(-k * 0.5 / 2), rel_tol=1e-6)
    assert res.within_bound
