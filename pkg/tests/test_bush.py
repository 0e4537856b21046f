import random
from fractions import Fraction as F

import pytest

from erdos_cover.bush import (
    Rect,
    covered_area,
    render_svg,
    slice,
    uncovered_projection,
    verify_cover,
)
from erdos_cover.errors import BadParams, EmptyPattern, ZeroScale
from erdos_cover.exactset import IntervalSet
from oracles import grid, slice_length_in
from strategies import rand_pairs, rand_points, rand_rect

S = IntervalSet


@pytest.mark.parametrize(
    "Y, G, b, expected",
    [
        ([0], [(0, 1)], 2, [(0, 1)]),
        ([1, 0], [(0, F(1, 4))], 2, [(-2, F(-7, 4)), (0, F(1, 4))]),
        ([1, F(1, 2)], [(0, 1)], 2, [(-2, 0)]),
    ],
)
def test_slice_examples(Y, G, b, expected):
    assert slice(Y, S(G), b) == S(expected)


def test_slice_errors():
    with pytest.raises(ZeroScale):
        slice([1], S([(0, 1)]), 0)
    with pytest.raises(EmptyPattern):
        slice([], S([(0, 1)]), 1)


@pytest.mark.parametrize("method", ["slab", "sweep"])
def test_verify_examples(method):
    assert verify_cover([0], S([(0, 1)]), None, method).covered
    assert verify_cover([1], S([(1, 3)]), None, method).covered
    rep = verify_cover([1, 0], S([(0, F(1, 3))]), None, method)
    assert not rep.covered and rep.uncovered_cells


def test_third_example_many_shapes():
    rng = random.Random(3)
    for _ in range(30):
        cuts = sorted(F(rng.randint(0, 60), 12) for _ in range(4))
        G = S([(cuts[0], cuts[0] + F(1, 6)), (cuts[2], cuts[2] + F(1, 6))])
        assert G.measure() == F(1, 3)
        assert not verify_cover([1, 0], G).covered


def test_projection_examples():
    assert uncovered_projection([0], S([(0, 1)])) == S([])
    assert uncovered_projection([0], S([(0, F(1, 2))])) == S([(F(1, 2), 1)])
    assert uncovered_projection([1], S([(1, 2)])) == S([(0, 1)])


@pytest.mark.parametrize(
    "Y, G, R, area",
    [
        ([0], [(0, F(1, 2))], (-1, 1, 1, 2), F(1, 2)),
        ([F(1, 2)], [(0, 1)], (0, 1, 1, 2), F(1, 4)),
        ([1], [(0, 1)], (0, 1, 1, 2), 0),
    ],
)
def test_covered_area_examples(Y, G, R, area):
    assert covered_area(Y, S(G), R) == area


def test_covered_area_against_quadrature():
    """Trapezoid rule on the exact slice length; the integrand is piecewise
    affine so a fine rule must land within a small tolerance."""
    rng = random.Random(11)
    for _ in range(15):
        Y = rand_points(rng, rng.randint(1, 4))
        pairs = rand_pairs(rng, rng.randint(1, 4), max_len=1)
        R = rand_rect(rng)
        exact = covered_area(Y, S(pairs), R)
        bs = grid(R[2], R[3], 401)
        vals = [slice_length_in(Y, pairs, b, R[0], R[1]) for b in bs]
        h = (R[3] - R[2]) / 400
        approx = h * (sum(vals) - (vals[0] + vals[-1]) / 2)
        assert abs(float(exact - approx)) < 0.02


def test_report_fields_and_area_identity():
    rng = random.Random(5)
    for _ in range(40):
        Y = rand_points(rng, rng.randint(1, 4))
        G = S(rand_pairs(rng, rng.randint(0, 5)))
        R = Rect(*rand_rect(rng))
        rep = verify_cover(Y, G, R)
        assert rep.uncovered_area == sum((c.area for c in rep.uncovered_cells), F(0))
        assert covered_area(Y, G, R) + rep.uncovered_area == R.area
        assert rep.covered == (not rep.uncovered_cells)
        if rep.covered:
            assert rep.max_slice_deficit == 0 and not rep.projection_S
        # deficit at any height is bounded by the reported maximum
        for b in (R.b_lo, (R.b_lo + R.b_hi) / 2, R.b_hi):
            gaps = S([(R.a_lo, R.a_hi)]) - slice(Y, G, b)
            assert gaps.measure() <= rep.max_slice_deficit


def test_slab_and_sweep_agree():
    rng = random.Random(7)
    for _ in range(40):
        Y = rand_points(rng, rng.randint(1, 4))
        G = S(rand_pairs(rng, rng.randint(0, 4)))
        R = rand_rect(rng)
        a, b = verify_cover(Y, G, R), verify_cover(Y, G, R, method="sweep")
        assert a.covered == b.covered
        assert a.uncovered_area == b.uncovered_area
        assert a.projection_S == b.projection_S
        assert a.max_slice_deficit == b.max_slice_deficit


def test_degenerate_rects():
    Y, G = [1, 0], S([(0, F(1, 2))])
    rep = verify_cover(Y, G, Rect(0, 1, 1, 1))
    assert not rep.covered and rep.projection_S == S([(F(1, 2), 1)])
    seg = verify_cover([0], S([(0, 1)]), Rect(F(1, 2), F(1, 2), 1, 2))
    assert seg.covered
    assert covered_area(Y, G, Rect(0, 1, 1, 1)) == 0


def test_rect_validation():
    with pytest.raises(BadParams):
        Rect(1, 0, 1, 2)
    with pytest.raises(BadParams):
        Rect(0, 1, 0, 1)
    R = Rect.from_json(["-1/2", "1", "1", "3/2"])
    assert R.width == F(3, 2) and R.to_json() == ["-1/2", "1", "1", "3/2"]


def test_is_uncovered_outside_rect():
    rep = verify_cover([0], S([(0, 1)]))
    with pytest.raises(BadParams):
        rep.is_uncovered(5, 1)


def test_render_svg(tmp_path):
    doc = render_svg([1, 0], S([(0, F(1, 4))]), None, tmp_path / "a.svg")
    assert doc.count('class="strips"') == 2
    assert (tmp_path / "a.svg").read_text() == doc
    assert render_svg([1, 0], S([(0, F(1, 4))])) == doc
    covered = render_svg([0], S([(0, 1)]))
    assert 'class="uncovered"' not in covered
    G = S([(0, F(1, 3))])
    rep = verify_cover([1, 0], G)
    doc = render_svg([1, 0], G)
    assert doc.count('class="uncovered"') == len(rep.uncovered_cells) > 0
