from fractions import Fraction as F

from erdos_cover.bush import Rect, verify_cover
from erdos_cover.exactset import IntervalSet
from erdos_cover.plotting import bush_svg, cell_polygon, slice_profile, strip_polygon


def test_strip_polygon_inside_rect():
    R = Rect.canonical()
    poly = strip_polygon(F(0), F(0), F(1, 2), R)
    assert sorted(poly) == sorted([(0, 1), (F(1, 2), 1), (F(1, 2), 2), (0, 2)])
    assert strip_polygon(F(0), F(5), F(6), R) == []


def test_svg_is_deterministic_and_counts_cells():
    G = IntervalSet([(0, F(1, 3))])
    rep = verify_cover([1, 0], G)
    a = bush_svg((F(1), F(0)), G, Rect.canonical(), rep.uncovered_cells)
    b = bush_svg((F(1), F(0)), G, Rect.canonical(), rep.uncovered_cells)
    assert a == b
    assert a.count('class="uncovered"') == len(rep.uncovered_cells)
    assert a.startswith("<?xml")


def test_cell_polygon_triangle():
    rep = verify_cover([1], IntervalSet([(1, 2)]))
    polys = [cell_polygon(c) for c in rep.uncovered_cells]
    assert polys and all(3 <= len(p) <= 4 for p in polys)


def test_slice_profile_exact():
    prof = slice_profile((F(1, 2),), IntervalSet([(0, 1)]), Rect.canonical(), 3)
    assert prof == [(1, F(1, 2)), (F(3, 2), F(1, 4)), (2, 0)]
