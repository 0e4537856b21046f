"""Exact covering sets for bushes of finite point patterns.

A set ``G`` of reals *covers* the rectangle ``R`` for the pattern ``Y`` when
every similar copy ``a + bY`` with ``(a, b)`` in ``R`` meets ``G``.  The
package builds such sets, verifies them exactly over the rationals and
brackets the least measure they can have.
"""

__version__ = "0.1.0"

from .bush import CoverageReport, Rect, covered_area, slice, uncovered_projection, verify_cover  # noqa: E402,A004
from .errors import ErdosCoverError  # noqa: E402
from .exactset import IntervalSet  # noqa: E402
from .patterns import Pattern, generate  # noqa: E402

__all__ = [
    "CoverageReport",
    "ErdosCoverError",
    "IntervalSet",
    "Pattern",
    "Rect",
    "covered_area",
    "generate",
    "slice",
    "uncovered_projection",
    "verify_cover",
]
