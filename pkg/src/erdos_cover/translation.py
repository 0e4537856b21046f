"""Translations only: how much of a window the translates ``a + X`` can
hit a small set ``G``, for uniformly locally finite patterns."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analysis import ulf_bound
from .bush import slice as bush_slice
from .errors import EmptyWindow
from .exactset import IntervalSet, as_rational, fmt_rational
from .patterns import as_pattern


@dataclass(frozen=True)
class TranslationReport:
    M: int
    window: tuple
    lhs: Fraction
    rhs: Fraction
    witness_set: IntervalSet
    fraction: Fraction
    tau: Fraction
    vacuous: bool
    radius: Fraction

    @property
    def bound_holds(self) -> bool:
        return self.lhs < self.rhs

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "truncation_radius": fmt_rational(self.radius),
            "window": [fmt_rational(self.window[0]), fmt_rational(self.window[1])],
            "lhs": fmt_rational(self.lhs),
            "rhs": fmt_rational(self.rhs),
            "bound_holds": self.bound_holds,
            "vacuous": self.vacuous,
            "tau": fmt_rational(self.tau),
            "witness_set": self.witness_set.to_json(),
            "fraction": fmt_rational(self.fraction),
        }


def thm14a_check(X, G: IntervalSet, u, v) -> TranslationReport:
    """Exact ``|(G - X) ∩ [u, v]|`` against ``|G| M (v - u + 1/M)``, and the
    set of ``a`` in ``[u, v]`` whose translate ``a + X`` misses ``G``."""
    X = as_pattern(X)
    u, v = as_rational(u), as_rational(v)
    if v <= u:
        raise EmptyWindow("window needs v > u")
    M = ulf_bound(X)
    window = IntervalSet.interval(u, v)
    hit = bush_slice(X, G, 1) & window
    lhs = hit.measure()
    witness = window - hit
    lam = G.measure()
    return TranslationReport(
        M=M,
        window=(u, v),
        lhs=lhs,
        rhs=lam * M * (v - u + Fraction(1, M)),
        witness_set=witness,
        fraction=witness.measure() / (v - u),
        tau=1 - M * lam,
        vacuous=M * lam >= 1,
        radius=X.max_abs(),
    )
