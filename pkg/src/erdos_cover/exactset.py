"""Exact rationals and canonical finite unions of closed intervals.

Rationals are :class:`fractions.Fraction` throughout.  An :class:`IntervalSet`
is an immutable, sorted tuple of pairwise disjoint closed intervals
``(lo, hi)`` with ``hi_i < lo_{i+1}``; touching intervals are merged so that
equal sets have equal representations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Tuple, Union

from .errors import MalformedInterval, ParseError, ZeroScale

Rational = Fraction
RationalLike = Union[int, str, Fraction]
Pair = Tuple[Fraction, Fraction]


def as_rational(x) -> Fraction:
    """Coerce ``x`` to a Fraction.

    Strings must be ``"p"`` or ``"p/q"``; floats are accepted and converted
    exactly (their binary value, not their decimal repr).
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ParseError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ParseError("empty rational")
        try:
            if "/" in s:
                p, q = s.split("/")
                return Fraction(int(p), int(q))
            return Fraction(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    raise ParseError(f"not a rational: {x!r}")


def fmt_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _canonical(pairs: Iterable[Pair]) -> Tuple[Pair, ...]:
    out = []
    for lo, hi in sorted(pairs):
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(out)


class IntervalSet:
    __slots__ = ("_iv",)

    def __init__(self, intervals: Iterable[Sequence] = ()):
        pairs = []
        for item in intervals:
            lo, hi = as_rational(item[0]), as_rational(item[1])
            if lo > hi:
                raise MalformedInterval(f"lo > hi in ({lo}, {hi})")
            pairs.append((lo, hi))
        self._iv = _canonical(pairs)

    @classmethod
    def _trusted(cls, pairs: Tuple[Pair, ...]) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj._iv = pairs
        return obj

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls._trusted(())

    @classmethod
    def interval(cls, lo: RationalLike, hi: RationalLike) -> "IntervalSet":
        return cls([(lo, hi)])

    @property
    def intervals(self) -> Tuple[Pair, ...]:
        return self._iv

    def __iter__(self) -> Iterator[Pair]:
        return iter(self._iv)

    def __len__(self) -> int:
        return len(self._iv)

    def __bool__(self) -> bool:
        return bool(self._iv)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._iv == other._iv

    def __hash__(self) -> int:
        return hash(self._iv)

    def __repr__(self) -> str:
        body = ", ".join(f"[{fmt_rational(a)}, {fmt_rational(b)}]" for a, b in self._iv)
        return f"IntervalSet({body})"

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self._iv), Fraction(0))

    def bounds(self) -> Pair:
        if not self._iv:
            raise ValueError("empty interval set has no bounds")
        return self._iv[0][0], self._iv[-1][1]

    def contains(self, x) -> bool:
        x = as_rational(x)
        lo_i, hi_i = 0, len(self._iv)
        while lo_i < hi_i:
            mid = (lo_i + hi_i) // 2
            if self._iv[mid][1] < x:
                lo_i = mid + 1
            else:
                hi_i = mid
        return lo_i < len(self._iv) and self._iv[lo_i][0] <= x

    __contains__ = contains

    def covers(self, lo, hi) -> bool:
        """True iff ``[lo, hi]`` is contained in this set."""
        lo, hi = as_rational(lo), as_rational(hi)
        for a, b in self._iv:
            if a <= lo and hi <= b:
                return True
        return False

    def affine_image(self, alpha: RationalLike, beta: RationalLike) -> "IntervalSet":
        return affine_image(self, alpha, beta)

    def translate(self, shift: RationalLike) -> "IntervalSet":
        s = as_rational(shift)
        return IntervalSet._trusted(tuple((lo + s, hi + s) for lo, hi in self._iv))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return union(self, other)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        return subtract(self, other)

    __or__ = union
    __and__ = intersect
    __sub__ = subtract

    def clip(self, lo, hi) -> "IntervalSet":
        return intersect(self, IntervalSet.interval(lo, hi))

    def to_json(self) -> list:
        return [[fmt_rational(lo), fmt_rational(hi)] for lo, hi in self._iv]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        if isinstance(data, dict):
            data = data.get("intervals", data.get("H", data.get("G")))
        if not isinstance(data, list):
            raise ParseError("interval set must be a list of [lo, hi] pairs")
        try:
            return cls((pair[0], pair[1]) for pair in data)
        except (TypeError, IndexError, KeyError) as exc:
            raise ParseError(f"bad interval pair in {data!r}") from exc


def normalize(raw: Iterable[Sequence]) -> IntervalSet:
    """Canonical form of a list of (lo, hi) pairs."""
    return IntervalSet(raw)


def measure(s: IntervalSet) -> Fraction:
    return s.measure()


def affine_image(s: IntervalSet, alpha: RationalLike, beta: RationalLike) -> IntervalSet:
    """``alpha + beta * s``; reflection reverses interval order when beta < 0."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if beta == 0:
        raise ZeroScale("affine image with zero scale")
    if beta > 0:
        pairs = tuple((alpha + beta * lo, alpha + beta * hi) for lo, hi in s)
    else:
        pairs = tuple((alpha + beta * hi, alpha + beta * lo) for lo, hi in reversed(s.intervals))
    return IntervalSet._trusted(pairs)


def union(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    if not t:
        return s
    if not s:
        return t
    return IntervalSet._trusted(_canonical(s.intervals + t.intervals))


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    pairs = []
    for s in sets:
        pairs.extend(s.intervals)
    return IntervalSet._trusted(_canonical(pairs))


def intersect(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    a, b = s.intervals, t.intervals
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return IntervalSet._trusted(_canonical(out))


def subtract(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    """Closure of ``s`` minus ``t``.

    Both operands are closed, so the plain difference is not closed; the
    closure differs from it by finitely many endpoints (measure zero).
    """
    out = []
    b = t.intervals
    j = 0
    for lo, hi in s:
        while j < len(b) and b[j][1] < lo:
            j += 1
        if lo == hi:
            if not t.contains(lo):
                out.append((lo, hi))
            continue
        cur = lo
        k = j
        while k < len(b) and b[k][0] <= hi:
            tlo, thi = b[k]
            if tlo > cur:
                out.append((cur, tlo))
            cur = max(cur, thi)
            k += 1
        if cur < hi:
            out.append((cur, hi))
    return IntervalSet._trusted(_canonical(out))


def boolean_ops(s: IntervalSet, t: IntervalSet, op: str) -> IntervalSet:
    if op == "union":
        return union(s, t)
    if op == "intersect":
        return intersect(s, t)
    if op == "subtract":
        return subtract(s, t)
    raise ValueError(f"unknown op {op!r}")
