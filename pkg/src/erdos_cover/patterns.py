"""Finite patterns ``y_1 > y_2 > ... > y_k`` and the families that produce them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import BadParams, DuplicatePoint, EmptyPattern, ParseError
from .exactset import as_rational, fmt_rational

FAMILIES = ("geometric", "power", "example5", "example6", "cluster", "integers", "custom")
DEFAULT_DENOMINATOR_BOUND = 1 << 32


@dataclass(frozen=True)
class Pattern:
    """A strictly decreasing tuple of rationals with provenance."""

    points: Tuple[Fraction, ...]
    family: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)
    stage: int = 0

    def __post_init__(self):
        pts = tuple(as_rational(p) for p in self.points)
        if not pts:
            raise EmptyPattern("a pattern needs at least one point")
        for a, b in zip(pts, pts[1:]):
            if a <= b:
                raise BadParams("pattern points must be strictly decreasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "params", _json_params(self.params))

    @classmethod
    def of(cls, values: Iterable, family: str = "custom", params=None, stage: int = 0) -> "Pattern":
        """Build from unordered values; rejects duplicates."""
        pts = [as_rational(v) for v in values]
        if not pts:
            raise EmptyPattern("a pattern needs at least one point")
        uniq = set(pts)
        if len(uniq) != len(pts):
            dup = next(p for p in pts if pts.count(p) > 1)
            raise DuplicatePoint(f"duplicate point {fmt_rational(dup)}")
        return cls(tuple(sorted(uniq, reverse=True)), family, params or {}, stage or len(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def first(self) -> Fraction:
        return self.points[0]

    @property
    def last(self) -> Fraction:
        return self.points[-1]

    @property
    def span(self) -> Fraction:
        return self.points[0] - self.points[-1]

    def gaps(self) -> List[Fraction]:
        p = self.points
        return [p[i] - p[i + 1] for i in range(len(p) - 1)]

    def min_gap(self) -> Fraction:
        g = self.gaps()
        if not g:
            raise BadParams("a one-point pattern has no gaps")
        return min(g)

    def max_abs(self) -> Fraction:
        return max(abs(self.points[0]), abs(self.points[-1]))

    def shifted(self, c) -> "Pattern":
        """``P - c``."""
        c = as_rational(c)
        return Pattern(tuple(p - c for p in self.points), self.family, self.params, self.stage)

    def scaled(self, d) -> "Pattern":
        """``d * P`` for ``d > 0``."""
        d = as_rational(d)
        if d <= 0:
            raise BadParams("scale factor must be positive")
        return Pattern(tuple(p * d for p in self.points), self.family, self.params, self.stage)

    def subset(self, points: Iterable[Fraction], family: str | None = None, **params) -> "Pattern":
        merged = {**self.params, **params}
        return Pattern.of(points, family or self.family, merged, self.stage)

    def to_json(self) -> dict:
        return {
            "points": [fmt_rational(p) for p in self.points],
            "family": self.family,
            "params": _json_params(self.params),
            "stage": self.stage,
        }

    @classmethod
    def from_json(cls, data) -> "Pattern":
        if isinstance(data, list):
            return cls.of(data, "custom")
        if not isinstance(data, dict) or "points" not in data:
            raise ParseError("pattern JSON needs a 'points' list")
        return cls.of(data["points"], data.get("family", "custom"), data.get("params", {}), int(data.get("stage", 0)))


def as_pattern(y) -> Pattern:
    if isinstance(y, Pattern):
        return y
    return Pattern.of(y)


def _json_params(params: Mapping[str, Any]) -> dict:
    out = {}
    for key in sorted(params):
        v = params[key]
        if isinstance(v, Fraction):
            v = fmt_rational(v)
        elif isinstance(v, (list, tuple)):
            v = [fmt_rational(x) if isinstance(x, Fraction) else x for x in v]
        out[key] = v
    return out


def _param(params: Mapping[str, Any], name: str, default=None, required=False) -> Fraction:
    if name not in params or params[name] is None:
        if required:
            raise BadParams(f"missing parameter {name!r}")
        return default
    try:
        return as_rational(params[name])
    except ParseError as exc:
        raise BadParams(f"parameter {name!r} is not rational") from exc


def _rational_power(base: int, alpha: Fraction, bound: int) -> Fraction:
    with localcontext() as ctx:
        ctx.prec = 60
        val = Decimal(base) ** (Decimal(alpha.numerator) / Decimal(alpha.denominator))
    return Fraction(val).limit_denominator(bound)


def _pow2_below(x: Fraction) -> Fraction:
    """Largest power of 1/2 (or 2) strictly below ``x > 0``."""
    e = math.floor(math.log2(x.numerator) - math.log2(x.denominator))
    p = Fraction(2) ** e
    while p >= x:
        p /= 2
    while p * 2 < x:
        p *= 2
    return p


def _example5(params, stage: int) -> Tuple[List[Fraction], dict]:
    direction = params.get("direction", "up")
    if direction not in ("up", "down"):
        raise BadParams("direction must be 'up' or 'down'")
    if "anchors" in params:
        anchors = [as_rational(a) for a in params["anchors"]]
    else:
        ratio = _param(params, "anchor_ratio", Fraction(1, 4))
        if not 0 < ratio < 1:
            raise BadParams("anchor_ratio must lie in (0, 1)")
        anchors = [ratio ** i for i in range(stage + 1)]
    if len(anchors) < stage + 1:
        raise BadParams(f"example5 needs {stage + 1} anchors for stage {stage}")
    if any(a <= b for a, b in zip(anchors, anchors[1:])) or anchors[-1] <= 0:
        raise BadParams("anchors must be positive and strictly decreasing")
    given = params.get("gaps")
    points, used = [], []
    for k in range(1, stage + 1):
        limit = (anchors[k - 1] - anchors[k]) / (4 * k * k)
        if given is not None:
            eps = as_rational(given[k - 1])
            if not 0 < eps < limit:
                raise BadParams(f"gap for block {k} must satisfy 0 < eps < {fmt_rational(limit)}")
        else:
            eps = _pow2_below(limit)
        sign = 1 if direction == "up" else -1
        points.extend(anchors[k - 1] + sign * i * eps for i in range(2 * k + 1))
        used.append(eps)
    meta = {"anchors": anchors[: stage + 1], "gaps": used, "direction": direction}
    return points, meta


def _example6(params, stage: int) -> Tuple[List[Fraction], dict]:
    base = _param(params, "base", Fraction(2))
    if base <= 1:
        raise BadParams("example6 base must exceed 1")
    points = []
    for k in range(1, stage + 1):
        y = base ** k
        count = k * math.ceil(y) + 1
        width = 1 / y
        points.extend(y - width * Fraction(i, count - 1) for i in range(count))
    return points, {"base": base}


def generate(family: str, params: Mapping[str, Any] | None = None, stage: int = 1) -> Pattern:
    """Truncation of a named family at ``stage``."""
    params = dict(params or {})
    if stage < 1:
        raise BadParams("stage must be >= 1")
    meta: Dict[str, Any] = {}
    if family == "geometric":
        rho = _param(params, "ratio", Fraction(1, 2))
        if not 0 < rho < 1:
            raise BadParams("geometric ratio must lie in (0, 1)")
        start = _param(params, "start", Fraction(1))
        pts = [start * rho ** i for i in range(stage)]
        meta = {"ratio": rho, "start": start}
    elif family == "power":
        alpha = _param(params, "alpha", Fraction(1, 2))
        if not 0 < alpha < 1:
            raise BadParams("power exponent must lie in (0, 1)")
        bound = int(params.get("denominator_bound", DEFAULT_DENOMINATOR_BOUND))
        pts = [_rational_power(i, alpha, bound) for i in range(1, stage + 1)]
        meta = {"alpha": alpha, "denominator_bound": bound}
    elif family == "example5":
        pts, meta = _example5(params, stage)
    elif family == "example6":
        pts, meta = _example6(params, stage)
    elif family == "cluster":
        n = int(params.get("n", stage))
        lo = _param(params, "lo", Fraction(0))
        hi = _param(params, "hi", Fraction(1))
        if n < 1 or (n >= 2 and lo >= hi):
            raise BadParams("cluster needs n >= 1 and lo < hi")
        pts = [hi] if n == 1 else [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]
        meta = {"n": n, "lo": lo, "hi": hi}
    elif family == "integers":
        lo = int(params.get("lo", -stage))
        hi = int(params.get("hi", stage))
        if lo > hi:
            raise BadParams("integers needs lo <= hi")
        pts = [Fraction(i) for i in range(lo, hi + 1)]
        meta = {"lo": lo, "hi": hi}
    elif family == "custom":
        if "points" not in params:
            raise BadParams("custom family needs 'points'")
        pts = [as_rational(p) for p in params["points"]]
    else:
        raise BadParams(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    try:
        return Pattern.of(pts, family, meta, stage)
    except DuplicatePoint as exc:
        raise BadParams(f"{family} parameters produce overlapping points: {exc}") from exc


def parse_pattern_text(text: str) -> Pattern:
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            return Pattern.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid pattern JSON: {exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(as_rational(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if not values:
        raise EmptyPattern("pattern file has no points")
    return Pattern.of(values, "custom")


def load_pattern(path) -> Pattern:
    return parse_pattern_text(Path(path).read_text(encoding="utf-8"))


def save_pattern(pattern: Pattern, path) -> None:
    from .certificate import atomic_write

    atomic_write(path, json.dumps(pattern.to_json(), indent=2, sort_keys=True) + "\n")
