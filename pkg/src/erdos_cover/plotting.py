"""Pictures of bushes.

``bush_svg`` writes SVG by hand so the bytes depend only on the inputs.
The ``figure_*`` helpers use matplotlib (Agg) for the report path.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import List, Sequence, Tuple

from . import _geometry as geo
from .exactset import IntervalSet, fmt_rational

PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#76b7b2", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#e15759",
)
UNCOVERED = "#d62728"

WIDTH, HEIGHT = 640, 400
PAD = 40
AXIS_GAP = 36


def strip_polygon(y: Fraction, lo: Fraction, hi: Fraction, R) -> List[Tuple[Fraction, Fraction]]:
    """The band ``lo <= a + b*y <= hi`` clipped to the rectangle (may be empty)."""
    poly = list(geo.rect_vertices(R.a_lo, R.a_hi, R.b_lo, R.b_hi))
    poly = geo.clip(poly, Fraction(1), y, hi)
    return geo.clip(poly, Fraction(-1), -y, -lo)


def cell_polygon(cell) -> List[Tuple[Fraction, Fraction]]:
    pts = [(cell.lo0, cell.b0), (cell.hi0, cell.b0), (cell.hi1, cell.b1), (cell.lo1, cell.b1)]
    out: List[Tuple[Fraction, Fraction]] = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    return out


def _display_range(G: IntervalSet, R) -> Tuple[Fraction, Fraction]:
    w = max(R.width, Fraction(1))
    lo, hi = R.a_lo - w / 2, R.a_hi + w / 2
    if G:
        glo, ghi = G.bounds()
        lo, hi = max(lo, min(glo, R.a_lo)), min(hi, max(ghi, R.a_hi))
    return lo, hi


class _Frame:
    def __init__(self, R, a_range):
        self.a0, self.a1 = (float(v) for v in a_range)
        self.b0, self.b1 = float(R.b_lo), float(R.b_hi)
        self.plot_h = HEIGHT - 2 * PAD - AXIS_GAP

    def x(self, a) -> float:
        span = self.a1 - self.a0 or 1.0
        return PAD + (float(a) - self.a0) / span * (WIDTH - 2 * PAD)

    def y(self, b) -> float:
        span = self.b1 - self.b0 or 1.0
        return PAD + (self.b1 - float(b)) / span * self.plot_h

    def points(self, poly) -> str:
        return " ".join(f"{self.x(a):.3f},{self.y(b):.3f}" for a, b in poly)


def bush_svg(points: Sequence[Fraction], G: IntervalSet, R, cells) -> str:
    """SVG with one strip family per pattern point, the base intervals on the
    a-axis and uncovered cells in red (``class="uncovered"``)."""
    a_range = _display_range(G, R)
    frame = _Frame(R, a_range)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<title>bush of {len(points)} points over [{fmt_rational(R.a_lo)}, {fmt_rational(R.a_hi)}] x '
        f'[{fmt_rational(R.b_lo)}, {fmt_rational(R.b_hi)}]</title>',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for i, y in enumerate(points):
        colour = PALETTE[i % len(PALETTE)]
        out.append(f'<g class="strips" data-y="{fmt_rational(y)}" fill="{colour}" fill-opacity="0.35" stroke="none">')
        for lo, hi in G:
            poly = strip_polygon(y, lo, hi, R)
            if len(poly) >= 3:
                out.append(f'<polygon points="{frame.points(poly)}"/>')
        out.append("</g>")
    out.append(f'<g class="cells" fill="{UNCOVERED}" fill-opacity="0.8" stroke="{UNCOVERED}" stroke-width="0.5">')
    for cell in cells:
        out.append(f'<polygon class="uncovered" points="{frame.points(cell_polygon(cell))}"/>')
    out.append("</g>")
    rect = geo.rect_vertices(R.a_lo, R.a_hi, R.b_lo, R.b_hi)
    out.append(f'<polygon class="target" points="{frame.points(rect)}" fill="none" stroke="black" stroke-width="1"/>')

    axis_y = HEIGHT - PAD
    out.append(
        f'<line class="a-axis" x1="{PAD}" y1="{axis_y}" x2="{WIDTH - PAD}" y2="{axis_y}" stroke="black" stroke-width="1"/>'
    )
    shown = G & IntervalSet.interval(*a_range)
    for lo, hi in shown:
        x0, x1 = frame.x(lo), frame.x(hi)
        out.append(
            f'<rect class="base" x="{x0:.3f}" y="{axis_y - 4}" width="{max(x1 - x0, 0.5):.3f}" height="8" fill="black"/>'
        )
    for a in (frame.a0, frame.a1):
        out.append(f'<text x="{frame.x(a):.3f}" y="{axis_y + 18}" font-size="11" text-anchor="middle">{a:g}</text>')
    for b in (frame.b0, frame.b1):
        out.append(f'<text x="{PAD - 6}" y="{frame.y(b):.3f}" font-size="11" text-anchor="end">b={b:g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# report figures


def slice_profile(points: Sequence[Fraction], G: IntervalSet, R, samples: int = 200) -> List[Tuple[Fraction, Fraction]]:
    """Exact covered length of ``[a_lo, a_hi]`` at equally spaced heights."""
    from .bush import slice as bush_slice

    if samples < 2 or R.height == 0:
        heights = [R.b_lo]
    else:
        heights = [R.b_lo + R.height * Fraction(i, samples - 1) for i in range(samples)]
    return [(b, bush_slice(points, G, b).clip(R.a_lo, R.a_hi).measure()) for b in heights]


def write_profile_tsv(profile, path) -> None:
    from .certificate import atomic_write

    lines = ["b\tcovered_length"] + [f"{fmt_rational(b)}\t{fmt_rational(v)}" for b, v in profile]
    atomic_write(path, "\n".join(lines) + "\n")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def figure_bush(points: Sequence[Fraction], G: IntervalSet, R, cells, path) -> Path:
    from matplotlib.collections import PolyCollection

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, y in enumerate(points):
        polys = [
            [(float(a), float(b)) for a, b in poly]
            for lo, hi in G
            if len(poly := strip_polygon(y, lo, hi, R)) >= 3
        ]
        if polys:
            ax.add_collection(PolyCollection(polys, facecolors=PALETTE[i % len(PALETTE)], alpha=0.35, linewidths=0))
    bad = [[(float(a), float(b)) for a, b in cell_polygon(c)] for c in cells]
    if bad:
        ax.add_collection(PolyCollection(bad, facecolors=UNCOVERED, edgecolors=UNCOVERED, alpha=0.8))
    ax.set_xlim(float(R.a_lo), float(R.a_hi))
    ax.set_ylim(float(R.b_lo), float(R.b_hi))
    ax.set_xlabel("a (translation)")
    ax.set_ylabel("b (scale)")
    ax.set_title(f"|Y| = {len(points)}, measure(G) = {float(G.measure()):.4g}, uncovered cells: {len(cells)}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def figure_profile(profile, R, k: int, G: IntervalSet, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 3.5))
    bs = [float(b) for b, _ in profile]
    ax.plot(bs, [float(v) for _, v in profile], label="covered length of slice")
    ax.axhline(float(R.width), color="black", lw=0.8, ls="--", label="width of target")
    ax.axhline(float(min(R.width, k * G.measure())), color="grey", lw=0.8, ls=":", label="|Y| measure(G) cap")
    ax.set_xlabel("b")
    ax.set_ylabel("length")
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)
