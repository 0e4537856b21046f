"""Independent reference computations used by the tests.

Nothing here imports the package: the oracles work from the definitions
with plain integers, Fractions and brute force.
"""

from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np


def in_union(pairs, x):
    return any(lo <= x <= hi for lo, hi in pairs)


def total_length(pairs):
    """Length of a union of closed intervals by sorting and sweeping."""
    total, cur_lo, cur_hi = Fraction(0), None, None
    for lo, hi in sorted(pairs):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def grid(lo, hi, n=101):
    return [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]


def bush_membership(Y, pairs, a_values, b_values):
    """``member[j, i]`` iff ``a_i + b_j y`` lies in some ``[lo, hi]`` for some ``y``.

    Exact: everything is scaled to a common integer denominator.
    """
    den_a = lcm(*(Fraction(a).denominator for a in a_values))
    den_b = lcm(*(Fraction(b).denominator for b in b_values))
    den_y = lcm(*(Fraction(y).denominator for y in Y))
    den_g = lcm(*(Fraction(e).denominator for p in pairs for e in p)) if pairs else 1
    K = den_a * den_b * den_y * den_g
    ints = [int(a * K) for a in a_values]
    shifts = [[int(b * y * K) for y in Y] for b in b_values]
    bounds = [(int(lo * K), int(hi * K)) for lo, hi in pairs]
    biggest = max([abs(v) for v in ints] + [abs(v) for row in shifts for v in row] + [abs(v) for p in bounds for v in p] + [1])
    dtype = np.int64 if biggest < 2 ** 60 else object
    A = np.array(ints, dtype=dtype)
    member = np.zeros((len(b_values), len(a_values)), dtype=bool)
    for j, row in enumerate(shifts):
        for shift in row:
            vals = A + shift
            for lo, hi in bounds:
                member[j] |= (lo <= vals) & (vals <= hi)
    return member


def n_delta_brute(points, delta):
    pts = sorted(points, reverse=True)
    for size in range(len(pts), 1, -1):
        for sub in combinations(pts, size):
            span = sub[0] - sub[-1]
            if min(a - b for a, b in zip(sub, sub[1:])) >= delta * span:
                return size
    return 1


def delta_n_brute(points, n):
    pts = sorted(points, reverse=True)
    best = None
    for sub in combinations(pts, n):
        r = Fraction(min(a - b for a, b in zip(sub, sub[1:])), sub[0] - sub[-1])
        best = r if best is None else max(best, r)
    return best


def slice_length_in(Y, pairs, b, a_lo, a_hi):
    """Measure of ``(G - bY) ∩ [a_lo, a_hi]`` from the definition."""
    shifted = []
    for y in Y:
        for lo, hi in pairs:
            l, h = max(lo - b * y, a_lo), min(hi - b * y, a_hi)
            if l <= h:
                shifted.append((l, h))
    return total_length(shifted)
