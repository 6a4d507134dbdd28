"""Pure-Python evaluation kernel.

Semantics note: a point may assign negative values to exponent
variables (integer domain).  Evaluation then scales the whole row by
2^k to clear denominators, so every comparison stays exact integer
arithmetic.  Divisibility of the unscaled value by d is equivalent to
divisibility of the scaled value by d * 2^k, which also enforces that
the unscaled value is an integer.
"""

from __future__ import annotations


def row_holds(row, point) -> bool:
    rel, d, const, li, lc, ei, ec, mx, my, mc, px, py, pc = row
    k = 0
    for i in ei:
        e = point[i]
        if e < 0 and -e > k:
            k = -e
    for i in py:
        e = point[i]
        if e < 0 and -e > k:
            k = -e
    v = const << k
    for i in range(len(li)):
        v += lc[i] * point[li[i]] << k
    for i in range(len(ei)):
        v += ec[i] << (point[ei[i]] + k)
    for i in range(len(mx)):
        e = point[my[i]]
        if e >= 0:
            v += mc[i] * (point[mx[i]] % (1 << e)) << k
        # remainder modulo 2^y is zero for y < 0
    for i in range(len(px)):
        e = point[py[i]]
        v += pc[i] * point[px[i]] << (e + k)
    if rel == 0:
        return v == 0
    if rel == 1:
        return v <= 0
    if rel == 2:
        return v < 0
    return v % (d << k) == 0


def check(cs, point) -> bool:
    for row in cs[1]:
        if not row_holds(row, point):
            return False
    return True


def first_sat(cs, lows, highs, limit):
    """First grid point satisfying every row, scanning lexicographically.

    Returns ("sat", point), ("none", None) when the grid is exhausted,
    or ("capped", None) after `limit` points.
    """
    n = cs[0]
    rows = cs[1]
    for i in range(n):
        if lows[i] > highs[i]:
            return ("none", None)
    point = list(lows)
    seen = 0
    while True:
        seen += 1
        if seen > limit:
            return ("capped", None)
        ok = True
        for row in rows:
            if not row_holds(row, point):
                ok = False
                break
        if ok:
            return ("sat", tuple(point))
        i = n - 1
        while i >= 0 and point[i] == highs[i]:
            point[i] = lows[i]
            i -= 1
        if i < 0:
            return ("none", None)
        point[i] += 1


def diff_on_grid(cs_a, cs_b, lows, highs, limit):
    """First grid point where the two systems disagree."""
    n = cs_a[0]
    for i in range(n):
        if lows[i] > highs[i]:
            return ("none", None)
    point = list(lows)
    seen = 0
    while True:
        seen += 1
        if seen > limit:
            return ("capped", None)
        a = True
        for row in cs_a[1]:
            if not row_holds(row, point):
                a = False
                break
        b = True
        for row in cs_b[1]:
            if not row_holds(row, point):
                b = False
                break
        if a != b:
            return ("diff", tuple(point))
        i = n - 1
        while i >= 0 and point[i] == highs[i]:
            point[i] = lows[i]
            i -= 1
        if i < 0:
            return ("none", None)
        point[i] += 1
