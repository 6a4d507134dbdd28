"""Grid evaluation: compiled kernel when available, pure Python otherwise.

compile_system flattens a System into index-based rows against a fixed
variable order.  Box scans route to the compiled kernel only when an
exact worst-case bound shows every intermediate fits in int64;
otherwise the pure bigint kernel runs.  Set LINEXP_PURE=1 to force the
pure kernel.
"""

from __future__ import annotations

import os
from typing import Optional, Sequence

from . import _evalcore_py as _py
from .terms import DIV, EQ, LE, LT, System, Var

if os.environ.get("LINEXP_PURE"):
    _impl = _py
    IMPL = "pure"
else:
    try:
        from . import _evalcore as _impl  # type: ignore[attr-defined]

        IMPL = "compiled"
    except ImportError:  # pragma: no cover - build environment dependent
        _impl = _py
        IMPL = "pure"

_REL_CODE = {EQ: 0, LE: 1, LT: 2, DIV: 3}


def compile_system(system: System, var_order: Sequence[Var]):
    """Flatten to (nvars, rows) with variable indices from var_order."""
    index = {v: i for i, v in enumerate(var_order)}
    rows = []
    for c in system:
        t = c.term
        li, lc = [], []
        for v, a in sorted(t.linear.items()):
            li.append(index[v])
            lc.append(a)
        ei, ec = [], []
        for v, b in sorted(t.exp.items()):
            ei.append(index[v])
            ec.append(b)
        mx, my, mc = [], [], []
        for (x, y), cc in sorted(t.mod.items()):
            mx.append(index[x])
            my.append(index[y])
            mc.append(cc)
        px, py, pc = [], [], []
        for (x, y), e in sorted(t.prod.items()):
            px.append(index[x])
            py.append(index[y])
            pc.append(e)
        rows.append(
            (
                _REL_CODE[c.rel],
                c.divisor,
                t.const,
                tuple(li),
                tuple(lc),
                tuple(ei),
                tuple(ec),
                tuple(mx),
                tuple(my),
                tuple(mc),
                tuple(px),
                tuple(py),
                tuple(pc),
            )
        )
    return (len(var_order), tuple(rows))


_INT64_CAP = 1 << 62


def _box_safe(cs, lows, highs) -> bool:
    """Exact worst-case magnitude bound for every row over the box."""
    n, rows = cs
    for i in range(n):
        if abs(lows[i]) >= _INT64_CAP or abs(highs[i]) >= _INT64_CAP:
            return False
    for row in rows:
        rel, d, const, li, lc, ei, ec, mx, my, mc, px, py, pc = row
        k = 0
        for i in ei:
            if lows[i] < 0:
                k = max(k, -lows[i])
        for i in py:
            if lows[i] < 0:
                k = max(k, -lows[i])
        if k > 60:
            return False
        bound = abs(const) << k
        for i in range(len(li)):
            bound += abs(lc[i]) * max(abs(lows[li[i]]), abs(highs[li[i]])) << k
        for i in range(len(ei)):
            e = highs[ei[i]] + k
            if e > 60:
                return False
            bound += abs(ec[i]) << max(e, 0)
        for i in range(len(mx)):
            e = highs[my[i]]
            if e > 60:
                return False
            bound += abs(mc[i]) << (max(e, 0) + k)
        for i in range(len(px)):
            e = highs[py[i]] + k
            if e > 60:
                return False
            bound += (
                abs(pc[i]) * max(abs(lows[px[i]]), abs(highs[px[i]]))
            ) << max(e, 0)
        if rel == 3:
            bound = max(bound, d << k)
        if bound >= _INT64_CAP:
            return False
    return True


def check(cs, point) -> bool:
    """Point check, always exact (pure kernel)."""
    return _py.check(cs, point)


def first_sat(cs, lows, highs, limit: int):
    lows, highs = list(lows), list(highs)
    if _impl is not _py and _box_safe(cs, lows, highs):
        return _impl.first_sat(cs, lows, highs, limit)
    return _py.first_sat(cs, lows, highs, limit)


def diff_on_grid(cs_a, cs_b, lows, highs, limit: int):
    lows, highs = list(lows), list(highs)
    if (
        _impl is not _py
        and _box_safe(cs_a, lows, highs)
        and _box_safe(cs_b, lows, highs)
    ):
        return _impl.diff_on_grid(cs_a, cs_b, lows, highs, limit)
    return _py.diff_on_grid(cs_a, cs_b, lows, highs, limit)


def grid_equivalent(
    sys_a: System,
    sys_b: System,
    var_order: Sequence[Var],
    lows,
    highs,
    limit: int = 10**9,
) -> Optional[tuple]:
    """First differing point of two systems over a box, or None."""
    cs_a = compile_system(sys_a, var_order)
    cs_b = compile_system(sys_b, var_order)
    status, point = diff_on_grid(cs_a, cs_b, lows, highs, limit)
    if status == "capped":
        raise RuntimeError("grid comparison exceeded its point budget")
    return point
