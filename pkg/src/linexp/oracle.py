"""Bounded-search reference oracle.

Searches a box ([0, bound]^n over naturals, [-bound, bound]^n over
integers) for a satisfying point by exact branch-and-prune: interval
propagation per constraint, gcd and small-modulus residue tests on the
equality rows, a rational relaxation at the root, and exhaustive
enumeration of small boxes through the evaluation kernel.

A returned assignment is always re-verified against the system, so SAT
answers are unconditional.  A "none" answer carries an `exhaustive`
flag: True means the whole box was excluded (root tests prove emptiness
of the box, sometimes of the whole domain); False means a search budget
ran out or exponent positions were capped, which is inconclusive.

Range arithmetic note: interval endpoints use float infinities as
sentinels when a power 2^x would not fit reasonable bignums.  Lower
endpoints are only ever under-approximated and uppers over-approximated,
so pruning stays sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import evalcore
from .terms import DIV, EQ, LE, LT, Constraint, System, Term, Var

INF = float("inf")

_EXP_CAP = 128  # beyond this, 2^x ranges widen to sentinels
EXP_SEARCH_CAP = 64  # exponent positions are searched within +/- this


class TooManyVariables(ValueError):
    """The oracle only searches systems with few variables."""


MAX_VARS = 8


@dataclass
class OracleResult:
    status: str  # "sat" | "none"
    assignment: Optional[dict]
    exhaustive: bool
    nodes: int
    bound: int

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


def _mul_range(c: int, lo, hi):
    return (c * lo, c * hi) if c >= 0 else (c * hi, c * lo)


def _cmp_pow2(p: int, q: int, s: int) -> int:
    """Sign of p/q - 2^s for positive integers p, q."""
    lhs, rhs = (p, q << s) if s >= 0 else (p << -s, q)
    return (lhs > rhs) - (lhs < rhs)


def _floor_log2(value) -> int:
    """Largest t with 2^t <= value, for positive (finite) value."""
    if isinstance(value, Fraction):
        p, q = value.numerator, value.denominator
    else:
        p, q = value, 1
    t = p.bit_length() - q.bit_length()
    while _cmp_pow2(p, q, t) < 0:
        t -= 1
    while _cmp_pow2(p, q, t + 1) >= 0:
        t += 1
    return t


def _is_pow2(value, t: int) -> bool:
    if isinstance(value, Fraction):
        p, q = value.numerator, value.denominator
    else:
        p, q = value, 1
    return _cmp_pow2(p, q, t) == 0


def _ceil_log2(value) -> int:
    t = _floor_log2(value)
    return t if _is_pow2(value, t) else t + 1


def _floor_div(a, b: int) -> int:
    if isinstance(a, Fraction):
        return math.floor(a / b)
    return a // b


def _ceil_div(a, b: int) -> int:
    if isinstance(a, Fraction):
        return math.ceil(a / b)
    return -((-a) // b)


class _Box:
    __slots__ = ("lo", "hi")

    def __init__(self, lo: list, hi: list):
        self.lo = lo
        self.hi = hi

    def copy(self) -> "_Box":
        return _Box(list(self.lo), list(self.hi))

    def volume_capped(self, cap: int) -> int:
        v = 1
        for l, h in zip(self.lo, self.hi):
            v *= h - l + 1
            if v > cap:
                return cap + 1
        return v


class _Searcher:
    def __init__(self, system: System, order: Sequence[Var], domain: str):
        self.system = system
        self.order = list(order)
        self.index = {v: i for i, v in enumerate(self.order)}
        self.domain = domain
        self.cs = evalcore.compile_system(system, self.order)
        self.nodes = 0

    # -- ranges ------------------------------------------------------------

    def _exp_bounds(self, i: int, box: _Box):
        """Sound (under, over) bounds on 2^x over x's interval."""
        lo, hi = box.lo[i], box.hi[i]
        if lo < 0:
            elo = 0
        elif lo > _EXP_CAP:
            elo = 1 << _EXP_CAP
        else:
            elo = 1 << lo
        if hi > _EXP_CAP:
            ehi = INF
        elif hi >= 0:
            ehi = 1 << hi
        else:
            ehi = Fraction(1, 1 << min(-hi, _EXP_CAP))
        return elo, ehi

    def term_range(self, t: Term, box: _Box, skip=None):
        """Sound (lo, hi) of the term over the box, skipping one atom."""
        lo = hi = t.const
        for v, a in t.linear.items():
            if skip == ("lin", v):
                continue
            i = self.index[v]
            l, h = _mul_range(a, box.lo[i], box.hi[i])
            lo += l
            hi += h
        for v, b in t.exp.items():
            if skip == ("exp", v):
                continue
            i = self.index[v]
            l, h = _mul_range(b, *self._exp_bounds(i, box))
            lo += l
            hi += h
        for (x, y), c in t.mod.items():
            iy = self.index[y]
            ey = box.hi[iy]
            if ey <= 0:
                mh = 0
            elif ey > _EXP_CAP:
                mh = INF
            else:
                mh = (1 << ey) - 1
            l, h = _mul_range(c, 0, mh)
            lo += l
            hi += h
        return lo, hi

    # -- propagation ---------------------------------------------------------

    def _tighten(self, box: _Box, i: int, lo=None, hi=None) -> bool:
        if lo is not None and lo > box.lo[i]:
            box.lo[i] = lo
        if hi is not None and hi < box.hi[i]:
            box.hi[i] = hi
        return box.lo[i] <= box.hi[i]

    def propagate(self, box: _Box) -> bool:
        for _ in range(40):
            before = (tuple(box.lo), tuple(box.hi))
            for c in self.system:
                if not self._prune_one(c, box):
                    return False
            if (tuple(box.lo), tuple(box.hi)) == before:
                return True
        return True

    def _prune_one(self, c: Constraint, box: _Box) -> bool:
        t = c.term
        lo, hi = self.term_range(t, box)
        if c.rel == EQ and (lo > 0 or hi < 0):
            return False
        if c.rel == LE and lo > 0:
            return False
        if c.rel == LT and lo >= 0:
            return False
        if c.rel == DIV:
            return self._prune_div(c, box, lo, hi)
        for v, a in t.linear.items():
            rl, rh = self.term_range(t, box, skip=("lin", v))
            i = self.index[v]
            if c.rel == EQ:
                # a*v in [-rh, -rl]
                if a > 0:
                    vlo = None if rh == INF else _ceil_div(-rh, a)
                    vhi = None if rl == -INF else _floor_div(-rl, a)
                else:
                    vlo = None if rl == -INF else _ceil_div(rl, -a)
                    vhi = None if rh == INF else _floor_div(rh, -a)
                if not self._tighten(box, i, vlo, vhi):
                    return False
            else:
                if rl == -INF:
                    continue
                # a*v <= -rl, strict for LT
                if a > 0:
                    vhi = _floor_div(-rl, a) if c.rel == LE else _ceil_div(-rl, a) - 1
                    if not self._tighten(box, i, None, vhi):
                        return False
                else:
                    vlo = _ceil_div(-rl, a) if c.rel == LE else _floor_div(-rl, a) + 1
                    if not self._tighten(box, i, vlo, None):
                        return False
        for v, b in t.exp.items():
            rl, rh = self.term_range(t, box, skip=("exp", v))
            i = self.index[v]
            ab = abs(b)
            if c.rel == EQ:
                # b*2^v in [-rh, -rl] => 2^v in [pl, ph] / ab
                pl, ph = (-rh, -rl) if b > 0 else (rl, rh)
                if ph != INF:
                    if ph <= 0:
                        return False
                    if not self._tighten(box, i, None, _floor_log2(Fraction(ph, ab))):
                        return False
                if pl != -INF and pl > 0:
                    if not self._tighten(box, i, _ceil_log2(Fraction(pl, ab)), None):
                        return False
            else:
                if rl == -INF:
                    continue
                strict = c.rel == LT
                if b > 0:
                    cap = -rl  # bound on b*2^v
                    if cap <= 0:
                        return False
                    ratio = Fraction(cap) / ab
                    vhi = _floor_log2(ratio)
                    if strict and _is_pow2(ratio, vhi):
                        vhi -= 1
                    if not self._tighten(box, i, None, vhi):
                        return False
                elif rl > 0:
                    # |b|*2^v >= rl (strictly above for LT)
                    ratio = Fraction(rl) / ab
                    vlo = _ceil_log2(ratio)
                    if strict and _is_pow2(ratio, vlo):
                        vlo += 1
                    if not self._tighten(box, i, vlo, None):
                        return False
        return True

    def _prune_div(self, c: Constraint, box: _Box, lo, hi) -> bool:
        if lo == hi:
            if isinstance(lo, Fraction):
                return False
            return lo % c.divisor == 0
        t = c.term
        g = 0
        const = t.const
        for v, a in t.linear.items():
            i = self.index[v]
            if box.lo[i] == box.hi[i]:
                const += a * box.lo[i]
            else:
                g = math.gcd(g, abs(a))
        for v, b in t.exp.items():
            i = self.index[v]
            if box.lo[i] != box.hi[i]:
                return True
            e = box.lo[i]
            if e < 0:
                return True
            const += b << e
        for (x, y), cc in t.mod.items():
            ix, iy = self.index[x], self.index[y]
            if box.lo[ix] != box.hi[ix] or box.lo[iy] != box.hi[iy]:
                return True
            e = box.lo[iy]
            const += cc * (box.lo[ix] % (1 << e)) if e >= 0 else 0
        g = math.gcd(g, c.divisor)
        return const % g == 0

    # -- residue tests ---------------------------------------------------------

    def residue_consistent(self, box: _Box) -> bool:
        """Joint solvability of =/| rows modulo small numbers over the box.

        Linear atoms range over all residues, powers 2^x over the
        residues 2^j (mod m) achievable for j in x's interval; distinct
        occurrences of the same power are treated independently, which
        only weakens the test.  A False return proves the box empty.
        """
        rows = []
        for c in self.system:
            if c.rel not in (EQ, DIV):
                continue
            t = c.term
            coeffs: dict = {}
            const = t.const
            exp_ranges = []
            ok = True
            for v, a in t.linear.items():
                i = self.index[v]
                if box.lo[i] == box.hi[i]:
                    const += a * box.lo[i]
                else:
                    coeffs[i] = coeffs.get(i, 0) + a
            for v, b in t.exp.items():
                i = self.index[v]
                lo, hi = box.lo[i], box.hi[i]
                if lo < 0:
                    ok = False  # fractional power: leave to exact search
                    break
                if lo == hi and lo <= _EXP_CAP:
                    const += b << lo
                else:
                    exp_ranges.append((lo, hi, b))
            if ok:
                for (x, y), cc in t.mod.items():
                    ix, iy = self.index[x], self.index[y]
                    if box.lo[ix] == box.hi[ix] and box.lo[iy] == box.hi[iy]:
                        e = box.lo[iy]
                        if e > _EXP_CAP:
                            ok = False
                            break
                        const += cc * (box.lo[ix] % (1 << e)) if e >= 0 else 0
                    else:
                        ok = False
                        break
            if not ok:
                continue
            rows.append((coeffs, exp_ranges, const, c.divisor if c.rel == DIV else 0))
        if not rows:
            return True
        idxs = sorted({i for coeffs, _, _, _ in rows for i in coeffs})
        for m in (2, 3, 4, 5, 7, 8, 9, 16):
            if m ** len(idxs) > 5000:
                continue
            if not _residues_work(rows, idxs, m):
                return False
        return True

    # -- rational relaxation -----------------------------------------------------

    def relaxation_feasible(self, box: _Box) -> bool:
        """Fourier-Motzkin over the rationals; False proves unsat.

        Powers 2^x relax to fresh rationals e_x with e_x > 0 and
        e_x >= x + 1 (valid over both domains); remainders relax to
        m >= 0, plus m <= w over naturals and m <= e_y - 1 when y is
        known non-negative.
        """
        rows: list = []  # (coeffs, const, strict) meaning sum + const <= 0
        syms: set = set()

        def add(coeffs: dict, const, strict: bool = False):
            coeffs = {s: Fraction(c) for s, c in coeffs.items() if c != 0}
            syms.update(coeffs)
            rows.append((coeffs, Fraction(const), strict))

        for c in self.system:
            if c.rel == DIV:
                continue
            t = c.term
            coeffs = {}
            for v, a in t.linear.items():
                coeffs[("v", v)] = coeffs.get(("v", v), 0) + a
            for v, b in t.exp.items():
                coeffs[("e", v)] = coeffs.get(("e", v), 0) + b
            for pair, cc in t.mod.items():
                coeffs[("m", pair)] = coeffs.get(("m", pair), 0) + cc
            if c.rel == EQ:
                add(coeffs, t.const)
                add({s: -a for s, a in coeffs.items()}, -t.const)
            else:
                add(coeffs, t.const, strict=(c.rel == LT))
        for s in [p for p in list(syms) if p[0] == "m"]:
            w, y = s[1]
            add({s: -1}, 0)
            if self.domain == "nat":
                add({s: 1, ("v", w): -1}, 0)
            if box.lo[self.index[y]] >= 0:
                add({s: 1, ("e", y): -1}, 1)
        for v in self.order:
            if ("e", v) in syms:
                add({("e", v): -1}, 0, strict=True)
                add({("e", v): -1, ("v", v): 1}, 1)
        for v in self.order:
            i = self.index[v]
            add({("v", v): 1}, -box.hi[i])
            add({("v", v): -1}, box.lo[i])
        elim = [("v", v) for v in self.order]
        elim += sorted(s for s in syms if s[0] == "e")
        elim += sorted(s for s in syms if s[0] == "m")
        for s in elim:
            pos, neg, rest = [], [], []
            for row in rows:
                a = row[0].get(s, 0)
                (pos if a > 0 else neg if a < 0 else rest).append(row)
            if len(pos) * len(neg) > 600 or len(rest) > 3000:
                return True  # giving up on the relaxation is inconclusive
            for pc, pconst, pstrict in pos:
                for nc, nconst, nstrict in neg:
                    ap, an = pc[s], -nc[s]
                    coeffs = {}
                    for k, vv in pc.items():
                        coeffs[k] = coeffs.get(k, 0) + an * vv
                    for k, vv in nc.items():
                        coeffs[k] = coeffs.get(k, 0) + ap * vv
                    coeffs = {k: vv for k, vv in coeffs.items() if vv != 0}
                    rest.append((coeffs, an * pconst + ap * nconst, pstrict or nstrict))
            rows = rest
        for coeffs, const, strict in rows:
            if not coeffs and (const > 0 or (strict and const == 0)):
                return False
        return True


def _pow2_residues(lo: int, hi: int, m: int) -> set:
    """{2^j mod m : lo <= j <= hi}, exact (the orbit of 2 mod m cycles)."""
    out = set()
    r = pow(2, lo, m)
    seen = set()
    j = lo
    while j <= hi and r not in seen:
        seen.add(r)
        out.add(r)
        r = (2 * r) % m
        j += 1
    return out


def _residues_work(rows, idxs, m: int) -> bool:
    def row_ok(coeffs, exp_ranges, const, d, assign) -> bool:
        mm = math.gcd(m, d) if d else m
        if mm == 1:
            return True
        v = (const + sum(a * assign[i] for i, a in coeffs.items())) % mm
        reach = {v}
        for lo, hi, b in exp_ranges:
            choices = _pow2_residues(lo, hi, mm)
            reach = {(r + b * p) % mm for r in reach for p in choices}
            if len(reach) == mm:
                return True
        return 0 in reach

    def rec(pos: int, assign: dict) -> bool:
        if pos == len(idxs):
            return all(row_ok(*row, assign) for row in rows)
        i = idxs[pos]
        return any(rec(pos + 1, {**assign, i: r}) for r in range(m))

    return rec(0, {})


def sat_bounded(
    system: System,
    domain: str = "nat",
    bound: int = 2**20,
    *,
    node_budget: int = 20000,
    leaf_cap: int = 60000,
) -> OracleResult:
    """Search the box for a satisfying point; see module docstring."""
    if domain not in ("nat", "int"):
        raise ValueError(f"unknown domain {domain!r}")
    for c in system:
        if c.term.prod:
            raise ValueError("oracle handles linear-exponential systems only")
    order = sorted(system.vars())
    if len(order) > MAX_VARS:
        raise TooManyVariables(f"{len(order)} variables (max {MAX_VARS})")
    if not order:
        ok = system.satisfied({})
        return OracleResult("sat" if ok else "none", {} if ok else None, True, 0, bound)

    s = _Searcher(system, order, domain)
    n = len(order)
    root = _Box([0 if domain == "nat" else -bound] * n, [bound] * n)
    exhaustive = True

    if not s.propagate(root):
        return OracleResult("none", None, True, 0, bound)
    if not s.residue_consistent(root):
        return OracleResult("none", None, True, 0, bound)
    if not s.relaxation_feasible(root):
        return OracleResult("none", None, True, 0, bound)

    # Exponent positions above EXP_SEARCH_CAP make point evaluation blow
    # up (values around 2^bound), so the search is restricted to the
    # capped region; cutting a nonempty region costs exhaustiveness.
    clamped = False
    exp_pos = set()
    for c in system:
        exp_pos.update(c.term.exp)
        exp_pos.update(y for (_x, y) in c.term.mod)
    for v in exp_pos:
        i = s.index[v]
        if root.hi[i] > EXP_SEARCH_CAP:
            root.hi[i] = EXP_SEARCH_CAP
            clamped = True
        if root.lo[i] < -EXP_SEARCH_CAP:
            root.lo[i] = -EXP_SEARCH_CAP
            clamped = True
    if clamped:
        exhaustive = False
        if any(l > h for l, h in zip(root.lo, root.hi)) or not s.propagate(root):
            return OracleResult("none", None, False, 0, bound)

    stack = [(root, 0)]
    while stack:
        if s.nodes >= node_budget:
            exhaustive = False
            break
        s.nodes += 1
        box, depth = stack.pop()
        probes = [box.lo, [min(max(l, 0), h) for l, h in zip(box.lo, box.hi)]]
        if all(h <= 4096 for h in box.hi):
            probes.append(box.hi)
        for pt in probes:
            if evalcore.check(s.cs, list(pt)):
                assignment = dict(zip(order, pt))
                assert system.satisfied(assignment)
                return OracleResult("sat", assignment, True, s.nodes, bound)
        if box.volume_capped(leaf_cap) <= leaf_cap:
            status, pt = evalcore.first_sat(s.cs, box.lo, box.hi, leaf_cap + 1)
            if status == "sat":
                assignment = dict(zip(order, pt))
                assert system.satisfied(assignment)
                return OracleResult("sat", assignment, True, s.nodes, bound)
            continue
        if depth <= 2 and not s.residue_consistent(box):
            continue
        widths = [h - l for l, h in zip(box.lo, box.hi)]
        i = max(range(n), key=lambda j: widths[j])
        mid = (box.lo[i] + box.hi[i]) // 2
        left, right = box.copy(), box.copy()
        left.hi[i] = mid
        right.lo[i] = mid + 1
        for sub in (right, left):  # lower half explored first (LIFO)
            if s.propagate(sub):
                stack.append((sub, depth + 1))
    return OracleResult("none", None, exhaustive, s.nodes, bound)


def equiv_bounded(
    sys_a: System,
    sys_b: System,
    var_order: Sequence[Var],
    lows,
    highs,
) -> Optional[tuple]:
    """First grid point where the systems' truth values differ, or None."""
    return evalcore.grid_equivalent(sys_a, sys_b, var_order, lows, highs)
