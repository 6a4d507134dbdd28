"""Elimination of the leading exponentiated variable.

The input system may mention the leading variable x only inside 2^x,
next to products x'_j * 2^y against the second variable y, and through
a delayed substitution x = x' * 2^y + z' (x' quotient, z' remainder,
0 <= z' < 2^y part of the system).  Each constraint splits into a most
significant part, handled as a linear constraint over an alias u for
2^(x-y), and a least significant part rho, bracketed between guessed
multiples of 2^y.  The alias is then removed by Gaussian elimination
plus the monadic decomposition of the primitive module, and finally the
quotient variable x' itself is replaced by a guessed value or residue
window.  Branch outputs mention neither x nor any quotient variable;
their disjunction, conjoined with the ordering, is equivalent to the
existential projection.
"""

from __future__ import annotations

from math import lcm
from typing import Sequence

from .branch import Abort, Chooser
from .feasible import RowBounds, impossible_row
from .gaussqe import gaussian_qe
from .primitive import PrimitiveSystem, solve_primitive
from .terms import (
    DIV,
    EQ,
    LE,
    LT,
    Constraint,
    FreshVars,
    System,
    Term,
    Var,
    normalize_divisibilities,
)


class QuotientShape(ValueError):
    """The system is not a quotient system for the given variables."""


def decompose_row(term: Term, x: Var, y: Var):
    """Split term into a*2^x + (f(quotients) + f0)*2^y + rho."""
    if term.linear.get(x, 0):
        raise QuotientShape(f"{x} occurs linearly")
    if any(x in p for p in term.mod) or any(x in p for p in term.prod):
        raise QuotientShape(f"{x} occurs in a remainder or product")
    f = {}
    for (xi, w), cc in term.prod.items():
        if w != y:
            raise QuotientShape(f"product {xi}*2^{w} not aligned with {y}")
        f[xi] = cc
    rho = Term(
        term.linear,
        {v: b for v, b in term.exp.items() if v not in (x, y)},
        term.mod,
        {},
        term.const,
    )
    return term.exp.get(x, 0), f, term.exp.get(y, 0), rho


def feasible_window(rho: Term) -> range:
    """Values r for which (r-1)*2^y < rho <= r*2^y can hold at all.

    Within the ordering every atom of rho (remainder variables, smaller
    exponentials, remainders of powers, linear variables below y) lies
    in [0, 2^y], so rho/2^y is confined by the signed coefficient sums
    plus the constant's contribution at 2^y = 1.  This is a subset of
    the coarse [-|rho|_1, |rho|_1] window and skipping the rest only
    drops branches whose bracketing rows could never hold.
    """
    coeffs = [*rho.linear.values(), *rho.exp.values(), *rho.mod.values()]
    pos = sum(c for c in coeffs if c > 0)
    neg = sum(-c for c in coeffs if c < 0)
    k = rho.const
    return range(-neg + min(k, 0), pos + max(k, 0) + 1)


def _pair(rho: Term, r: int, y: Var) -> list:
    # the bracketing rows (r-1)*2^y < rho <= r*2^y
    return [
        Constraint(Term.exp_of(y, r - 1) - rho, LT),
        Constraint(rho - Term.exp_of(y, r), LE),
    ]


def _foreclosed(rb: RowBounds, new: Sequence[Constraint]) -> bool:
    """New rows that close off every completion of the branch output."""
    return any(impossible_row(c) for c in new) or rb.any_conflict(new)


def split_inequality(a, f, f0, rho, rel, r, u, y):
    """Most significant part of a (non-strict) comparison, given the
    guessed multiple r with (r-1)*2^y < rho <= r*2^y."""
    left = Constraint(Term(linear={u: a, **f}, const=f0 + r), rel)
    right = [Constraint(Term.exp_of(y, r) - rho, EQ)] if rel == EQ else []
    return left, right


def split_divisibility(a, f, f0, rho, d, r, u, y):
    """Shift the least significant part by a guessed r in [1, mod]."""
    left = Constraint(Term(linear={u: a, **f}, const=f0 - r), DIV, d)
    right = Constraint(rho + Term.exp_of(y, r), DIV, d)
    return left, right


def _exists_single(system: System, xv: Var) -> bool:
    """Exact satisfiability of a one-variable linear system over Z.

    Equalities pin the value; otherwise interval bounds plus one period
    of the divisibilities cover every case.
    """
    lo = hi = None
    pinned = None
    period = 1
    for cn in system:
        t = cn.term
        assert t.is_linear() and set(t.linear) <= {xv}, f"not single-var: {cn!r}"
        a = t.linear.get(xv, 0)
        if a == 0:
            if not cn.satisfied({}):
                return False
            continue
        if cn.rel == EQ:
            if pinned is None:
                pinned = (a, t.const)
        elif cn.rel == DIV:
            period = lcm(period, cn.divisor)
        else:
            c = t.const + (1 if cn.rel == LT else 0)
            if a > 0:
                b = (-c) // a
                hi = b if hi is None else min(hi, b)
            else:
                b = -((-c) // (-a))
                lo = b if lo is None else max(lo, b)
    if pinned is not None:
        a, c = pinned
        if c % a:
            return False
        return system.satisfied({xv: (-c) // a})
    if lo is None:
        lo = (hi if hi is not None else period - 1) - period + 1
    if hi is None or hi - lo >= period:
        hi = lo + period - 1
    return any(system.satisfied({xv: t}) for t in range(lo, hi + 1))


def elim_max_var(
    ch: Chooser,
    phi: System,
    *,
    x: Var,
    y: Var,
    xprime: Var,
    zprime: Var,
    quot_vars: Sequence[Var],
    fresh: FreshVars,
    base: int = 2,
    prune: bool = True,
    ground: bool = False,
) -> System:
    """One branch of the elimination of x and all quotient variables.

    With prune (default) the guess domains skip choices that provably
    end in an abort or an unsatisfiable output: window values outside
    feasible_window and quotient values inconsistent with the monadic
    decomposition.  The set of satisfiable branch outputs is unchanged.

    With ground (and prune), y is the bottom of the ordering and the
    output is only ever read at the all-zero point, so every guessed
    row is pinned to the one choice that holds there; other choices
    would make the output false at that point anyway.
    """
    u = fresh.make("exp", "u")
    m = phi.mod()
    delta: dict[Term, int] = {}
    gamma_rows: list[Constraint] = []
    psi: list[Constraint] = []
    ground = ground and prune

    def at_zero(t: Term) -> int:
        return int(t.evaluate({v: 0 for v in t.vars()}))

    rb = RowBounds()

    def emit(*rows: Constraint) -> None:
        psi.extend(rows)
        if prune:
            for c in rows:
                if impossible_row(c) or rb.add(c):
                    raise Abort("elimmaxvar: foreclosed row")

    quots = set(quot_vars)
    for cn in phi:
        t = cn.term
        stray = quots & (
            set(t.linear) | set(t.exp) | {v for p in t.mod for v in p}
        )
        if stray:
            raise QuotientShape(f"quotient variables {stray} outside a product")
        a, f, f0, rho = decompose_row(t, x, y)
        if set(f) - quots:
            raise QuotientShape(f"unexpected product variables {set(f) - quots}")
        if a == 0 and not f:
            emit(cn)
            continue
        if cn.rel == DIV:
            d = cn.divisor
            if prune:
                # r and r + d emit the same rows modulo d: one class each
                dom = range(1, d + 1)
                if ground:
                    g0 = (-at_zero(rho)) % d
                    dom = [g0 if g0 >= 1 else d]
            else:
                dom = range(1, m + 1)
            r = ch.guess("elimmaxvar", "div_shift", dom)
            left, right = split_divisibility(a, f, f0, rho, d, r, u, y)
            gamma_rows.append(left)
            emit(right)
            continue
        if rho not in delta:
            if prune:
                dom = [
                    r
                    for r in feasible_window(rho)
                    if not _foreclosed(rb, _pair(rho, r, y))
                ]
                if ground:
                    r0 = at_zero(rho)
                    dom = [r for r in dom if r == r0]
            else:
                n1 = rho.one_norm()
                dom = range(-n1, n1 + 1)
            r = ch.guess("elimmaxvar", "lsp_window", dom)
            emit(*_pair(rho, r, y))
            delta[rho] = r
        r = delta[rho]
        rel = cn.rel
        if rel == LT:
            opts = [EQ, LT]
            if prune:
                opts = [
                    tt
                    for tt in opts
                    if not _foreclosed(rb, [Constraint(rho - Term.exp_of(y, r), tt)])
                ]
                if ground:
                    v0 = at_zero(rho) - r
                    opts = [tt for tt in opts if (v0 == 0 if tt == EQ else v0 < 0)]
            tight = ch.guess("elimmaxvar", "tight", opts)
            emit(Constraint(rho - Term.exp_of(y, r), tight))
            rel = LE
            if tight == EQ:
                r += 1
        left, right = split_inequality(a, f, f0, rho, rel, r, u, y)
        gamma_rows.append(left)
        emit(*right)

    gamma_rows += [Constraint(Term(linear={q: -1}), LE) for q in quot_vars]
    gamma = gaussian_qe(
        ch, System(gamma_rows), [q for q in quot_vars if q != xprime], fresh=fresh
    )
    sub = {u: Term.exp_of(u)}
    gamma = normalize_divisibilities(gamma.map_terms(lambda t: t.substitute_linear(sub)))
    if prune:
        # rows free of the alias must admit a quotient value on their own
        ufree = [
            c for c in gamma if u not in c.term.linear and u not in c.term.exp
        ]
        if not _exists_single(System(ufree), xprime):
            raise Abort("elimmaxvar: no admissible quotient value")
    chi, gamma = solve_primitive(
        ch, PrimitiveSystem.from_system(gamma, u, xprime), base=base
    )

    # chi talks about u = x - y = x' * 2^y + z' - y; the substitution is
    # folded directly into the guessed constraints below
    rows = list(chi)
    gamma2 = list(gamma)
    if len(rows) == 1:
        (cn,) = rows
        assert cn.rel == EQ and cn.term.linear == {u: 1}, f"bad shape {chi!r}"
        cap = -cn.term.const
        dom = range(cap + 1)
        if prune:
            dom = [b for b in dom if gamma.satisfied({xprime: b})]
        if ground:
            # the output row reads b - cap = 0 at the all-zero point
            dom = [b for b in dom if b == cap]
        b = ch.guess("elimmaxvar", "quot_value", dom)
        gamma2.append(Constraint(Term(linear={xprime: 1}, const=-b), EQ))
        emit(Constraint(Term(linear={zprime: 1, y: -1}, exp={y: b}, const=-cap), EQ))
    else:
        low, dv = rows
        assert low.rel == LE and low.term.linear == {u: -1}, f"bad shape {chi!r}"
        assert dv.rel == DIV and dv.term.linear == {u: 1}, f"bad shape {chi!r}"
        cap = low.term.const
        d1 = dv.divisor
        r1 = (-dv.term.const) % d1
        dom = [(bb, gg) for bb in range(cap + 1) for gg in range(1, d1 + 1)]
        if ground:
            # at the all-zero point the output rows force b = cap and
            # the one residue class g = r1
            dom = [
                (bb, gg)
                for bb, gg in dom
                if bb == cap and gg == (r1 if r1 >= 1 else d1)
            ]
        if prune:
            dom = [
                (bb, gg)
                for bb, gg in dom
                if _exists_single(
                    System(
                        [
                            *gamma,
                            Constraint(Term(linear={xprime: -1}, const=bb), LE),
                            Constraint(Term(linear={xprime: 1}, const=-gg), DIV, d1),
                        ]
                    ),
                    xprime,
                )
            ]
        b, g = ch.guess("elimmaxvar", "quot_window", dom)
        gamma2.append(Constraint(Term(linear={xprime: -1}, const=b), LE))
        gamma2.append(Constraint(Term(linear={xprime: 1}, const=-g), DIV, d1))
        emit(
            Constraint(
                Term(linear={zprime: 1, y: -1}, exp={y: b - 1}, const=-cap), LT
            ),
            Constraint(Term(linear={zprime: -1, y: 1}, exp={y: -b}, const=cap), LE),
            Constraint(
                Term(linear={zprime: 1, y: -1}, exp={y: g}, const=-r1), DIV, d1
            ),
        )

    if not _exists_single(System(gamma2), xprime):
        raise Abort("elimmaxvar: no admissible quotient value")

    out = System(psi)
    leaked = out.vars() & ({x, u, *quot_vars})
    assert not leaked, f"leaked eliminated variables {leaked}"
    return out
