"""Leading-variable elimination: splits, branch unions, hygiene."""

import itertools

import pytest

from linexp.branch import COLLECT_ALL, Chooser, Limits, Value, explore
from linexp.elimmaxvar import (
    QuotientShape,
    _exists_single,
    decompose_row,
    elim_max_var,
    split_divisibility,
    split_inequality,
)
from linexp.terms import (
    DIV,
    EQ,
    LE,
    LT,
    Constraint,
    FreshVars,
    System,
    Term,
    Var,
)

X = Var("x")
Y = Var("y")
W = Var("w")
XP = Var("xq", kind="quot")
Q2 = Var("q2", kind="quot")
ZP = Var("zr", kind="rem")
U = Var("u", kind="exp")


def zbounds():
    # 0 <= z' < 2^y, carried along by the delayed substitution
    return [
        Constraint(Term(linear={ZP: -1}), LE),
        Constraint(Term(linear={ZP: 1}, exp={Y: -1}), LT),
    ]


def eliminate(phi, quots=(XP,), max_branches=200_000):
    def root(ch):
        fresh = FreshVars(phi.vars())
        return Value(
            elim_max_var(
                ch,
                phi,
                x=X,
                y=Y,
                xprime=XP,
                zprime=ZP,
                quot_vars=list(quots),
                fresh=fresh,
            )
        )

    res = explore(root, mode=COLLECT_ALL, limits=Limits(max_branches=max_branches))
    assert res.status == "complete", res.exhausted_reason
    return [o.payload for o in res.outcomes if o.kind == "value"]


def rhs_holds(phi, pt, quots=(XP,), bound=48):
    """Existential witness scan for x and the quotient variables.

    x = xq * 2^y + zr; every test row is eventually monotone or periodic
    in x, so quotient values up to 48 decide the matter on these grids.
    """
    others = [q for q in quots if q != XP]
    for xpv in range(bound + 1):
        for combo in itertools.product(range(bound + 1), repeat=len(others)):
            full = dict(pt)
            full[XP] = xpv
            full.update(zip(others, combo))
            xval = xpv * 2 ** pt[Y] + pt[ZP]
            if xval < pt[Y]:
                continue
            full[X] = xval
            if phi.satisfied(full):
                return True
    return False


def grid(extra=(), lo=0, hi=5):
    for yv in range(4):
        for zv in range(8):
            base = {Y: yv, ZP: zv}
            if not extra:
                yield base
                continue
            for combo in itertools.product(range(lo, hi + 1), repeat=len(extra)):
                pt = dict(base)
                pt.update(zip(extra, combo))
                yield pt


def check_union(phi, outs, quots=(XP,), extra=()):
    for pt in grid(extra):
        got = any(s.satisfied(pt) for s in outs)
        want = rhs_holds(phi, pt, quots)
        assert got == want, (pt, got, want)


def test_decompose_row():
    t = Term(
        linear={ZP: 1, W: 2},
        exp={X: 2, Y: 5},
        mod={(W, Y): 4},
        prod={(XP, Y): 3},
        const=7,
    )
    a, f, f0, rho = decompose_row(t, X, Y)
    assert (a, f, f0) == (2, {XP: 3}, 5)
    assert rho == Term(linear={ZP: 1, W: 2}, mod={(W, Y): 4}, const=7)

    with pytest.raises(QuotientShape):
        decompose_row(Term(linear={X: 1}), X, Y)
    with pytest.raises(QuotientShape):
        decompose_row(Term(mod={(X, Y): 1}), X, Y)
    with pytest.raises(QuotientShape):
        decompose_row(Term(prod={(XP, W): 1}), X, Y)


def test_split_ops_frozen():
    rho = Term(linear={ZP: 1})
    left, right = split_divisibility(1, {}, 0, rho, 3, 1, U, Y)
    assert left == Constraint(Term(linear={U: 1}, const=-1), DIV, 3)
    assert right == Constraint(Term(linear={ZP: 1}, exp={Y: 1}), DIV, 3)

    left, right = split_inequality(2, {XP: 1}, -1, rho, EQ, 2, U, Y)
    assert left == Constraint(Term(linear={U: 2, XP: 1}, const=1), EQ)
    assert right == [Constraint(Term(linear={ZP: -1}, exp={Y: 2}), EQ)]

    left, right = split_inequality(1, {}, 0, rho, LE, -1, U, Y)
    assert left == Constraint(Term(linear={U: 1}, const=-1), LE)
    assert right == []


def test_side_condition():
    # within the ordering, the alias u = x - y dominates the quotient
    for yv in range(5):
        for xpv in range(9):
            for zv in range(2**yv):
                xval = xpv * 2**yv + zv
                if xval >= yv:
                    assert xval - yv >= xpv


def test_exists_single_unit():
    rows = lambda *cs: System(cs)
    assert _exists_single(rows(Constraint(Term(linear={X: 2}, const=-6), EQ)), X)
    assert not _exists_single(
        rows(
            Constraint(Term(linear={X: 1}, const=-3), EQ),
            Constraint(Term(linear={X: 1}), DIV, 2),
        ),
        X,
    )
    assert _exists_single(
        rows(
            Constraint(Term(linear={X: -1}), LE),
            Constraint(Term(linear={X: 1}, const=-5), LE),
            Constraint(Term(linear={X: 1}, const=-3), DIV, 7),
        ),
        X,
    )
    assert not _exists_single(
        rows(
            Constraint(Term(linear={X: -1}, const=6), LE),
            Constraint(Term(linear={X: 1}, const=-8), LE),
            Constraint(Term(linear={X: 1}, const=-4), DIV, 5),
        ),
        X,
    )
    # no bounds at all: one period suffices
    assert _exists_single(rows(Constraint(Term(linear={X: 1}, const=-2), DIV, 4)), X)
    assert _exists_single(rows(Constraint(Term(linear={X: 1}, const=3), LE)), X)
    assert not _exists_single(rows(Constraint(Term(const=1), EQ)), X)


def test_power_equation():
    # x' * 2^y + z' = 2^y, i.e. x = 2^y after the delayed substitution
    phi = System(
        [
            Constraint(Term(linear={ZP: 1}, exp={Y: -1}, prod={(XP, Y): 1}), EQ),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    for pt in grid():
        got = any(s.satisfied(pt) for s in outs)
        assert got == (pt[ZP] == 0), pt
        assert got == rhs_holds(phi, pt), pt


def test_pass_through_rows():
    passthrough = Constraint(Term(linear={Y: 1, ZP: -1}, const=-1), LE)
    phi = System(
        [
            Constraint(Term(linear={ZP: 1}, exp={Y: -1}, prod={(XP, Y): 1}), EQ),
            passthrough,
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    assert outs
    for s in outs:
        assert passthrough in s.constraints
    check_union(phi, outs)


def test_memo_shared_lsp():
    # both rows carry the same least significant part z', so each branch
    # emits exactly one bounding pair
    phi = System(
        [
            Constraint(Term(linear={ZP: 1}, exp={X: 1, Y: -2}), LE),
            Constraint(Term(linear={ZP: 1}, exp={X: -1, Y: 1}), LE),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    assert outs
    for s in outs:
        assert len(s) in (5, 7), s
    check_union(phi, outs)


def test_divisibility_split():
    phi = System(
        [
            Constraint(Term(linear={ZP: 1}, exp={X: 1}), DIV, 3),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    check_union(phi, outs)


def test_strict_inequality():
    phi = System(
        [
            Constraint(Term(linear={ZP: -1}, exp={X: 1, Y: -3}), LT),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    check_union(phi, outs)


def test_equality_with_remainder_lsp():
    # 2^x = 2^y + z'
    phi = System(
        [
            Constraint(Term(linear={ZP: -1}, exp={X: 1, Y: -1}), EQ),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    check_union(phi, outs)


def test_bounded_extra_variable():
    # 2^x = 2^y + w with 0 <= w < 2^y kept below the second variable
    phi = System(
        [
            Constraint(Term(linear={W: -1}, exp={X: 1, Y: -1}), EQ),
            Constraint(Term(linear={W: -1}), LE),
            Constraint(Term(linear={W: 1}, exp={Y: -1}), LT),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    check_union(phi, outs, extra=(W,))


def test_second_quotient_eliminated():
    # 2^x = q2 * 2^y and q2 <= 2: only x = y and x = y + 1 survive
    phi = System(
        [
            Constraint(Term(exp={X: -1}, prod={(Q2, Y): 1}), EQ),
            Constraint(Term(exp={Y: -2}, prod={(Q2, Y): 1}), LE),
            *zbounds(),
        ]
    )
    outs = eliminate(phi, quots=(XP, Q2))
    for s in outs:
        assert Q2 not in s.vars()
    check_union(phi, outs, quots=(XP, Q2))


def test_output_hygiene():
    phi = System(
        [
            Constraint(Term(linear={ZP: -1}, exp={X: 1, Y: -1}), EQ),
            *zbounds(),
        ]
    )
    outs = eliminate(phi)
    assert outs
    zb = zbounds()
    for s in outs:
        assert s.vars() <= {Y, ZP}
        assert all(ZP not in c.term.exp for c in s)
        assert zb[0] in s.constraints and zb[1] in s.constraints


def test_contract_errors():
    fresh = lambda phi: FreshVars(phi.vars())
    kw = dict(x=X, y=Y, xprime=XP, zprime=ZP, quot_vars=[XP], fresh=None)

    bad = System([Constraint(Term(linear={XP: 1}), LE)])
    with pytest.raises(QuotientShape):
        elim_max_var(Chooser(), bad, **{**kw, "fresh": fresh(bad)})

    bad = System([Constraint(Term(linear={X: 1}, exp={X: 1}), LE)])
    with pytest.raises(QuotientShape):
        elim_max_var(Chooser(), bad, **{**kw, "fresh": fresh(bad)})

    bad = System([Constraint(Term(prod={(W, Y): 1}), LE)])
    with pytest.raises(QuotientShape):
        elim_max_var(Chooser(), bad, **{**kw, "fresh": fresh(bad)})
