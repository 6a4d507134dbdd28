import random

import pytest

from linexp.branch import COLLECT_ALL, Value, explore
from linexp.numtheory import discrete_log, mult_order
from linexp.primitive import NotPrimitive, PrimitiveSystem, solve_primitive, threshold_C
from linexp.terms import DIV, EQ, LE, LT, Constraint, System, Term, Var

u, v = Var("u"), Var("v")


def prim(*rows):
    return PrimitiveSystem(u, v, tuple(rows))


def decompose(p, base=2):
    res = explore(lambda ch: Value(solve_primitive(ch, p, base=base)), COLLECT_ALL)
    assert res.status == "complete"
    pairs = [o.payload for o in res.outcomes if o.kind == "value"]
    return pairs, res.aborted_leaves


def union_at(pairs, uval, vval):
    return any(
        chi.satisfied({u: uval}) and gamma.satisfied({v: vval})
        for chi, gamma in pairs
    )


def check_grid(p, pairs, base=2, extra=10):
    hi = threshold_C(p, base) + extra
    for uu in range(hi + 1):
        for vv in range(uu + 1):  # side condition u >= v >= 0
            assert union_at(pairs, uu, vv) == p.holds_at(uu, vv, base), (uu, vv)


def test_threshold_frozen():
    assert threshold_C(prim((1, 1, 1, LE, 0))) == 7
    assert threshold_C(prim((0, 1, 0, DIV, 8))) == 3
    assert threshold_C(prim((0, 1, 0, DIV, 60)), base=6) == 3
    assert threshold_C(prim((1, 1, 1, LE, 0)), base=6) == 5


def test_star_branch_frozen():
    p = prim((-1, 1, 0, LE, 0), (1, 0, -2, DIV, 3))
    assert threshold_C(p) == 5
    pairs, aborted = decompose(p)
    # c in [0,5), then residues r in {0,1,2}; r=0 has no discrete log
    assert len(pairs) == 7 and aborted == 1
    chi, gamma = pairs[-1]  # the r=2 branch
    assert chi == System([
        Constraint(Term(linear={u: -1}, const=5), LE),
        Constraint(Term(linear={u: 1}, const=-1), DIV, 2),
    ])
    assert gamma == System([Constraint(Term(const=0), DIV, 3)])
    # the r=1 branch leaves an unsatisfiable divisibility 3 | -1
    assert not pairs[-2][1].satisfied({v: 0})
    check_grid(p, pairs, extra=8)


def test_equality_only_small_branches():
    p = prim((1, 0, -8, EQ, 0))
    assert threshold_C(p) == 11
    pairs, aborted = decompose(p)
    assert len(pairs) == 11 and aborted == 1  # the star branch aborts
    for chi, _gamma in pairs:
        (cn,) = chi
        assert cn.rel == EQ and cn.term.linear == {u: 1}
    check_grid(p, pairs)


def test_degenerate_divisibility_star():
    p = prim((-1, 1, 0, LE, 0))
    pairs, aborted = decompose(p)
    assert aborted == 0
    chi, gamma = pairs[-1]
    assert chi == System([
        Constraint(Term(linear={u: -1}, const=5), LE),
        Constraint(Term(linear={u: 1}), DIV, 1),
    ])
    assert len(gamma) == 0
    check_grid(p, pairs)


def test_progression_claim():
    # solutions of d | 2^u - 2^n r form the progression r' + lambda d'
    for d in range(1, 62, 2):
        dp = mult_order(2, d)
        for n in (0, 2):
            admissible = 0
            for r in range(d):
                rp = discrete_log(2, (2**n * r) % d, d)
                if rp is None:
                    continue
                admissible += 1
                for uu in range(n, n + 4 * dp + 1):
                    assert ((2**uu - 2**n * r) % d == 0) == ((uu - rp) % dp == 0)
            assert admissible == (dp if d > 1 else 1)


def _random_prim(rng):
    rows = []
    for _ in range(rng.randint(1, 4)):
        a, b, c = (rng.randint(-3, 3) for _ in range(3))
        shape = rng.random()
        if shape < 0.3:
            rows.append((a, b, c, DIV, rng.choice([2, 3, 4, 5, 6])))
        else:
            rows.append((a, b, c, rng.choice([EQ, LE, LE, LT]), 0))
    return prim(*rows)


def test_output_grammar():
    rng = random.Random(5)
    for _ in range(30):
        p = _random_prim(rng)
        pairs, _ = decompose(p)
        C = threshold_C(p)
        for chi, gamma in pairs:
            assert chi.vars() <= {u} and gamma.vars() <= {v}
            if len(chi) == 1:
                (cn,) = chi
                assert cn.rel == EQ and cn.term.linear == {u: 1}
                assert 0 <= -cn.term.const < C
            else:
                lo, dv = chi
                assert lo.rel == LE and lo.term == Term(linear={u: -1}, const=C)
                assert dv.rel == DIV and dv.term.linear == {u: 1}
                assert C >= 3 and 0 <= -dv.term.const < dv.divisor


def test_random_decomposition_grid():
    rng = random.Random(14)
    for _ in range(25):
        p = _random_prim(rng)
        pairs, _ = decompose(p)
        check_grid(p, pairs)


def test_base_three_decomposition():
    p = prim((-1, 1, 0, LE, 0), (1, 0, -1, DIV, 2))
    pairs, aborted = decompose(p, base=3)
    assert aborted == 1  # r=0: powers of 3 are odd
    chi, gamma = pairs[-1]
    assert chi == System([
        Constraint(Term(linear={u: -1}, const=5), LE),
        Constraint(Term(linear={u: 1}), DIV, 1),
    ])
    assert gamma == System([Constraint(Term(const=0), DIV, 2)])
    check_grid(p, pairs, base=3)


def test_base_three_random_grid():
    rng = random.Random(3)
    for _ in range(15):
        p = _random_prim(rng)
        pairs, _ = decompose(p, base=3)
        check_grid(p, pairs, base=3, extra=6)


def test_from_system_roundtrip_and_validation():
    sys_ = System([
        Constraint(Term(exp={u: -1}, linear={v: 1}), LE),
        Constraint(Term(exp={u: 1}, const=-2), DIV, 3),
    ])
    p = PrimitiveSystem.from_system(sys_, u, v)
    assert p.rows == ((-1, 1, 0, LE, 0), (1, 0, -2, DIV, 3))
    assert p.to_system() == sys_

    with pytest.raises(NotPrimitive):
        PrimitiveSystem.from_system(
            System([Constraint(Term(linear={u: 1}), EQ)]), u, v
        )
    with pytest.raises(NotPrimitive):
        PrimitiveSystem.from_system(
            System([Constraint(Term(mod={(v, u): 1}), EQ)]), u, v
        )
