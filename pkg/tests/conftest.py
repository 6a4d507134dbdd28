"""Shared corpus generators and reference deciders for the test suite."""

import itertools
import math
import random
from fractions import Fraction

from linexp.terms import DIV, EQ, LE, LT, Constraint, System, Term, Var

INF = float("inf")


def bound_witnesses(system, elim_vars, point):
    """Exact per-variable bounds on witnesses at a fixed free-var point.

    Fixpoint interval propagation over the equality and inequality rows:
    any witness satisfies them, so each variable's range follows from the
    ranges of the others.  Returns {var: (lo, hi)} once every elim var is
    bounded on both sides, else None.
    """
    iv = {v: (point[v], point[v]) for v in point}
    for v in elim_vars:
        iv[v] = (-INF, INF)

    def rest_range(t, skip):
        lo = hi = t.const
        for w, b in t.linear.items():
            if w is skip:
                continue
            wl, wh = iv[w]
            if wl == -INF or wh == INF:
                return None
            lo += min(b * wl, b * wh)
            hi += max(b * wl, b * wh)
        return lo, hi

    rows = [(c.term, c.rel) for c in system if c.rel in (EQ, LE, LT)]
    for _ in range(4 * len(elim_vars) + 8):
        changed = False
        for t, rel in rows:
            for v in t.linear:
                if v not in elim_vars:
                    continue
                a = t.linear[v]
                rr = rest_range(t, v)
                if rr is None:
                    continue
                lo, hi = rr
                bump = 1 if rel == LT else 0
                nl, nh = iv[v]
                if rel == EQ:
                    # a*v = -rest
                    c1, c2 = sorted((Fraction(-lo, a), Fraction(-hi, a)))
                    nl = max(nl, math.ceil(c1))
                    nh = min(nh, math.floor(c2))
                elif a > 0:
                    # v <= (-rest - bump) / a
                    nh = min(nh, math.floor(Fraction(-lo - bump, a)))
                else:
                    nl = max(nl, math.ceil(Fraction(-hi - bump, a)))
                if (nl, nh) != iv[v]:
                    iv[v] = (nl, nh)
                    changed = True
        if not changed:
            break
    out = {}
    for v in elim_vars:
        lo, hi = iv[v]
        if lo == -INF or hi == INF:
            return None
        out[v] = (int(lo), int(hi))
    return out


def exists_witness(system, elim_vars, point, cap=20000):
    """Exact truth of the existential projection at `point`.

    Relies on the corpus guarantee that every elim var is boxed by the
    rows themselves, so the scan below is a complete decision.  A var
    pinned by an equality whose other vars are already fixed is
    back-solved instead of scanned.
    """
    bounds = bound_witnesses(system, elim_vars, point)
    assert bounds is not None, "corpus promised bounded witnesses"
    eqs = [c.term for c in system if c.rel == EQ]

    def rec(i, assign):
        if i == len(elim_vars):
            return system.satisfied(assign)
        v = elim_vars[i]
        lo, hi = bounds[v]
        cands = None
        for t in eqs:
            a = t.linear.get(v, 0)
            if a and all(w in assign for w in t.linear if w is not v):
                rest = t.const + sum(
                    b * assign[w] for w, b in t.linear.items() if w is not v
                )
                cands = [] if rest % a else [-(rest // a)]
                break
        if cands is None:
            assert hi - lo + 1 <= cap, f"witness box too large for {v}"
            cands = range(lo, hi + 1)
        return any(rec(i + 1, {**assign, v: c}) for c in cands if lo <= c <= hi)

    return rec(0, dict(point))


def make_linear_system(rng: random.Random, elim_vars, free_vars, *, coeff=4,
                       divisors=(2, 3, 4), extra_rows=(1, 3)):
    """Random linear system with a finite witness box for every elim var.

    Most elim vars are pinned by a triangular equality whose own
    coefficient (2..4) dominates the unit coefficients on the other
    variables; at most one var is instead boxed by a pair of
    inequalities.  Extra rows of any shape come on top.
    """
    allv = list(elim_vars) + list(free_vars)
    boxed = rng.randrange(len(elim_vars) + 2)  # usually out of range: all pinned
    rows = []
    for i, v in enumerate(elim_vars):
        a = rng.choice([-4, -3, -2, 2, 3, 4])
        others = {}
        for w in list(elim_vars[:i]) + list(free_vars):
            if rng.random() < 0.6:
                others[w] = rng.choice([-1, 1])
        d = rng.randint(-coeff, coeff)
        if i == boxed:
            b = rng.randint(2, 8)
            rows.append(Constraint(Term(linear={v: a, **others}, const=d - b), LE))
            rows.append(Constraint(Term(linear={v: -a, **others}, const=d - b), LE))
        else:
            rows.append(Constraint(Term(linear={v: a, **others}, const=d), EQ))
    for _ in range(rng.randint(*extra_rows)):
        lin = {w: rng.randint(-coeff, coeff) for w in allv if rng.random() < 0.7}
        t = Term(linear=lin, const=rng.randint(-coeff, coeff))
        kind = rng.random()
        if kind < 0.4:
            rows.append(Constraint(t, LE))
        elif kind < 0.5:
            rows.append(Constraint(t, LT))
        elif kind < 0.7:
            rows.append(Constraint(t, EQ))
        else:
            rows.append(Constraint(t, DIV, rng.choice(divisors)))
    rng.shuffle(rows)
    return System(rows)


_var_pool = [Var(n) for n in ("p", "q", "r", "u", "v")]


def fresh_linear_instance(rng: random.Random, max_elim=3, max_free=2):
    n_elim = rng.randint(1, max_elim)
    n_free = rng.randint(1, max_free)
    elim = _var_pool[:n_elim]
    free = _var_pool[3 : 3 + n_free]
    return make_linear_system(rng, elim, free), elim, free


def grid_points(vars_, lo, hi):
    for combo in itertools.product(range(lo, hi + 1), repeat=len(vars_)):
        yield dict(zip(vars_, combo))
