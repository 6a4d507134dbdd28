"""Cheap infeasibility certificates for constraint rows over N.

Every check here is sound but incomplete: a True verdict means no
valuation over the naturals can satisfy the rows, False promises
nothing.  The solver uses them to abort doomed branches early; they
never remove a satisfiable branch, so exhaustive exploration stays
complete.
"""

from .terms import DIV, EQ, LE, LT, Constraint, System, Term


def _single_var_impossible(t: Term, rel: str) -> bool:
    """Exact decision for a*2^v + d*v + k rel 0 having no solution in N."""
    (v,) = set(t.linear) | set(t.exp)
    a = t.exp.get(v, 0)
    d = t.linear.get(v, 0)
    k = t.const
    cap = 4 * (abs(d) + abs(k) + 4).bit_length() + 8
    for n in range(cap + 1):
        val = a * (1 << n) + d * n + k
        if (val == 0) if rel == EQ else (val <= 0) if rel == LE else (val < 0):
            return False
        if a != 0:
            # once 2^n outruns the linear part, sign(val) = sign(a) forever
            if (1 << n) > abs(d) * n + abs(k) and (1 << n) > abs(d):
                return True if rel == EQ else a > 0
        elif d > 0:
            if val > 0:
                return True
        elif d < 0:
            if rel != EQ:
                return False
            return not (val >= 0 and val % d == 0)
        else:
            return True  # ground row, already failed at n = 0
    return False


def impossible_row(c: Constraint) -> bool:
    """Row that no valuation over N can satisfy.

    Interval bounds from the atom domains: variables, remainders and
    products are >= 0, powers are >= 1; nothing is bounded above.
    Single-variable rows without mod or product atoms are decided exactly.
    """
    t = c.term
    rest = [*t.linear.values(), *t.mod.values(), *t.prod.values()]
    if c.rel == DIV:
        return not rest and not t.exp and t.const % c.divisor != 0
    exps = list(t.exp.values())
    neg_any = any(v < 0 for v in rest) or any(b < 0 for b in exps)
    pos_any = any(v > 0 for v in rest) or any(b > 0 for b in exps)
    lo = None if neg_any else t.const + sum(b for b in exps if b > 0)
    hi = None if pos_any else t.const + sum(b for b in exps if b < 0)
    if c.rel == EQ:
        if (lo is not None and lo > 0) or (hi is not None and hi < 0):
            return True
    elif c.rel == LE:
        if lo is not None and lo > 0:
            return True
    elif lo is not None and lo >= 0:  # LT
        return True
    if not t.mod and not t.prod and len(set(t.linear) | set(t.exp)) == 1:
        return _single_var_impossible(t, c.rel)
    return False


def _part_keys(t: Term) -> tuple:
    pos: list = []
    neg: list = []
    for v, cc in t.linear.items():
        pos.append(("l", v.name, v.kind, cc))
        neg.append(("l", v.name, v.kind, -cc))
    for v, cc in t.exp.items():
        pos.append(("e", v.name, v.kind, cc))
        neg.append(("e", v.name, v.kind, -cc))
    for (v, w), cc in t.mod.items():
        pos.append(("m", v.name, v.kind, w.name, w.kind, cc))
        neg.append(("m", v.name, v.kind, w.name, w.kind, -cc))
    for (v, w), cc in t.prod.items():
        pos.append(("p", v.name, v.kind, w.name, w.kind, cc))
        neg.append(("p", v.name, v.kind, w.name, w.kind, -cc))
    pos.sort()
    neg.sort()
    return tuple(pos), tuple(neg)


class RowBounds:
    """Interval bounds on shared integer-valued variable parts.

    Rows s*V + k rel 0 over the same part V turn into bounds on V; a
    group whose lower bound exceeds its upper bound, e.g. V = 0 next to
    V < 0, cannot be satisfied.  Rows accumulate with add; any_conflict
    probes candidate rows without touching the accumulated state.
    """

    __slots__ = ("bounds", "dead")

    def __init__(self, rows=()):
        self.bounds: dict = {}
        self.dead = False
        for c in rows:
            self.add(c)

    @staticmethod
    def _row_bound(c: Constraint):
        if c.rel == DIV:
            return None, None, None
        t = c.term
        pos, neg = _part_keys(t)
        if not pos:
            return None, None, None  # ground row, impossible_row territory
        k = t.const
        if pos <= neg:
            ub = -k - 1 if c.rel == LT else -k
            lb = -k if c.rel == EQ else None
            return pos, lb, ub
        lb = k + 1 if c.rel == LT else k
        ub = k if c.rel == EQ else None
        return neg, lb, ub

    def add(self, c: Constraint) -> bool:
        """Fold one row in; True once any group interval is empty."""
        key, lb, ub = self._row_bound(c)
        if key is None:
            return self.dead
        ent = self.bounds.setdefault(key, [None, None])
        if lb is not None and (ent[0] is None or lb > ent[0]):
            ent[0] = lb
        if ub is not None and (ent[1] is None or ub < ent[1]):
            ent[1] = ub
        if ent[0] is not None and ent[1] is not None and ent[0] > ent[1]:
            self.dead = True
        return self.dead

    def any_conflict(self, rows) -> bool:
        """Would adding these rows close some group interval?"""
        if self.dead:
            return True
        probe: dict = {}
        for c in rows:
            key, lb, ub = self._row_bound(c)
            if key is None:
                continue
            ent = probe.get(key)
            if ent is None:
                ent = probe[key] = list(self.bounds.get(key, (None, None)))
            if lb is not None and (ent[0] is None or lb > ent[0]):
                ent[0] = lb
            if ub is not None and (ent[1] is None or ub < ent[1]):
                ent[1] = ub
            if ent[0] is not None and ent[1] is not None and ent[0] > ent[1]:
                return True
        return False


def conflicting_rows(phi: System) -> bool:
    """Two rows whose terms differ by a constant force an empty interval."""
    return RowBounds(phi).dead
