"""Monadic decomposition of single-exponential two-variable systems.

Input rows all have the shape a*k^u + b*v + c ~ 0 where ~ is =, <=, <
or divisibility.  Under the side condition u >= v >= 0 the procedure
splits the system, branch by branch, into a pair (chi(u), gamma(v)) of
purely linear one-variable systems whose disjunction over all branches
is equivalent to the input.  chi is either u = c for a small constant,
or an arithmetic progression u >= C and d' | u - r'.

Everything is exact integer arithmetic; the threshold C is computed
with an integral ceiling logarithm, never floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from .branch import Abort, Chooser
from .numtheory import base_params, ceil_log, discrete_log, mult_order
from .terms import DIV, EQ, Constraint, LE, System, Term, Var


class NotPrimitive(ValueError):
    """A row is not of the a*k^u + b*v + c shape."""


@dataclass(frozen=True)
class PrimitiveSystem:
    """Rows (a, b, c, rel, divisor) standing for a*k^u + b*v + c rel 0."""

    u: Var
    v: Var
    rows: tuple

    @staticmethod
    def from_system(system: System, u: Var, v: Var) -> "PrimitiveSystem":
        rows = []
        for cn in system:
            t = cn.term
            if t.mod or t.prod or set(t.linear) - {v} or set(t.exp) - {u}:
                raise NotPrimitive(f"not primitive in ({u}, {v}): {cn!r}")
            rows.append(
                (t.exp.get(u, 0), t.linear.get(v, 0), t.const, cn.rel, cn.divisor)
            )
        return PrimitiveSystem(u, v, tuple(rows))

    def to_system(self) -> System:
        return System(
            Constraint(Term(linear={self.v: b}, exp={self.u: a}, const=c), rel, d)
            for a, b, c, rel, d in self.rows
        )

    def mod(self) -> int:
        return lcm(*(r[4] for r in self.rows if r[3] == DIV), 1)

    def holds_at(self, uval: int, vval: int, base: int = 2) -> bool:
        """Direct evaluation; works for any base, unlike Term evaluation."""
        for a, b, c, rel, d in self.rows:
            val = a * base**uval + b * vval + c
            if rel == EQ:
                ok = val == 0
            elif rel == DIV:
                ok = val % d == 0
            else:
                ok = val <= 0 if rel == LE else val < 0
            if not ok:
                return False
        return True


def threshold_C(prim: PrimitiveSystem, base: int = 2) -> int:
    """Least tested exponent: above it, every (in)equality with an
    exponential term has a fixed truth value whenever u >= v >= 0."""
    _, n = base_params(prim.mod(), base)
    best = max(3, n)
    for a, b, c, rel, _ in prim.rows:
        if rel != DIV and a:
            best = max(best, 3 + 2 * ceil_log(abs(b) + abs(c) + 1, abs(a), base))
    return best


def solve_primitive(
    ch: Chooser, prim: PrimitiveSystem, *, base: int = 2
) -> tuple[System, System]:
    """One branch of the decomposition; (chi, gamma) over u and v only."""
    u, v = prim.u, prim.v
    ineqs = [r for r in prim.rows if r[3] != DIV and r[0]]
    m = prim.mod()
    d, _n = base_params(m, base)
    C = threshold_C(prim, base)
    c = ch.guess("primitive", "exp_value", [*range(C), "*"])
    if c != "*":
        k_c = base**c
        gamma = System(
            Constraint(Term(linear={v: b}, const=cc + a * k_c), rel, dv)
            for a, b, cc, rel, dv in prim.rows
        )
        return System([Constraint(Term(linear={u: 1}, const=-c), EQ)]), gamma
    # u >= C: the exponential dwarfs b*v + c, so an equality can no
    # longer hold and an inequality follows the sign of a
    if any(rel == EQ or a > 0 for a, _b, _c, rel, _d in ineqs):
        raise Abort("primitive: (in)equality cannot hold above the threshold")
    r = ch.guess("primitive", "residue", range(d))
    target = (m // d) * r % d
    r_prime = discrete_log(base, target, d)
    if r_prime is None:
        raise Abort(f"primitive: {base}^u never hits residue {target} mod {d}")
    d_prime = mult_order(base, d)
    chi = System([
        Constraint(Term(linear={u: -1}, const=C), LE),
        Constraint(Term(linear={u: 1}, const=-r_prime), DIV, d_prime),
    ])
    sub = (m // d) * r
    gamma = System(
        Constraint(Term(linear={v: b}, const=cc + a * sub), rel, dv)
        for a, b, cc, rel, dv in prim.rows
        if rel == DIV or not a
    )
    return chi, gamma
