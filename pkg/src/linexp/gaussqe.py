"""Nondeterministic Gauss-Jordan elimination over the integers.

Eliminates variables from systems of linear equalities, non-strict
inequalities and divisibilities.  Strict inequalities are accepted and
rewritten (t < 0 becomes t + 1 <= 0) on entry.  The disjunction of the
outputs over all branches is equivalent to the existential projection
of the input.

Inequalities become equalities with fresh natural slack variables.  At
each pivot the chosen equality's slack (if still symbolic) gets a
guessed value, recorded but substituted only at the end; intermediate
divisions follow the fraction-free elimination scheme, so every
division is exact.  A non-exact division indicates a bug, never a
failing branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Iterable, Optional, Sequence

from .branch import Chooser
from .terms import DIV, EQ, LE, LT, Constraint, FreshVars, System, Term, Var


class NonLinearInput(ValueError):
    """Input contained powers, remainders or quotient products."""


class InexactDivision(ArithmeticError):
    """A fraction-free elimination step left a remainder (a bug)."""


@dataclass
class Row:
    term: Term
    rel: str
    divisor: int = 0
    origin_eq: bool = False  # came from an input equality


@dataclass
class GaussState:
    rows: list[Row]
    slack_vars: set
    assignments: list[tuple[Var, int]] = field(default_factory=list)
    assigned: set = field(default_factory=set)
    lead: int = 1


def _mod(rows: Iterable[Row]) -> int:
    return lcm(*(r.divisor for r in rows if r.rel == DIV), 1)


def slackify(system: System, fresh: FreshVars) -> GaussState:
    """Turn every inequality into an equality with a fresh slack."""
    rows = []
    slack_vars = {v for v in system.vars() if v.kind == "slack"}
    for c in system:
        if not c.term.is_linear():
            raise NonLinearInput(f"nonlinear constraint {c!r}")
        if c.rel == EQ:
            rows.append(Row(c.term, EQ, 0, True))
        elif c.rel == DIV:
            rows.append(Row(c.term, DIV, c.divisor))
        else:
            y = fresh.make("slack", "y")
            slack_vars.add(y)
            bump = 1 if c.rel == LT else 0
            rows.append(Row(c.term + Term.var(y) + Term.constant(bump), EQ))
    return GaussState(rows, slack_vars)


def run_iteration(
    ch: Chooser,
    state: GaussState,
    x: Var,
    *,
    symmetric: bool = False,
    prune_pivots: bool = True,
    eager_slack: bool = False,
) -> bool:
    """One elimination step for x; False when no equality contains x."""
    rows = state.rows
    cands = [i for i, r in enumerate(rows) if r.rel == EQ and r.term.linear.get(x, 0)]
    if not cands:
        return False
    originals = [i for i in cands if rows[i].origin_eq]
    if originals:
        # a solution satisfies an input equality exactly, so pivoting on
        # one is always complete; keep the rest only on request
        pool = originals if prune_pivots else originals + [
            i for i in cands if not rows[i].origin_eq
        ]
    else:
        pool = cands
    pivot = rows[ch.guess("gaussqe", "pick_eq", pool)]
    a = pivot.term.linear[x]
    tau = pivot.term - Term.var(x, a)
    prevlead, state.lead = state.lead, a

    pending = [
        y for y in tau.linear if y in state.slack_vars and y not in state.assigned
    ]
    assert len(pending) <= 1, f"slack uniqueness violated: {pending}"
    if pending:
        y = pending[0]
        hi = abs(a) * _mod(rows) - 1
        v = ch.guess("gaussqe", "slack_v", range(-hi if symmetric else 0, hi + 1))
        state.assignments.append((y, v))
        state.assigned.add(y)
        if eager_slack:
            sub = {y: Term.constant(v)}
            for r in rows:
                r.term = r.term.substitute_linear(sub)
            tau = tau.substitute_linear(sub)

    num = -tau
    try:
        out = []
        for r in rows:
            if r is pivot:
                continue  # becomes 0 = 0
            c = r.term.linear.get(x, 0)
            rest = r.term - Term.var(x, c)
            # every row is scaled by a (divisibilities on both sides) so
            # that the division below stays uniform across the system
            term = (num.scale(c) + rest.scale(a)).divide_exact(prevlead)
            if r.rel == DIV:
                d = r.divisor * abs(a)
                if d % abs(prevlead):
                    raise InexactDivision(f"divisor {d} not divisible by {prevlead}")
                out.append(Row(term, DIV, d // abs(prevlead), r.origin_eq))
            else:
                out.append(Row(term, EQ, 0, r.origin_eq))
    except ValueError as e:
        raise InexactDivision(str(e)) from e
    out.append(Row(tau, DIV, abs(a)))
    state.rows = out
    return True


def drop_remaining_slack(state: GaussState) -> None:
    """Each leftover symbolic slack y sits in one equality; over y >= 0
    that equality relaxes to a single inequality."""
    out = []
    for r in state.rows:
        ys = (
            [v for v in r.term.linear if v in state.slack_vars and v not in state.assigned]
            if r.rel == EQ
            else []
        )
        if not ys:
            out.append(r)
            continue
        assert len(ys) == 1, f"slack uniqueness violated: {ys}"
        y = ys[0]
        c = r.term.linear[y]
        eta = r.term - Term.var(y, c)
        out.append(Row(eta if c > 0 else -eta, LE))
    state.rows = out


def apply_assignments(state: GaussState) -> None:
    sub = {y: Term.constant(v) for y, v in state.assignments}
    if sub:
        state.rows = [
            Row(r.term.substitute_linear(sub), r.rel, r.divisor, r.origin_eq)
            for r in state.rows
        ]


def guess_residues(ch: Chooser, state: GaussState, xs: Sequence[Var]) -> None:
    """Eliminated variables may survive in divisibilities; any solution
    fixes them modulo the system's modulus, so a residue suffices."""
    for x in xs:
        hosts = [r for r in state.rows if r.term.contains(x)]
        if not hosts:
            continue
        assert all(r.rel == DIV for r in hosts), f"{x} survived outside divisibilities"
        r_val = ch.guess("gaussqe", "residue", range(_mod(state.rows)))
        sub = {x: Term.constant(r_val)}
        state.rows = [
            Row(r.term.substitute_linear(sub), r.rel, r.divisor, r.origin_eq)
            for r in state.rows
        ]


def gaussian_qe(
    ch: Chooser,
    system: System,
    xs: Sequence[Var],
    *,
    fresh: Optional[FreshVars] = None,
    symmetric: bool = False,
    prune_pivots: bool = True,
    eager_slack: bool = False,
) -> System:
    """Eliminate xs from a linear system along one branch."""
    state = slackify(system, fresh or FreshVars(system.vars()))
    for x in xs:
        run_iteration(
            ch,
            state,
            x,
            symmetric=symmetric,
            prune_pivots=prune_pivots,
            eager_slack=eager_slack,
        )
    drop_remaining_slack(state)
    apply_assignments(state)
    guess_residues(ch, state, xs)
    out = System(Constraint(r.term, r.rel, r.divisor) for r in state.rows)
    leftover = out.vars() & (set(xs) | state.slack_vars)
    assert not leftover, f"leftover variables {leftover}"
    return out
