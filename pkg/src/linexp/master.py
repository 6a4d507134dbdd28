"""Satisfiability of linear-exponential systems over the naturals.

The solver lazily guesses an ordering of the exponentiated variables,
rewrites the system into a quotient system for the two largest ones,
and calls the leading-variable elimination until only a bottom
placeholder (whose power is pinned to 1) remains; the surviving ground
system is then evaluated at zero.  Every nondeterministic choice goes
through the branch engine, so exhaustive exploration decides
satisfiability and a satisfying branch is a replayable trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .branch import (
    ANY_SAT,
    Abort,
    BranchOutcome,
    BranchTrace,
    Chooser,
    ExploreResult,
    Limits,
    Sat,
    Unsat,
    explore,
    replay,
)
from .elimmaxvar import elim_max_var
from .feasible import conflicting_rows, impossible_row
from .terms import DIV, LE, LT, Constraint, FreshVars, System, Term, Var


@dataclass(frozen=True)
class LoopState:
    """Loop-head snapshot for invariant checks and audits."""

    phi: System
    head: Var
    pool: tuple
    aux: tuple
    iteration: int


@dataclass(frozen=True)
class ElimEvent:
    """One elimination step, as seen by observers."""

    iteration: int
    x: Var
    y: Var
    before: System
    after: System
    aux_before: int
    aux_after: int


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "exhausted"
    witness: Optional[BranchOutcome]
    leaves: int
    aborted: int
    reason: str = ""

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def trace(self) -> Optional[BranchTrace]:
        return self.witness.trace if self.witness else None


def ordered_vars(system: System) -> list:
    """Variables in first-occurrence order; vars() is an unordered set."""
    seen: dict = {}
    for c in system:
        t = c.term
        for v in t.linear:
            seen.setdefault(v)
        for v in t.exp:
            seen.setdefault(v)
        for p in (*t.mod, *t.prod):
            seen.setdefault(p[0])
            seen.setdefault(p[1])
    return list(seen)


def validate_input(system: System) -> None:
    for c in system:
        if c.rel == DIV:
            raise ValueError(f"divisibility row {c!r} not accepted as input")
        if c.term.prod:
            raise ValueError(f"quotient product in input row {c!r}")


def _exp_weight(phi: System) -> dict:
    w: dict = {}
    for c in phi:
        for v, b in c.term.exp.items():
            w[v] = w.get(v, 0) + abs(b)
    return w


def _ranked(pool: list, phi: System, heuristic: bool) -> list:
    # stable sort: exponent arguments tend to be small (v < 2^v), so try
    # them late; likely-large variables lead the chain, input order ties
    if not heuristic:
        return list(pool)
    w = _exp_weight(phi)
    return sorted(pool, key=lambda v: w.get(v, 0))


def _strip_mods_at(phi: System, x: Var) -> System:
    """(w mod 2^x) -> w for the leading x; everything is below 2^x."""
    mapping: dict = {}
    for c in phi:
        for p in c.term.mod:
            if p[1] == x and p not in mapping:
                mapping[p] = Term(linear={p[0]: 1})
    if not mapping:
        return phi
    return phi.map_terms(lambda t: t.substitute_mod(mapping))


def check_loop_head(state: LoopState, bottom: Var) -> None:
    allowed = {state.head, *state.pool, bottom}
    for c in state.phi:
        outside = set(c.term.exp) - allowed
        assert not outside, f"exponentiated variables outside the chain: {outside}"
        assert not c.term.prod, f"quotient product at loop head: {c!r}"
    for z in state.aux:
        bound = Constraint(Term(linear={z: 1}, exp={state.head: -1}), LT)
        assert bound in state.phi.constraints, f"missing {z} < 2^{state.head}"
    assert len(state.aux) <= state.iteration


def master_branch(
    ch: Chooser,
    system: System,
    *,
    base: int = 2,
    heuristic: bool = True,
    prune: bool = True,
    check: bool = False,
    observer: Optional[Callable[[ElimEvent], None]] = None,
):
    """Decide one branch of the ordering/elimination tree."""
    validate_input(system)
    phi = system
    pool = ordered_vars(system)
    fresh = FreshVars(phi.vars())
    bottom = fresh.make("exp", "o")
    if not pool:
        return Sat() if phi.satisfied({}) else Unsat("ground system is false")
    if prune and (any(impossible_row(c) for c in phi) or conflicting_rows(phi)):
        return Unsat("rows unsatisfiable over naturals")

    x = ch.guess("master", "order_0", _ranked(pool, phi, heuristic))
    pool.remove(x)
    aux: list = []
    it = 0
    while True:
        it += 1
        if check:
            check_loop_head(LoopState(phi, x, tuple(pool), tuple(aux), it - 1), bottom)
        before = phi
        if pool:
            y = ch.guess("master", f"order_{it}", _ranked(pool, phi, heuristic))
            pool.remove(y)
        else:
            y = bottom
        phi = _strip_mods_at(phi, x)

        # every aux variable (and x itself) is below 2^x, hence splits
        # into quotient times 2^y plus a remainder below 2^y
        zs = [x] + [z for z in aux if z in phi.vars()]
        quots: list = []
        rems: list = []
        xp0 = zp0 = None
        for z in zs:
            xp = fresh.make("quot", "q")
            zp = fresh.make("rem", "r")
            quots.append(xp)
            rems.append(zp)
            phi = phi.conjoin(
                Constraint(Term(linear={zp: -1}), LE),
                Constraint(Term(linear={zp: 1}, exp={y: -1}), LT),
            )
            mm: dict = {}
            for c in phi:
                for p in c.term.mod:
                    if p[0] == z and p not in mm:
                        mm[p] = (
                            Term(linear={zp: 1}) if p[1] == y else Term.mod_of(zp, p[1])
                        )
            if mm:
                phi = phi.map_terms(lambda t, mm=mm: t.substitute_mod(mm))
            rep = Term(linear={zp: 1}, prod={(xp, y): 1})
            phi = phi.map_terms(lambda t, z=z, rep=rep: t.substitute_linear({z: rep}))
            if z is x:
                xp0, zp0 = xp, zp

        phi = elim_max_var(
            ch,
            phi,
            x=x,
            y=y,
            xprime=xp0,
            zprime=zp0,
            quot_vars=quots,
            fresh=fresh,
            base=base,
            prune=prune,
            ground=y is bottom,
        )
        if prune and (any(impossible_row(c) for c in phi) or conflicting_rows(phi)):
            raise Abort("master: rows unsatisfiable over naturals")
        if observer is not None:
            observer(ElimEvent(it, x, y, before, phi, len(aux), len(rems)))
        aux = rems
        if y is bottom:
            break
        x = y

    point = {v: 0 for v in phi.vars()}
    return Sat() if phi.satisfied(point) else Unsat("final evaluation is false")


def _root(system, base, heuristic, prune, check, observer):
    return lambda ch: master_branch(
        ch,
        system,
        base=base,
        heuristic=heuristic,
        prune=prune,
        check=check,
        observer=observer,
    )


def _to_result(res: ExploreResult) -> SolveResult:
    status = "unsat" if res.status == "complete" else res.status
    return SolveResult(
        status=status,
        witness=res.witness,
        leaves=res.leaves,
        aborted=res.aborted_leaves,
        reason=res.exhausted_reason,
    )


def solve_nat(
    system: System,
    *,
    base: int = 2,
    limits: Limits = Limits(),
    heuristic: bool = True,
    prune: bool = True,
    check: bool = False,
    observer: Optional[Callable[[ElimEvent], None]] = None,
) -> SolveResult:
    """Decide a linear-exponential system over N."""
    res = explore(
        _root(system, base, heuristic, prune, check, observer),
        mode=ANY_SAT,
        limits=limits,
    )
    return _to_result(res)


def replay_nat(
    system: System,
    trace: BranchTrace,
    *,
    base: int = 2,
    heuristic: bool = True,
    prune: bool = True,
) -> BranchOutcome:
    """Re-run one recorded solver branch against its trace."""
    return replay(_root(system, base, heuristic, prune, False, None), trace)
