"""Exhaustive exploration of nondeterministic guesses.

Algorithms take a Chooser and call guess() at each branch point.  The
explorer enumerates the guess tree depth-first in lexicographic order
by re-running the algorithm with a forced choice prefix, so algorithm
code stays ordinary pure Python: no coroutines, no state snapshots.

A leaf is Sat, Unsat or Value (collected output), or an abort raised
via Chooser.abort when a branch's side conditions fail.  Resource
limits end exploration with an "exhausted" status, which is never
conflated with unsat: unsat requires the whole tree to be visited.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

ANY_SAT = "any_sat"
COLLECT_ALL = "collect_all"


class TraceMismatch(Exception):
    """A replayed trace diverged from the recorded run."""


class Abort(Exception):
    """Internal control flow: a branch failed its side conditions."""

    def __init__(self, reason: str = ""):
        super().__init__(reason)
        self.reason = reason


@dataclass
class Sat:
    payload: Any = None


@dataclass
class Unsat:
    reason: str = ""


@dataclass
class Value:
    payload: Any = None


@dataclass(frozen=True)
class GuessPoint:
    algo: str
    label: str
    value: str
    index: int
    arity: int


def serialize_value(v) -> str:
    if isinstance(v, str):
        s = v
    elif isinstance(v, (tuple, list)):
        s = ",".join(serialize_value(x) for x in v)
    else:
        s = str(v)
    if "\t" in s or "\n" in s:
        raise ValueError(f"guess value {s!r} not trace-safe")
    return s


@dataclass(frozen=True)
class BranchTrace:
    steps: tuple[GuessPoint, ...] = ()

    def serialize(self) -> str:
        return "".join(f"{p.algo}\t{p.label}\t{p.value}\n" for p in self.steps)

    @staticmethod
    def parse(text: str) -> "BranchTrace":
        steps = []
        for line in text.splitlines():
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise TraceMismatch(f"malformed trace line {line!r}")
            algo, label, value = parts
            steps.append(GuessPoint(algo, label, value, -1, -1))
        return BranchTrace(tuple(steps))


@dataclass(frozen=True)
class BranchOutcome:
    kind: str  # "sat" | "unsat" | "abort" | "value"
    payload: Any
    trace: BranchTrace


@dataclass(frozen=True)
class Limits:
    max_branches: Optional[int] = None
    max_depth: Optional[int] = None
    time_budget: Optional[float] = None


class _OverLimit(Exception):
    def __init__(self, what: str):
        super().__init__(what)
        self.what = what


class Chooser:
    """Hands out one choice per guess point along a single branch."""

    __slots__ = ("path", "_forced", "_pos", "_max_depth", "_deadline")

    def __init__(self, forced: Sequence[int] = (), max_depth=None, deadline=None):
        self.path: list[GuessPoint] = []
        self._forced = forced
        self._pos = 0
        self._max_depth = max_depth
        self._deadline = deadline

    def guess(self, algo: str, label: str, choices: Sequence):
        n = len(choices)
        if n == 0:
            raise Abort(f"{algo}/{label}: empty choice set")
        if self._max_depth is not None and len(self.path) >= self._max_depth:
            raise _OverLimit("max_depth")
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise _OverLimit("time_budget")
        if self._pos < len(self._forced):
            idx = self._forced[self._pos]
            if idx >= n:
                raise TraceMismatch(
                    f"{algo}/{label}: forced index {idx} out of {n} choices"
                )
        else:
            idx = 0
        self._pos += 1
        chosen = choices[idx]
        self.path.append(GuessPoint(algo, label, serialize_value(chosen), idx, n))
        return chosen

    def abort(self, reason: str = ""):
        raise Abort(reason)


class _ReplayChooser(Chooser):
    """Follows a recorded trace, verifying every step."""

    __slots__ = ("_steps",)

    def __init__(self, steps: Sequence[GuessPoint]):
        super().__init__()
        self._steps = steps

    def guess(self, algo: str, label: str, choices: Sequence):
        pos = len(self.path)
        if pos >= len(self._steps):
            raise TraceMismatch(f"trace ended before guess {algo}/{label}")
        step = self._steps[pos]
        if (step.algo, step.label) != (algo, label):
            raise TraceMismatch(
                f"expected {step.algo}/{step.label}, reached {algo}/{label}"
            )
        for idx, choice in enumerate(choices):
            if serialize_value(choice) == step.value:
                self.path.append(
                    GuessPoint(algo, label, step.value, idx, len(choices))
                )
                return choice
        raise TraceMismatch(f"{algo}/{label}: value {step.value!r} not offered")


@dataclass
class ExploreResult:
    status: str  # "sat" | "unsat" | "exhausted" | "complete"
    witness: Optional[BranchOutcome] = None
    outcomes: list = field(default_factory=list)
    leaves: int = 0
    aborted_leaves: int = 0
    exhausted_reason: str = ""

    @property
    def trace(self) -> Optional[BranchTrace]:
        return self.witness.trace if self.witness else None


def _classify(leaf, trace: BranchTrace) -> BranchOutcome:
    if isinstance(leaf, Sat):
        return BranchOutcome("sat", leaf.payload, trace)
    if isinstance(leaf, Unsat):
        return BranchOutcome("unsat", leaf.reason, trace)
    if isinstance(leaf, Value):
        return BranchOutcome("value", leaf.payload, trace)
    raise TypeError(f"branch root returned {leaf!r}, expected Sat/Unsat/Value")


def explore(
    root: Callable[[Chooser], Any],
    mode: str = ANY_SAT,
    limits: Limits = Limits(),
) -> ExploreResult:
    """Run root over every branch.

    In ANY_SAT mode stops at the first Sat leaf; visiting the whole tree
    without one yields "unsat".  In COLLECT_ALL mode gathers every leaf
    outcome and finishes with status "complete".  Hitting a limit stops
    with "exhausted" (plus the witness if a Sat leaf was already found).
    """
    deadline = (
        time.monotonic() + limits.time_budget
        if limits.time_budget is not None
        else None
    )
    result = ExploreResult(status="unsat")
    forced: list[int] = []
    truncated = False
    while True:
        if limits.max_branches is not None and result.leaves >= limits.max_branches:
            truncated, result.exhausted_reason = True, "max_branches"
            break
        if deadline is not None and time.monotonic() > deadline:
            truncated, result.exhausted_reason = True, "time_budget"
            break
        ch = Chooser(forced, max_depth=limits.max_depth, deadline=deadline)
        outcome = None
        try:
            leaf = root(ch)
        except Abort as e:
            outcome = BranchOutcome("abort", e.reason, BranchTrace(tuple(ch.path)))
        except _OverLimit as e:
            truncated, result.exhausted_reason = True, e.what
            if e.what == "time_budget":
                break
        else:
            outcome = _classify(leaf, BranchTrace(tuple(ch.path)))
        if outcome is not None:
            result.leaves += 1
            if outcome.kind == "abort":
                result.aborted_leaves += 1
            if mode == COLLECT_ALL:
                result.outcomes.append(outcome)
            if outcome.kind == "sat" and result.witness is None:
                result.witness = outcome
                if mode == ANY_SAT:
                    result.status = "sat"
                    return result
        # advance to the lexicographically next branch
        path = ch.path
        i = len(path) - 1
        while i >= 0 and path[i].index + 1 >= path[i].arity:
            i -= 1
        if i < 0:
            break
        forced = [p.index for p in path[:i]] + [path[i].index + 1]
    if truncated:
        result.status = "exhausted"
    elif mode == COLLECT_ALL:
        result.status = "complete"
    elif result.witness is not None:
        result.status = "sat"
    else:
        result.status = "unsat"
    return result


def replay(root: Callable[[Chooser], Any], trace: BranchTrace) -> BranchOutcome:
    """Re-run one recorded branch, verifying each guess against the trace."""
    ch = _ReplayChooser(trace.steps)
    try:
        leaf = root(ch)
    except Abort as e:
        outcome = BranchOutcome("abort", e.reason, BranchTrace(tuple(ch.path)))
    else:
        outcome = _classify(leaf, BranchTrace(tuple(ch.path)))
    if len(ch.path) != len(trace.steps):
        raise TraceMismatch(
            f"trace has {len(trace.steps)} steps, replay used {len(ch.path)}"
        )
    return outcome
