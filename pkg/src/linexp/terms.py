"""Terms, constraints and constraint systems.

A term is an integer combination of variables x, powers 2^x, remainders
(x mod 2^y) and, in intermediate pipeline stages, products x * 2^y.  A
constraint compares a term with zero (=, <, <=) or asserts divisibility
of the term by a positive integer.  A system is an ordered conjunction
of constraints.

Values are exact.  Exponents may evaluate negative over the integer
domain, in which case 2^x is the rational 1/2^|x| and (x mod 2^y) is 0
(the remainder of an integer modulo 2^y is exact for y < 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

Value = Union[int, Fraction]


class ZeroDenominator(ValueError):
    """Raised when a substitution denominator is zero."""


class NotQuotientForm(ValueError):
    """Raised when a term does not decompose against the given chain pair."""


@dataclass(frozen=True, order=True)
class Var:
    """A variable with a role tag.

    Kinds: "input" (from the user), "exp" (fresh exponent), "quot"
    (quotient of a division by a power), "rem" (remainder), "slack",
    "alias" (stands for a difference of exponents).
    """

    name: str
    kind: str = "input"

    def __repr__(self) -> str:
        return self.name

    def __str__(self) -> str:
        return self.name


class FreshVars:
    """Deterministic source of fresh variables for one solver run."""

    def __init__(self, taken: Iterable[Var] = ()):
        self._names = {v.name for v in taken}
        self._n = 0

    def make(self, kind: str, hint: str = "") -> Var:
        while True:
            self._n += 1
            name = f"_{hint or kind}{self._n}"
            if name not in self._names:
                self._names.add(name)
                return Var(name, kind)


def _clean(mapping):
    return {k: v for k, v in mapping.items() if v != 0}


class Term:
    """Immutable integer combination of variable atoms.

    linear: {x: a}       contributes a * x
    exp:    {x: b}       contributes b * 2^x
    mod:    {(x, y): c}  contributes c * (x mod 2^y)
    prod:   {(x, y): e}  contributes e * x * 2^y
    const:  d
    """

    __slots__ = ("linear", "exp", "mod", "prod", "const", "_hash")

    def __init__(self, linear=None, exp=None, mod=None, prod=None, const=0):
        object.__setattr__(self, "linear", _clean(linear or {}))
        object.__setattr__(self, "exp", _clean(exp or {}))
        object.__setattr__(self, "mod", _clean(mod or {}))
        object.__setattr__(self, "prod", _clean(prod or {}))
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Term is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def var(x: Var, coeff: int = 1) -> "Term":
        return Term(linear={x: coeff})

    @staticmethod
    def exp_of(x: Var, coeff: int = 1) -> "Term":
        return Term(exp={x: coeff})

    @staticmethod
    def mod_of(x: Var, y: Var, coeff: int = 1) -> "Term":
        return Term(mod={(x, y): coeff})

    @staticmethod
    def prod_of(x: Var, y: Var, coeff: int = 1) -> "Term":
        return Term(prod={(x, y): coeff})

    @staticmethod
    def constant(d: int) -> "Term":
        return Term(const=d)

    # -- structure ------------------------------------------------------

    def key(self):
        return (
            tuple(sorted(self.linear.items())),
            tuple(sorted(self.exp.items())),
            tuple(sorted(self.mod.items())),
            tuple(sorted(self.prod.items())),
            self.const,
        )

    def __eq__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
        return h

    def is_zero(self) -> bool:
        return not (self.linear or self.exp or self.mod or self.prod) and self.const == 0

    def is_constant(self) -> bool:
        return not (self.linear or self.exp or self.mod or self.prod)

    def is_linear(self) -> bool:
        """Only linear atoms and a constant."""
        return not (self.exp or self.mod or self.prod)

    def vars(self) -> frozenset:
        out = set(self.linear) | set(self.exp)
        for x, y in self.mod:
            out.add(x)
            out.add(y)
        for x, y in self.prod:
            out.add(x)
            out.add(y)
        return frozenset(out)

    def contains(self, x: Var) -> bool:
        if x in self.linear or x in self.exp:
            return True
        return any(x in pair for pair in self.mod) or any(x in pair for pair in self.prod)

    # -- norms ------------------------------------------------------------

    def one_norm(self) -> int:
        """Sum of magnitudes of every coefficient and the constant."""
        return (
            sum(abs(a) for a in self.linear.values())
            + sum(abs(b) for b in self.exp.values())
            + sum(abs(c) for c in self.mod.values())
            + sum(abs(e) for e in self.prod.values())
            + abs(self.const)
        )

    def linear_norm(self) -> int:
        """Largest magnitude among linear, remainder and product coefficients."""
        coeffs = [abs(a) for a in self.linear.values()]
        coeffs += [abs(c) for c in self.mod.values()]
        coeffs += [abs(e) for e in self.prod.values()]
        return max(coeffs, default=0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Term") -> "Term":
        if not isinstance(other, Term):
            return NotImplemented
        linear = dict(self.linear)
        for k, v in other.linear.items():
            linear[k] = linear.get(k, 0) + v
        exp = dict(self.exp)
        for k, v in other.exp.items():
            exp[k] = exp.get(k, 0) + v
        mod = dict(self.mod)
        for k, v in other.mod.items():
            mod[k] = mod.get(k, 0) + v
        prod = dict(self.prod)
        for k, v in other.prod.items():
            prod[k] = prod.get(k, 0) + v
        return Term(linear, exp, mod, prod, self.const + other.const)

    def __sub__(self, other: "Term") -> "Term":
        return self + (-other)

    def __neg__(self) -> "Term":
        return self.scale(-1)

    def scale(self, k: int) -> "Term":
        if k == 0:
            return Term()
        return Term(
            {v: k * a for v, a in self.linear.items()},
            {v: k * b for v, b in self.exp.items()},
            {p: k * c for p, c in self.mod.items()},
            {p: k * e for p, e in self.prod.items()},
            k * self.const,
        )

    def __mul__(self, k: int) -> "Term":
        if not isinstance(k, int):
            return NotImplemented
        return self.scale(k)

    __rmul__ = __mul__

    def divide_exact(self, k: int) -> "Term":
        """Divide every coefficient by k, which must divide each exactly."""
        if k == 0:
            raise ZeroDenominator("division of a term by zero")

        def dv(n: int) -> int:
            q, r = divmod(n, k)
            if r:
                raise ValueError(f"coefficient {n} not divisible by {k}")
            return q

        return Term(
            {v: dv(a) for v, a in self.linear.items()},
            {v: dv(b) for v, b in self.exp.items()},
            {p: dv(c) for p, c in self.mod.items()},
            {p: dv(e) for p, e in self.prod.items()},
            dv(self.const),
        )

    # -- evaluation -------------------------------------------------------

    def evaluate(self, point: Mapping[Var, int]) -> Value:
        total: Value = self.const
        for v, a in self.linear.items():
            total += a * point[v]
        for v, b in self.exp.items():
            e = point[v]
            total += b * (1 << e) if e >= 0 else Fraction(b, 1 << -e)
        for (x, y), c in self.mod.items():
            e = point[y]
            if e >= 0:
                total += c * (point[x] % (1 << e))
            # remainder modulo 2^y is exact (zero) for y < 0
        for (x, y), e in self.prod.items():
            w = point[y]
            px = point[x]
            total += e * px * (1 << w) if w >= 0 else Fraction(e * px, 1 << -w)
        if isinstance(total, Fraction) and total.denominator == 1:
            return int(total)
        return total

    # -- substitution -----------------------------------------------------

    def substitute_linear(self, mapping: Mapping[Var, "Term"]) -> "Term":
        """Replace linear occurrences of variables; other atoms untouched."""
        if not any(v in self.linear for v in mapping):
            return self
        base = Term(
            {v: a for v, a in self.linear.items() if v not in mapping},
            self.exp,
            self.mod,
            self.prod,
            self.const,
        )
        for v, repl in mapping.items():
            a = self.linear.get(v, 0)
            if a:
                base = base + repl.scale(a)
        return base

    def substitute_exp(self, mapping: Mapping[Var, "Term"]) -> "Term":
        """Replace powers 2^x by terms; other atoms untouched."""
        if not any(v in self.exp for v in mapping):
            return self
        base = Term(
            self.linear,
            {v: b for v, b in self.exp.items() if v not in mapping},
            self.mod,
            self.prod,
            self.const,
        )
        for v, repl in mapping.items():
            b = self.exp.get(v, 0)
            if b:
                base = base + repl.scale(b)
        return base

    def substitute_mod(self, mapping: Mapping[tuple, "Term"]) -> "Term":
        """Replace remainder atoms (x mod 2^y) by terms."""
        if not any(p in self.mod for p in mapping):
            return self
        base = Term(
            self.linear,
            self.exp,
            {p: c for p, c in self.mod.items() if p not in mapping},
            self.prod,
            self.const,
        )
        for p, repl in mapping.items():
            c = self.mod.get(p, 0)
            if c:
                base = base + repl.scale(c)
        return base

    # -- printing -----------------------------------------------------------

    def __repr__(self) -> str:
        parts = []

        def emit(coeff: int, atom: str) -> None:
            if coeff == 0:
                return
            sign = "-" if coeff < 0 else ("+" if parts else "")
            mag = abs(coeff)
            body = atom if mag == 1 and atom else f"{mag}{'*' + atom if atom else ''}"
            if not atom:
                body = str(mag)
            parts.append(f"{sign}{body}")

        for v, a in sorted(self.linear.items()):
            emit(a, v.name)
        for v, b in sorted(self.exp.items()):
            emit(b, f"2^{v.name}")
        for (x, y), c in sorted(self.mod.items()):
            emit(c, f"({x.name} mod 2^{y.name})")
        for (x, y), e in sorted(self.prod.items()):
            emit(e, f"{x.name}*2^{y.name}")
        emit(self.const, "")
        return "".join(parts) if parts else "0"


# Relations: a constraint is "term REL 0", or "divisor | term" for DIV.
EQ = "="
LE = "<="
LT = "<"
DIV = "div"

_REL_ORDER = {EQ: 0, LE: 1, LT: 2, DIV: 3}


class Constraint:
    """A single atomic constraint over a term."""

    __slots__ = ("term", "rel", "divisor", "_hash")

    def __init__(self, term: Term, rel: str, divisor: int = 0):
        if rel not in _REL_ORDER:
            raise ValueError(f"unknown relation {rel!r}")
        if rel == DIV:
            if divisor == 0:
                raise ValueError("divisibility needs a nonzero divisor")
            divisor = abs(divisor)
        else:
            divisor = 0
        object.__setattr__(self, "term", term)
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "divisor", divisor)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Constraint is immutable")

    def key(self):
        return (self.rel, self.divisor, self.term.key())

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
        return h

    def map_term(self, fn: Callable[[Term], Term]) -> "Constraint":
        return Constraint(fn(self.term), self.rel, self.divisor)

    def satisfied(self, point: Mapping[Var, int]) -> bool:
        val = self.term.evaluate(point)
        if self.rel == EQ:
            return val == 0
        if self.rel == LE:
            return val <= 0
        if self.rel == LT:
            return val < 0
        if isinstance(val, Fraction):
            return False
        return val % self.divisor == 0

    def is_trivially_true(self) -> bool:
        if not self.term.is_constant():
            return False
        c = self.term.const
        if self.rel == EQ:
            return c == 0
        if self.rel == LE:
            return c <= 0
        if self.rel == LT:
            return c < 0
        return c % self.divisor == 0

    def is_trivially_false(self) -> bool:
        return self.term.is_constant() and not self.is_trivially_true()

    def __repr__(self) -> str:
        if self.rel == DIV:
            return f"{self.divisor} | {self.term!r}"
        return f"{self.term!r} {self.rel} 0"


class System:
    """Ordered conjunction of constraints."""

    __slots__ = ("constraints",)

    def __init__(self, constraints: Iterable[Constraint] = ()):
        object.__setattr__(self, "constraints", tuple(constraints))

    def __setattr__(self, name, value):
        raise AttributeError("System is immutable")

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __eq__(self, other):
        if not isinstance(other, System):
            return NotImplemented
        return self.constraints == other.constraints

    def __hash__(self):
        return hash(self.constraints)

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(c) for c in self.constraints) + "}"

    def vars(self) -> frozenset:
        out = set()
        for c in self.constraints:
            out |= c.term.vars()
        return frozenset(out)

    def mod(self) -> int:
        """lcm of all divisibility divisors, 1 when there are none."""
        return math.lcm(*(c.divisor for c in self.constraints if c.rel == DIV), 1)

    def one_norm(self) -> int:
        """Largest term 1-norm among equalities and inequalities."""
        return max(
            (c.term.one_norm() for c in self.constraints if c.rel != DIV), default=0
        )

    def linear_norm(self) -> int:
        return max(
            (c.term.linear_norm() for c in self.constraints if c.rel != DIV), default=0
        )

    def is_linear(self) -> bool:
        return all(c.term.is_linear() for c in self.constraints)

    def satisfied(self, point: Mapping[Var, int]) -> bool:
        return all(c.satisfied(point) for c in self.constraints)

    def conjoin(self, *constraints: Constraint) -> "System":
        return System(self.constraints + constraints)

    def extend(self, other: "System") -> "System":
        return System(self.constraints + other.constraints)

    def map_terms(self, fn: Callable[[Term], Term]) -> "System":
        return System(c.map_term(fn) for c in self.constraints)

    def drop_trivial(self) -> "System":
        """Drop constraints that hold identically (constant and true)."""
        return System(c for c in self.constraints if not c.is_trivially_true())


def normalize_divisibilities(system: System) -> System:
    """Reduce each divisibility row's coefficients into [0, d).

    Adding multiples of the divisor to any coefficient preserves the
    constraint, so all coefficients and the constant are reduced modulo
    the row's own divisor.  Rows with divisor 1 hold identically and are
    dropped.
    """
    out = []
    for c in system:
        if c.rel != DIV:
            out.append(c)
            continue
        d = c.divisor
        if d == 1:
            continue
        t = c.term
        out.append(
            Constraint(
                Term(
                    {v: a % d for v, a in t.linear.items()},
                    {v: b % d for v, b in t.exp.items()},
                    {p: cc % d for p, cc in t.mod.items()},
                    {p: e % d for p, e in t.prod.items()},
                    t.const % d,
                ),
                DIV,
                d,
            )
        )
    return System(out)


def vigorous_substitute(system: System, x: Var, num: Term, den: int) -> System:
    """Replace x by num/den across the system, clearing denominators.

    Equalities and inequalities are multiplied through by den (inequality
    direction flips when den < 0, which the stored "term rel 0" shape
    absorbs by negating the term).  Divisibilities containing x have both
    sides multiplied by den.  Constraints that become 0 = 0 are dropped.
    """
    if den == 0:
        raise ZeroDenominator("substitution denominator is zero")
    out = []
    for c in system:
        t = c.term
        a = t.linear.get(x, 0)
        rest = t + Term.var(x, -a) if a else t
        if c.rel == DIV:
            if a == 0:
                out.append(c)
                continue
            new = num.scale(a) + rest.scale(den)
            out.append(Constraint(new, DIV, c.divisor * abs(den)))
            continue
        new = num.scale(a) + rest.scale(den)
        if den < 0 and c.rel != EQ:
            new = -new
        if c.rel == EQ and new.is_zero():
            continue
        out.append(Constraint(new, c.rel, 0))
    return System(out)


def decompose_quotient(term: Term, head: Var, second: Var):
    """Split a term against the top chain pair (head, second).

    Returns (a, f, low) where the term equals
    a * 2^head + f * 2^second + low, with f linear over quotient
    variables plus a constant, and low free of head, of 2^second and of
    all products.  Raises NotQuotientForm when the term does not have
    that shape.
    """
    if term.linear.get(head, 0):
        raise NotQuotientForm(f"{head} occurs linearly")
    for (x, y) in term.mod:
        if head in (x, y):
            raise NotQuotientForm(f"{head} occurs in a remainder atom")
    f_lin = {}
    for (x, y), e in term.prod.items():
        if y != second or x == head:
            raise NotQuotientForm(f"product {x}*2^{y} not over 2^{second}")
        f_lin[x] = e
    a = term.exp.get(head, 0)
    f = Term(linear=f_lin, const=term.exp.get(second, 0))
    low = Term(
        term.linear,
        {v: b for v, b in term.exp.items() if v not in (head, second)},
        term.mod,
        {},
        term.const,
    )
    return a, f, low
