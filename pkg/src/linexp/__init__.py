"""Satisfiability of linear-exponential integer constraint systems.

The solver decides systems built from integer linear arithmetic, powers
2^x and remainders (x mod 2^y), over the naturals or the integers, as
well as existential formulas extending them with the largest-power-of-2
predicate.  Satisfiability is decided by quantifier elimination with
exhaustive exploration of the elimination's branch points.
"""

from .terms import (
    Constraint,
    DIV,
    EQ,
    FreshVars,
    LE,
    LT,
    NotQuotientForm,
    System,
    Term,
    Var,
    ZeroDenominator,
    decompose_quotient,
    normalize_divisibilities,
    vigorous_substitute,
)

__version__ = "0.1.0"

__all__ = [
    "Constraint",
    "DIV",
    "EQ",
    "FreshVars",
    "LE",
    "LT",
    "NotQuotientForm",
    "System",
    "Term",
    "Var",
    "ZeroDenominator",
    "decompose_quotient",
    "normalize_divisibilities",
    "vigorous_substitute",
    "__version__",
]
