"""Number-theoretic helpers: totients, orders, discrete logs, exact logs.

Everything is exact integer arithmetic.  Factored representations keep
totient chains cheap even when the chain values grow to hundreds of
digits (chain values stay smooth, so only small numbers are ever trial
divided).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


class NonPositive(ValueError):
    """Raised when an argument must be a positive integer."""


class NotCoprime(ValueError):
    """Raised when two arguments must be coprime."""


class BoundViolated(AssertionError):
    """A certified growth bound failed; indicates a bug, never expected."""


def _trial_division(n: int) -> dict[int, int]:
    if n <= 0:
        raise NonPositive(f"cannot factor {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FactoredInt:
    """An integer kept as its prime factorization."""

    factors: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def of(n: int) -> "FactoredInt":
        return FactoredInt(tuple(sorted(_trial_division(n).items())))

    @property
    def value(self) -> int:
        v = 1
        for p, k in self.factors:
            v *= p**k
        return v

    def multiply(self, other: "FactoredInt") -> "FactoredInt":
        fs = dict(self.factors)
        for p, k in other.factors:
            fs[p] = fs.get(p, 0) + k
        return FactoredInt(tuple(sorted(fs.items())))

    def lcm(self, other: "FactoredInt") -> "FactoredInt":
        fs = dict(self.factors)
        for p, k in other.factors:
            fs[p] = max(fs.get(p, 0), k)
        return FactoredInt(tuple(sorted(fs.items())))

    def totient(self) -> "FactoredInt":
        # phi(prod p^k) = prod p^(k-1) * (p - 1); p - 1 is small enough
        # to factor directly.
        out = FactoredInt()
        for p, k in self.factors:
            part = _trial_division(p - 1) if p > 1 else {}
            if k > 1:
                part[p] = part.get(p, 0) + (k - 1)
            out = out.multiply(FactoredInt(tuple(sorted(part.items()))))
        return out


def factor(n: int) -> FactoredInt:
    """Prime factorization by trial division."""
    return FactoredInt.of(n)


def totient(n: int) -> int:
    """Euler's totient, with phi(1) = 1."""
    if n <= 0:
        raise NonPositive(f"totient of {n}")
    return FactoredInt.of(n).totient().value


def mult_order(b: int, d: int) -> int:
    """Multiplicative order of b modulo d.  Order modulo 1 is 1."""
    if d <= 0:
        raise NonPositive(f"order modulo {d}")
    if d == 1:
        return 1
    b %= d
    if math.gcd(b, d) != 1:
        raise NotCoprime(f"{b} and {d} share a factor")
    # The order divides phi(d); checking divisors of phi(d) keeps this
    # fast for large smooth moduli.
    phi = totient(d)
    order = phi
    for p in _trial_division(phi):
        while order % p == 0 and pow(b, order // p, d) == 1:
            order //= p
    return order


def discrete_log(b: int, t: int, d: int) -> Optional[int]:
    """Smallest u >= 0 with b^u = t (mod d), or None.

    Requires gcd(b, d) = 1.  Baby-step giant-step over the cyclic group
    generated by b; the answer, when it exists, is canonical in
    [0, mult_order(b, d)).
    """
    if d <= 0:
        raise NonPositive(f"discrete log modulo {d}")
    if d == 1:
        return 0
    b %= d
    t %= d
    if math.gcd(b, d) != 1:
        raise NotCoprime(f"{b} and {d} share a factor")
    order = mult_order(b, d)
    m = math.isqrt(order) + 1
    baby = {}
    cur = t
    for j in range(m):
        baby.setdefault(cur, j)
        cur = cur * b % d
    # giant steps multiply by b^m
    gs = pow(b, m, d)
    cur = 1
    for i in range(1, m + 2):
        cur = cur * gs % d
        j = baby.get(cur)
        if j is not None:
            return (i * m - j) % order
    return None


def totient_chain(alpha: int, steps: int) -> list[int]:
    """Chain b_0 = 1, b_{i+1} = lcm(b_i, phi(alpha * b_i)).

    Each value is certified against the growth bound alpha^(2 i^2);
    exceeding it raises BoundViolated (which indicates a bug, the bound
    is a theorem).
    """
    if alpha <= 0:
        raise NonPositive(f"chain base {alpha}")
    fa = FactoredInt.of(alpha)
    chain = [FactoredInt.of(1)]
    for _ in range(steps):
        cur = chain[-1]
        chain.append(cur.lcm(fa.multiply(cur).totient()))
    out = []
    for i, f in enumerate(chain):
        v = f.value
        if alpha > 1 and v > alpha ** (2 * i * i):
            raise BoundViolated(f"b_{i} = {v} exceeds {alpha}^(2*{i}^2)")
        if alpha == 1 and v > 1:
            raise BoundViolated(f"b_{i} = {v} exceeds 1")
        out.append(v)
    return out


def base_params(mod: int, base: int = 2) -> tuple[int, int]:
    """Split mod into (d, n): d the largest divisor coprime to the base,
    base^n the smallest power of the base divisible by mod / d."""
    if mod <= 0:
        raise NonPositive(f"mod {mod}")
    if base < 2:
        raise NonPositive(f"base {base}")
    d = mod
    g = math.gcd(d, base)
    while g > 1:
        d //= g
        g = math.gcd(d, base)
    rest = mod // d
    n = 0
    power = 1
    while power % rest != 0:
        n += 1
        power *= base
    return d, n


def ceil_log(p: int, q: int = 1, base: int = 2) -> int:
    """Smallest integer t with base^t >= p/q, exactly.

    p and q must be positive.  The result may be negative when p < q.
    """
    if p <= 0 or q <= 0:
        raise NonPositive(f"ceil_log({p}/{q})")
    if base < 2:
        raise NonPositive(f"base {base}")
    if p > q:
        t, power = 0, 1
        while q * power < p:
            power *= base
            t += 1
        return t
    k, power = 0, base
    while q >= p * power:
        k += 1
        power *= base
    return -k
