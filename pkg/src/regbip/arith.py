"""Elementary number theory shared by the rest of the package.

Characters of eta-quotients are Kronecker symbols whose top argument can have
exponents far beyond machine range, so the top is kept as a
:class:`FactoredInteger` and symbols are evaluated prime by prime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping


@dataclass(frozen=True)
class FactoredInteger:
    """A nonzero integer ``sign * prod(p**e)`` held in factored form."""

    sign: int = 1
    factors: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        clean = {}
        for p, e in self.factors.items():
            if e < 0:
                raise ValueError(f"negative exponent {e} for {p}")
            if e == 0:
                continue
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            clean[int(p)] = int(e)
        object.__setattr__(self, "factors", dict(sorted(clean.items())))

    @classmethod
    def from_int(cls, n: int) -> FactoredInteger:
        if n == 0:
            raise ValueError("zero has no factorization")
        return cls(1 if n > 0 else -1, factorize(abs(n)))

    def value(self) -> int:
        """Materialize the integer. Only sensible for small exponents."""
        out = self.sign
        for p, e in self.factors.items():
            out *= p**e
        return out

    def __mul__(self, other: FactoredInteger) -> FactoredInteger:
        merged = dict(self.factors)
        for p, e in other.factors.items():
            merged[p] = merged.get(p, 0) + e
        return FactoredInteger(self.sign * other.sign, merged)

    def to_dict(self) -> dict:
        return {"sign": self.sign, "factors": {str(p): e for p, e in self.factors.items()}}

    def __str__(self):
        if not self.factors:
            return str(self.sign)
        body = "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors.items())
        return ("-" if self.sign < 0 else "") + body


def _jacobi(a: int, n: int) -> int:
    # n odd and positive
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers a, n.

    Uses (a/0) = 1 iff |a| = 1, (a/-1) = -1 iff a < 0, and
    (a/2) = 0, 1, -1 for a even, a = +-1 mod 8, a = +-3 mod 8.
    """
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    v = (n & -n).bit_length() - 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
        n >>= v
    if n == 1:
        return result
    return result * _jacobi(a, n)


def kronecker_factored(a: FactoredInteger, n: int) -> int:
    """(value(a)/n) computed through multiplicativity in the top argument."""
    if n == 0:
        return 1 if not a.factors else 0
    result = kronecker(a.sign, n)
    for p, e in a.factors.items():
        if result == 0:
            break
        s = kronecker(p, n)
        if s == 0:
            return 0
        if e % 2:
            result *= s
    return result


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; inputs here are built from small primes."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("divisors expects a positive integer")
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# Deterministic Miller-Rabin witnesses for n < 3.3e24 (covers 64-bit).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), values, 1)


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def is_power_of(base: int, n: int) -> bool:
    if n < 1:
        return False
    while n % base == 0:
        n //= base
    return n == 1
