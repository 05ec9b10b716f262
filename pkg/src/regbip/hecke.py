"""Hecke operators acting on truncated q-expansions.

``f | T_m`` needs a(m n), so a result built from coefficients up to q^N is
only known up to q^(N // m); the returned series carries that truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arith import FactoredInteger, divisors, is_power_of, is_prime
from .eta import ModularityCertificate, character_value
from .series import TruncatedSeries


class UnnormalizedError(ValueError):
    pass


@dataclass(frozen=True)
class HeckeContext:
    weight: int
    character_top: FactoredInteger
    level: int

    def __post_init__(self):
        if int(self.weight) != self.weight or self.weight < 1:
            raise ValueError(f"Hecke operators need an integer weight >= 1, got {self.weight}")
        object.__setattr__(self, "weight", int(self.weight))

    @classmethod
    def from_certificate(cls, cert: ModularityCertificate) -> HeckeContext:
        if cert.character_top is None:
            raise ValueError("certificate has no character (non-integral weight)")
        return cls(int(cert.weight), cert.character_top, cert.level)

    def chi(self, d: int) -> int:
        return character_value(self.character_top, d, self.level)

    def multiplier(self, d: int, modulus: Optional[int]) -> int:
        """chi(d) * d^(k-1), reduced into the modulus when there is one."""
        c = self.chi(d)
        if c == 0:
            return 0
        if modulus is None:
            return c * d ** (self.weight - 1)
        return c * pow(d, self.weight - 1, modulus) % modulus


def _result(f: TruncatedSeries, arr: np.ndarray) -> TruncatedSeries:
    if f.modulus is not None:
        arr = arr % f.modulus
    return TruncatedSeries._wrap(arr, f.modulus)


def apply_Tp(f: TruncatedSeries, p: int, ctx: HeckeContext) -> TruncatedSeries:
    """Coefficient n of the result is a(p n) + chi(p) p^(k-1) a(n/p)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = f.truncation // p
    src = f.coeffs
    out = src[: p * n + 1 : p].copy()
    c = ctx.multiplier(p, f.modulus)
    if c:
        out[::p] += c * src[: n // p + 1]
    return _result(f, out)


def apply_Tm(f: TruncatedSeries, m: int, ctx: HeckeContext) -> TruncatedSeries:
    """Coefficient n is the sum over d | gcd(n, m) of chi(d) d^(k-1) a(m n / d^2)."""
    if m < 1:
        raise ValueError("m must be positive")
    n = f.truncation // m
    src = f.coeffs
    out = np.zeros(n + 1, dtype=src.dtype)
    for d in divisors(m):
        w = ctx.multiplier(d, f.modulus)
        if not w:
            continue
        # n = d t contributes a((m/d) t)
        t_max = n // d
        step = m // d
        out[: d * t_max + 1 : d] += w * src[: step * t_max + 1 : step]
    return _result(f, out)


def eigen_check(f: TruncatedSeries, p: int, ctx: HeckeContext) -> Optional[int]:
    """lambda = a(p) if f | T_p = lambda f on every comparable coefficient, else None."""
    if f.truncation < 1 or f[1] != 1:
        raise UnnormalizedError("eigen_check needs a(1) = 1")
    if f.truncation < p:
        raise ValueError(f"truncation {f.truncation} too short to read a({p})")
    lam = f[p]
    image = apply_Tp(f, p, ctx)
    target = f.truncate(image.truncation).scale(lam)
    return lam if image == target else None


@dataclass(frozen=True)
class ProbeResult:
    steps: Optional[int]  # None: not reached within the truncation
    final_truncation: int
    truncations: tuple[int, ...]
    series: TruncatedSeries

    @property
    def reached(self) -> bool:
        return self.steps is not None


def nilpotency_probe(f: TruncatedSeries, primes: Sequence[int], ctx: HeckeContext) -> ProbeResult:
    """Apply T_p1, T_p2, ... left to right; stop at the first prefix that vanishes.

    Vanishing is only observed on the surviving truncation, which shrinks by a
    factor p at every step.
    """
    if f.modulus is None or not is_power_of(2, f.modulus):
        raise ValueError("nilpotency probe needs a series modulo a power of 2")
    for p in primes:
        if p % 2 == 0 or p % 3 == 0:
            raise ValueError(f"prime {p} is not coprime to 6")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    g = f
    truncs = [g.truncation]
    if g.is_zero():
        return ProbeResult(0, g.truncation, tuple(truncs), g)
    for step, p in enumerate(primes, start=1):
        g = apply_Tp(g, p, ctx)
        truncs.append(g.truncation)
        if g.is_zero():
            return ProbeResult(step, g.truncation, tuple(truncs), g)
    return ProbeResult(None, g.truncation, tuple(truncs), g)


def coprime_multiples_vanish(f: TruncatedSeries, primes: Sequence[int]) -> bool:
    """Whether a(P n) = 0 in the coefficient ring for all n coprime to P = prod(primes)."""
    P = 1
    for p in primes:
        P *= p
    top = f.truncation // P
    for n in range(1, top + 1):
        if all(n % p for p in primes) and f[P * n] != 0:
            return False
    return True
