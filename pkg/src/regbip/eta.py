"""Eta-quotients prod eta(delta z)^r_delta: weight, level, character, cusps.

Cusp orders and weights are exact ``Fraction`` values; a holomorphicity
verdict is a sign test on them. The character is recorded as the top of a
Kronecker symbol, ``(-1)^k * prod delta^r_delta``, held in factored form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import FactoredInteger, divisors, factorize, kronecker_factored, lcm, primes_up_to
from .series import TruncatedSeries, eta_product


class EtaParseError(ValueError):
    pass


class NotLevelAdmissible(ValueError):
    """sum(delta * r_delta) is not a multiple of 24, so no level exists."""


class FractionalExponentError(ValueError):
    """The q-offset sum(delta * r_delta)/24 is not a nonnegative integer."""


class NonIntegralWeight(ValueError):
    pass


@dataclass(frozen=True)
class EtaQuotient:
    terms: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for delta, r in self.terms.items():
            if delta < 1:
                raise ValueError(f"scale must be positive, got {delta}")
            if r:
                clean[int(delta)] = clean.get(int(delta), 0) + int(r)
        object.__setattr__(self, "terms", {d: r for d, r in sorted(clean.items()) if r})

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __mul__(self, other: EtaQuotient) -> EtaQuotient:
        merged = dict(self.terms)
        for d, r in other.terms.items():
            merged[d] = merged.get(d, 0) + r
        return EtaQuotient(merged)

    def __pow__(self, e: int) -> EtaQuotient:
        return EtaQuotient({d: r * e for d, r in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "1"
        return " * ".join(f"{d}^{r}" for d, r in self.terms.items())

    @property
    def q_offset(self) -> Fraction:
        return Fraction(sum(d * r for d, r in self.terms.items()), 24)


_TERM = re.compile(r"^\s*(\d+)\s*(?:\^\s*([+-]?\d+))?\s*$")


def parse_eta(text: str) -> EtaQuotient:
    """Parse ``"48^10 * 24^-2 * 96^-4"``; a bare ``"12"`` means exponent 1."""
    if not text or not text.strip():
        raise EtaParseError("empty eta-quotient")
    terms: dict[int, int] = {}
    for chunk in text.split("*"):
        match = _TERM.match(chunk)
        if not match:
            raise EtaParseError(f"cannot parse term {chunk.strip()!r}; expected delta^exp")
        delta = int(match.group(1))
        if delta < 1:
            raise EtaParseError(f"scale must be positive in {chunk.strip()!r}")
        exp = int(match.group(2)) if match.group(2) is not None else 1
        terms[delta] = terms.get(delta, 0) + exp
    return EtaQuotient(terms)


# -- families used for the density results ----------------------------------


def _from_pairs(pairs) -> EtaQuotient:
    terms: dict[int, int] = {}
    for d, r in pairs:
        terms[d] = terms.get(d, 0) + r
    return EtaQuotient(terms)


def construction_F(alpha: int, m: int, j: int) -> EtaQuotient:
    """eta(3*2^(a+3) m z)^(2^(j+1)+2) / (eta(24z)^2 eta(3*2^(a+4) m z)^(2^j))."""
    return _from_pairs([(3 * 2 ** (alpha + 3) * m, 2 ** (j + 1) + 2), (24, -2), (3 * 2 ** (alpha + 4) * m, -(2**j))])


def construction_H(alpha: int, m: int, j: int) -> EtaQuotient:
    """eta(8*3^(a+1) m z)^(3^(j+1)+2) / (eta(24z)^2 eta(8*3^(a+2) m z)^(3^j))."""
    return _from_pairs([(8 * 3 ** (alpha + 1) * m, 3 ** (j + 1) + 2), (24, -2), (8 * 3 ** (alpha + 2) * m, -(3**j))])


def stated_level_F(alpha: int, m: int) -> int:
    """Level quoted for the F family: admissible, though not always minimal."""
    return 9 * 2 ** (alpha + 6) * m


def stated_level_H(alpha: int, m: int) -> int:
    """Level quoted for the H family (admissible for j >= 1)."""
    return 2**6 * 3 ** (alpha + 2) * m


def stated_character_top_F(alpha: int, m: int, j: int) -> FactoredInteger:
    """The simplified character top quoted alongside the F family."""
    k = 2 ** (j - 1)
    top = FactoredInteger(-1 if k % 2 else 1, {3: 2**j, 2: (alpha + 2) * 2**j + 2 * alpha})
    return top * _power_of(m, 2**j + 2)


def stated_character_top_H(alpha: int, m: int, j: int) -> FactoredInteger:
    """Simplified H character top, reading the 2-exponent as 6*3^j."""
    top = FactoredInteger(-1, {2: 6 * 3**j, 3: (2 * alpha + 1) * 3**j + 2 * alpha})
    return top * _power_of(m, 2 * 3**j + 2)


def _power_of(n: int, e: int) -> FactoredInteger:
    return FactoredInteger(1, {p: a * e for p, a in factorize(n).items()})


# -- weight, level, character, cusp orders ------------------------------------


def weight(eq: EtaQuotient) -> Fraction:
    return Fraction(sum(eq.terms.values()), 2)


def _deltas_lcm(eq: EtaQuotient) -> int:
    return lcm(eq.terms) if eq.terms else 1


def sum_delta_r(eq: EtaQuotient) -> int:
    return sum(d * r for d, r in eq.terms.items())


def sum_level_over_delta_r(eq: EtaQuotient, level: int) -> int:
    return sum(level // d * r for d, r in eq.terms.items())


def is_level_admissible(eq: EtaQuotient, level: int) -> bool:
    """Every delta divides level and both 24-divisibility conditions hold."""
    if any(level % d for d in eq.terms):
        return False
    return sum_delta_r(eq) % 24 == 0 and sum_level_over_delta_r(eq, level) % 24 == 0


def _scan_level(eq: EtaQuotient) -> Optional[int]:
    base = _deltas_lcm(eq)
    # the condition on M * base is periodic in M with period 24
    for mult in range(1, 25):
        if sum_level_over_delta_r(eq, base * mult) % 24 == 0:
            return base * mult
    return None


def minimal_level(eq: EtaQuotient) -> int:
    if sum_delta_r(eq) % 24:
        raise NotLevelAdmissible(f"sum of delta*r = {sum_delta_r(eq)} is not divisible by 24")
    level = _scan_level(eq)
    if level is None:
        raise NotLevelAdmissible("no multiple of lcm(delta) satisfies the level condition")
    return level


def _signed_prime_exponents(eq: EtaQuotient) -> dict[int, int]:
    out: dict[int, int] = {}
    for d, r in eq.terms.items():
        for p, a in factorize(d).items():
            out[p] = out.get(p, 0) + a * r
    return out


def character_top(eq: EtaQuotient) -> FactoredInteger:
    """(-1)^k * prod delta^r_delta in factored form.

    A negative net prime exponent is stored by absolute value: the resulting
    Kronecker character is the same, since p^-e and p^e give equal symbols.
    """
    k = weight(eq)
    if k.denominator != 1:
        raise NonIntegralWeight(f"weight {k} is not an integer")
    exps = {p: abs(e) for p, e in _signed_prime_exponents(eq).items() if e}
    return FactoredInteger(-1 if k.numerator % 2 else 1, exps)


def character_value(top: FactoredInteger, d: int, level: int) -> int:
    """chi(d) for the Dirichlet character mod level attached to ``top``."""
    if math.gcd(d, level) != 1:
        return 0
    return kronecker_factored(top, d)


def characters_agree(top_a: FactoredInteger, top_b: FactoredInteger, level: int) -> bool:
    """Compare two Kronecker characters on the units mod ``level``.

    Both are completely multiplicative, so primes below the level that do not
    divide it generate every unit residue in [1, level).
    """
    for p in primes_up_to(level - 1):
        if level % p and kronecker_factored(top_a, p) != kronecker_factored(top_b, p):
            return False
    return True


def cusp_order(eq: EtaQuotient, level: int, d: int) -> Fraction:
    """Order of vanishing at cusps c/d of Gamma_0(level)."""
    if d < 1 or level % d:
        raise ValueError(f"{d} does not divide {level}")
    for delta in eq.terms:
        if level % delta:
            raise ValueError(f"scale {delta} does not divide level {level}")
    g = math.gcd(d, level // d)
    total = sum(Fraction(math.gcd(d, delta) ** 2 * r, g * d * delta) for delta, r in eq.terms.items())
    return Fraction(level, 24) * total


@dataclass(frozen=True)
class ModularityCertificate:
    terms: dict[int, int]
    level: int
    weight: Fraction
    character_top: Optional[FactoredInteger]
    cusp_orders: tuple[tuple[int, Fraction], ...]
    holomorphic: bool
    minimal_level: Optional[int]
    conditions: dict[str, bool]
    warnings: tuple[str, ...] = ()

    @property
    def cuspidal(self) -> bool:
        return self.holomorphic and all(order > 0 for _, order in self.cusp_orders)

    def order_at(self, d: int) -> Fraction:
        for dd, order in self.cusp_orders:
            if dd == d:
                return order
        raise KeyError(d)

    def to_dict(self) -> dict:
        w = self.weight
        return {
            "eta_quotient": {str(d): r for d, r in self.terms.items()},
            "level": self.level,
            "minimal_level": self.minimal_level,
            "weight": w.numerator if w.denominator == 1 else f"{w.numerator}/{w.denominator}",
            "character_top": None if self.character_top is None else self.character_top.to_dict(),
            "cusps": [
                {"d": d, "order_num": o.numerator, "order_den": o.denominator} for d, o in self.cusp_orders
            ],
            "holomorphic": self.holomorphic,
            "cuspidal": self.cuspidal,
            "conditions": dict(self.conditions),
            "warnings": list(self.warnings),
        }


def certify(eq: EtaQuotient, level: Optional[int] = None) -> ModularityCertificate:
    """Check the eta-quotient criteria and collect cusp orders.

    Without ``level`` the minimal admissible level is used. Failures are
    recorded in the certificate rather than raised.
    """
    k = weight(eq)
    warnings = []
    try:
        min_level: Optional[int] = minimal_level(eq)
    except NotLevelAdmissible as exc:
        min_level = None
        warnings.append(str(exc))
    if level is None:
        level = min_level or _scan_level(eq) or _deltas_lcm(eq)
    deltas_divide = all(level % d == 0 for d in eq.terms)
    conditions = {
        "weight_integral": k.denominator == 1,
        "deltas_divide_level": deltas_divide,
        "sum_delta_r_mod_24": sum_delta_r(eq) % 24 == 0,
        "sum_level_over_delta_r_mod_24": deltas_divide and sum_level_over_delta_r(eq, level) % 24 == 0,
    }
    offset = eq.q_offset
    if offset.denominator != 1:
        warnings.append(f"fractional q-offset {offset}; no integral q-expansion")
    top = character_top(eq) if k.denominator == 1 else None
    if deltas_divide:
        orders = tuple((d, cusp_order(eq, level, d)) for d in divisors(level))
    else:
        orders = ()
        warnings.append(f"level {level} is not a multiple of every scale")
    holomorphic = (
        all(conditions.values()) and k.denominator == 1 and k >= 1 and all(o >= 0 for _, o in orders)
    )
    return ModularityCertificate(
        terms=dict(eq.terms),
        level=level,
        weight=k,
        character_top=top,
        cusp_orders=orders,
        holomorphic=holomorphic,
        minimal_level=min_level,
        conditions=conditions,
        warnings=tuple(warnings),
    )


def q_expansion(eq: EtaQuotient, n: int, modulus: Optional[int] = None) -> TruncatedSeries:
    """Coefficients of q^0..q^n of the eta-quotient."""
    offset = eq.q_offset
    if offset.denominator != 1 or offset < 0:
        raise FractionalExponentError(f"q-offset {offset} is not a nonnegative integer")
    s = int(offset)
    if s > n:
        return TruncatedSeries.zero(n, modulus)
    return eta_product(eq.terms, n - s, modulus).shift(s, n)
