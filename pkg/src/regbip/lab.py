"""Instantiate the congruence families for B_2 and B_4 and test them numerically.

Nothing here assumes a claimed congruence is true. Each family is turned into
concrete progressions (with every offset checked to be integral), and each
progression is scanned against the series engine, with a sample of positions
re-checked against the brute-force oracle first.
"""

from __future__ import annotations

import csv
import io
import json
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .arith import is_prime
from .eta import parse_eta, q_expansion
from .partitions import (
    LACUNARY,
    bipartition_series,
    brute_force_table,
    lacunary_coefficients,
)

SERIES_CAPACITY = 1_000_000
ORACLE_SAMPLES = 20
ORACLE_SAMPLE_CEILING = 1500
# sparse requests for B_2, B_4 mod 4 go to single-coefficient evaluation
SPARSE_RATIO = 64


class HypothesisError(ValueError):
    """Supplied parameters violate a family's hypotheses."""


class NonIntegralProgression(ValueError):
    def __init__(self, expression: str, value: Fraction):
        super().__init__(f"non-integral progression: {expression} = {value}")
        self.expression = expression
        self.value = value


class CapacityError(ValueError):
    pass


# -- data types -------------------------------------------------------------


@dataclass(frozen=True)
class Vanishing:
    def describe(self) -> str:
        return "vanishing"


@dataclass(frozen=True)
class Proportional:
    target_A: int
    target_B: int
    factor: int

    def describe(self) -> str:
        return f"proportional(A'={self.target_A},B'={self.target_B},factor={self.factor})"


@dataclass(frozen=True)
class Progression:
    """Claim B_ell(A n + B) = 0, or = factor * B_ell(A' n + B'), modulo M."""

    ell: int
    A: int
    B: int
    M: int
    form: Vanishing | Proportional = Vanishing()
    family: str = ""
    parameters: tuple[tuple[str, int | str], ...] = ()

    def __post_init__(self):
        if self.A < 1 or self.B < 0 or self.M < 2:
            raise ValueError(f"bad progression A={self.A}, B={self.B}, M={self.M}")
        if isinstance(self.form, Proportional) and not 0 <= self.form.factor < self.M:
            object.__setattr__(
                self, "form", Proportional(self.form.target_A, self.form.target_B, self.form.factor % self.M)
            )

    def parameter_string(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.parameters)


@dataclass(frozen=True)
class VerificationReport:
    progression: Progression
    n_max: int
    holds: bool
    checked_count: int
    witness_n: Optional[int] = None
    lhs: Optional[int] = None
    rhs: Optional[int] = None
    route: str = "series"

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def to_dict(self) -> dict:
        p = self.progression
        return {
            "family": p.family,
            "parameters": dict(p.parameters),
            "ell": p.ell,
            "A": p.A,
            "B": p.B,
            "M": p.M,
            "form": p.form.describe(),
            "n_max": self.n_max,
            "verdict": self.verdict,
            "checked_count": self.checked_count,
            "witness_n": self.witness_n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "route": self.route,
        }


@dataclass(frozen=True)
class DensityReport:
    ell: int
    M: int
    checkpoints: tuple[tuple[int, int, Fraction], ...]

    def rows(self) -> list[tuple[int, int, Fraction]]:
        return list(self.checkpoints)


# -- coefficient access -------------------------------------------------------


class _SeriesTable:
    """Write-once cache of mod-M bipartition series keyed by (ell, M)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store = {}

    def get(self, ell: int, M: int, n: int):
        with self._lock:
            hit = self._store.get((ell, M))
            if hit is not None and hit.truncation >= n:
                return hit
        fresh = bipartition_series(ell, n, M).series
        with self._lock:
            hit = self._store.get((ell, M))
            if hit is None or hit.truncation < fresh.truncation:
                self._store[(ell, M)] = fresh
        return fresh

    def clear(self):
        with self._lock:
            self._store.clear()


series_table = _SeriesTable()

_oracle_checked: set[tuple[int, int, int, str]] = set()
_oracle_lock = threading.Lock()


class OracleMismatch(AssertionError):
    pass


def _cross_check(ell: int, M: int, top: int, fetch, route: str):
    """Compare ORACLE_SAMPLES positions of the fast path with brute force."""
    bound = min(top, ORACLE_SAMPLE_CEILING)
    key = (ell, M, bound, route)
    with _oracle_lock:
        if key in _oracle_checked:
            return
    rng = random.Random(f"{ell}:{M}:{bound}:{route}")
    picks = sorted({rng.randint(0, bound) for _ in range(ORACLE_SAMPLES * 3)})[: ORACLE_SAMPLES]
    if len(picks) < ORACLE_SAMPLES:
        picks = list(range(min(bound, ORACLE_SAMPLES - 1) + 1))
    truth = brute_force_table(ell, max(picks))
    got = fetch(picks)
    for n, value in zip(picks, got):
        if truth[n] % M != value:
            raise OracleMismatch(f"B_{ell}({n}) mod {M}: fast path {value}, oracle {truth[n] % M}")
    with _oracle_lock:
        _oracle_checked.add(key)


def coefficients_at(ell: int, M: int, indices: Sequence[int]) -> tuple[list[int], str]:
    """B_ell(n) mod M at the given indices, with the route used."""
    top = max(indices) if len(indices) else 0
    lacunary = ell in LACUNARY and LACUNARY[ell] % M == 0
    # depends on the request only, so the route is reproducible
    sparse = lacunary and len(indices) * SPARSE_RATIO < top
    if top <= SERIES_CAPACITY and not sparse:
        s = series_table.get(ell, M, top)
        _cross_check(ell, M, top, lambda ns: [s[n] for n in ns], "series")
        arr = s.coeffs
        return [int(arr[i]) for i in indices], "series"
    if lacunary:
        _cross_check(ell, M, top, lambda ns: lacunary_coefficients(ell, ns, M), "lacunary")
        return lacunary_coefficients(ell, indices, M), "lacunary"
    raise CapacityError(f"index {top} exceeds series capacity {SERIES_CAPACITY} for ell={ell}, M={M}")


# -- verifiers ----------------------------------------------------------------


def check_vanishing(ell: int, A: int, B: int, M: int, n_max: int, progression: Optional[Progression] = None):
    """Test B_ell(A n + B) = 0 mod M for 0 <= n <= n_max."""
    prog = progression or Progression(ell, A, B, M)
    idx = [A * n + B for n in range(n_max + 1)]
    values, route = coefficients_at(ell, M, idx)
    for n, v in enumerate(values):
        if v % M:
            return VerificationReport(prog, n_max, False, n + 1, n, v, 0, route)
    return VerificationReport(prog, n_max, True, n_max + 1, route=route)


def check_proportional(
    ell: int,
    A: int,
    B: int,
    factor: int,
    M: int,
    n_max: int,
    target_A: int = 1,
    target_B: int = 0,
    progression: Optional[Progression] = None,
):
    """Test B_ell(A n + B) = factor * B_ell(A' n + B') mod M for 0 <= n <= n_max."""
    prog = progression or Progression(ell, A, B, M, Proportional(target_A, target_B, factor))
    factor %= M
    lhs_idx = [A * n + B for n in range(n_max + 1)]
    rhs_idx = [target_A * n + target_B for n in range(n_max + 1)]
    values, route = coefficients_at(ell, M, lhs_idx + rhs_idx)
    lhs, rhs = values[: n_max + 1], values[n_max + 1 :]
    for n, (x, y) in enumerate(zip(lhs, rhs)):
        if (x - factor * y) % M:
            return VerificationReport(prog, n_max, False, n + 1, n, x, factor * y % M, route)
    return VerificationReport(prog, n_max, True, n_max + 1, route=route)


def verify(prog: Progression, n_max: int) -> VerificationReport:
    if isinstance(prog.form, Proportional):
        f = prog.form
        return check_proportional(prog.ell, prog.A, prog.B, f.factor, prog.M, n_max, f.target_A, f.target_B, prog)
    return check_vanishing(prog.ell, prog.A, prog.B, prog.M, n_max, prog)


def verify_all(progressions: Sequence[Progression], n_max: int, workers: int = 1) -> list[VerificationReport]:
    """Run every progression; results come back in input order."""
    if workers <= 1:
        return [verify(p, n_max) for p in progressions]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda p: verify(p, n_max), progressions))


# -- families -----------------------------------------------------------------


def _integral(expression: str, value: Fraction) -> int:
    if value.denominator != 1:
        raise NonIntegralProgression(expression, value)
    return int(value)


def _need_prime(p: int, name: str = "p"):
    if not is_prime(p):
        raise HypothesisError(f"{name}={p} is not prime")


def _b2_prime(p: int, name: str = "p"):
    _need_prime(p, name)
    if p % 12 == 1:
        raise HypothesisError(f"{name}={p} must satisfy {name} != 1 (mod 12)")


def _b4_prime(p: int, name: str = "p"):
    _need_prime(p, name)
    if p % 4 != 3:
        raise HypothesisError(f"{name}={p} must satisfy {name} = 3 (mod 4)")


def _params(**kw) -> tuple:
    return tuple(kw.items())


def _need(params: dict, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise HypothesisError(f"missing parameter(s): {', '.join(missing)}")


def _primes_arg(params: dict) -> list[int]:
    raw = params["primes"]
    if isinstance(raw, str):
        raw = [int(x) for x in raw.replace(",", " ").split()]
    return [int(x) for x in raw]


def _multi_prime_vanishing(family, ell, den, check_prime, params):
    # B_ell(P^2 q^2 n + (P^2 q (den j + q) - 1)/den) = 0 mod 4, P = p_1...p_k, q = p_{k+1}
    _need(params, "primes", "j")
    primes = _primes_arg(params)
    j = int(params["j"])
    if not primes:
        raise HypothesisError("need at least one prime")
    for i, p in enumerate(primes, start=1):
        check_prime(p, f"p{i}")
    last = primes[-1]
    if j % last == 0:
        raise HypothesisError(f"j={j} must not be divisible by p{len(primes)}={last}")
    head = 1
    for p in primes[:-1]:
        head *= p * p
    A = head * last * last
    B = _integral(
        f"({head}*{last}*({den}*{j}+{last})-1)/{den}", Fraction(head * last * (den * j + last) - 1, den)
    )
    tag = ",".join(map(str, primes))
    return [Progression(ell, A, B, 4, Vanishing(), family, _params(primes=tag, j=j))]


def _single_prime_vanishing(family, ell, den, check_prime, params):
    # B_ell(p^(2k+2) n + p^(2k+1) j + (p^(2k+2) - 1)/den) = 0 mod 4
    _need(params, "p", "k", "j")
    p, k, j = int(params["p"]), int(params["k"]), int(params["j"])
    check_prime(p)
    if k < 0:
        raise HypothesisError("k must be nonnegative")
    if j % p == 0:
        raise HypothesisError(f"j={j} must not be divisible by p={p}")
    A = p ** (2 * k + 2)
    frac = _integral(f"({p}^{2 * k + 2}-1)/{den}", Fraction(A - 1, den))
    B = p ** (2 * k + 1) * j + frac
    return [Progression(ell, A, B, 4, Vanishing(), family, _params(p=p, k=k, j=j))]


def _variants(base_factor: int, extra: Sequence[tuple[str, int]], M: int = 4) -> list[tuple[str, int]]:
    seen, out = set(), []
    for label, f in [("stated", base_factor)] + list(extra):
        f %= M
        if f not in seen:
            seen.add(f)
            out.append((label, f))
    return out


def _multiplicative(family, ell, den, t, p, k, r, variants):
    # B_ell(p^(k+1) n + p r + (t p - 1)/den) = factor * B_ell(p^(k-1) n + (den r + t - p)/(den p))
    if (den * r + t) % p:
        raise HypothesisError(f"p={p} must divide {den}*r+{t} = {den * r + t}")
    A = p ** (k + 1)
    B = p * r + _integral(f"({t}*{p}-1)/{den}", Fraction(t * p - 1, den))
    tA = p ** (k - 1)
    tB = _integral(f"({den}*{r}+{t}-{p})/({den}*{p})", Fraction(den * r + t - p, den * p))
    return [
        Progression(ell, A, B, 4, Proportional(tA, tB, f), family, _params(p=p, k=k, r=r, variant=label))
        for label, f in variants
    ]


def family_thm61(params):
    return _multi_prime_vanishing("thm6.1", 2, 12, _b2_prime, params)


def family_cor62(params):
    return _single_prime_vanishing("cor6.2", 2, 12, _b2_prime, params)


def family_thm81(params):
    return _multi_prime_vanishing("thm8.1", 4, 4, _b4_prime, params)


def family_cor82(params):
    return _single_prime_vanishing("cor8.2", 4, 4, _b4_prime, params)


def family_thm63(params):
    _need(params, "p", "k", "r")
    p, k, r = int(params["p"]), int(params["k"]), int(params["r"])
    _need_prime(p)
    t = p % 12
    if t not in (5, 7, 11):
        raise HypothesisError(f"p={p} must be 5, 7 or 11 (mod 12)")
    if "t" in params and int(params["t"]) != t:
        raise HypothesisError(f"p={p} is not congruent to t={params['t']} (mod 12)")
    if k < 1 or r < 0:
        raise HypothesisError("need k >= 1 and r >= 0")
    # the derivation produces factor -1 before the final step asserts +1
    return _multiplicative("thm6.3", 2, 12, t, p, k, r, _variants(1, [("intermediate", -1)]))


def family_cor64(params):
    _need(params, "p", "k")
    p, k = int(params["p"]), int(params["k"])
    _need_prime(p)
    if p % 12 not in (5, 7, 11):
        raise HypothesisError(f"p={p} must be 5, 7 or 11 (mod 12)")
    if k < 1:
        raise HypothesisError("k must be positive")
    A = p ** (2 * k)
    B = _integral(f"({p}^{2 * k}-1)/12", Fraction(A - 1, 12))
    return [
        Progression(2, A, B, 4, Proportional(1, 0, f), "cor6.4", _params(p=p, k=k, variant=label))
        for label, f in _variants(1, [("intermediate", (-1) ** k)])
    ]


def family_thm83(params):
    _need(params, "p", "k", "r")
    p, k, r = int(params["p"]), int(params["k"]), int(params["r"])
    _b4_prime(p)
    if k < 1 or r < 0:
        raise HypothesisError("need k >= 1 and r >= 0")
    return _multiplicative("thm8.3", 4, 4, 3, p, k, r, _variants(-p * p, [("unit", 1)]))


def family_cor84(params):
    _need(params, "p", "k")
    p, k = int(params["p"]), int(params["k"])
    _b4_prime(p)
    if k < 1:
        raise HypothesisError("k must be positive")
    A = p ** (2 * k)
    B = _integral(f"({p}^{2 * k}-1)/4", Fraction(A - 1, 4))
    return [
        Progression(4, A, B, 4, Proportional(1, 0, f), "cor8.4", _params(p=p, k=k, variant=label))
        for label, f in _variants((-p * p) ** k, [("simplified", 1), ("unit3", 3)])
    ]


FAMILIES = {
    "thm6.1": family_thm61,
    "cor6.2": family_cor62,
    "thm6.3": family_thm63,
    "cor6.4": family_cor64,
    "thm8.1": family_thm81,
    "cor8.2": family_cor82,
    "thm8.3": family_thm83,
    "cor8.4": family_cor84,
}

ALIASES = {
    "b2-vanish-multi": "thm6.1",
    "b2-vanish": "cor6.2",
    "b2-multiplicative": "thm6.3",
    "b2-square-power": "cor6.4",
    "b4-vanish-multi": "thm8.1",
    "b4-vanish": "cor8.2",
    "b4-multiplicative": "thm8.3",
    "b4-square-power": "cor8.4",
}

FAMILY_KEYS = {
    "thm6.1": ("primes", "j"),
    "cor6.2": ("p", "k", "j"),
    "thm6.3": ("p", "k", "r", "t"),
    "cor6.4": ("p", "k"),
    "thm8.1": ("primes", "j"),
    "cor8.2": ("p", "k", "j"),
    "thm8.3": ("p", "k", "r"),
    "cor8.4": ("p", "k"),
}


def resolve_family(family_id: str) -> str:
    fid = ALIASES.get(family_id, family_id)
    if fid not in FAMILIES:
        raise KeyError(f"unknown family {family_id!r}; known: {', '.join(FAMILIES)}")
    return fid


def instantiate_family(family_id: str, parameters: dict) -> list[Progression]:
    fid = resolve_family(family_id)
    unknown = set(parameters) - set(FAMILY_KEYS[fid])
    if unknown:
        raise HypothesisError(f"unknown parameter(s) for {fid}: {', '.join(sorted(unknown))}")
    return FAMILIES[fid](parameters)


# -- eta-coefficient identities ---------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    modulus: int
    n_max: int
    holds: bool
    witness_n: Optional[int] = None
    lhs: Optional[int] = None
    rhs: Optional[int] = None


_IDENTITIES = {
    # id: (ell, eta spec, stride, moduli)
    "B2-c": (2, "12^2", 12, (2, 4)),
    "B4-d": (4, "4^6", 4, (4,)),
}


def coefficient_identity_check(identity: str, n_max: int = 5000) -> list[IdentityReport]:
    """Compare B_ell(n) with the eta coefficient at stride*n + 1, per modulus."""
    if identity not in _IDENTITIES:
        raise KeyError(f"unknown identity {identity!r}; known: {', '.join(_IDENTITIES)}")
    ell, spec, stride, moduli = _IDENTITIES[identity]
    expansion = q_expansion(parse_eta(spec), stride * n_max + 1)
    reports = []
    for M in moduli:
        values, _ = coefficients_at(ell, M, list(range(n_max + 1)))
        report = IdentityReport(identity, M, n_max, True)
        for n, b in enumerate(values):
            c = expansion[stride * n + 1] % M
            if b != c:
                report = IdentityReport(identity, M, n_max, False, n, b, c)
                break
        reports.append(report)
    return reports


# -- density --------------------------------------------------------------------


def density_scan(ell: int, M: int, checkpoints: Sequence[int]) -> DensityReport:
    """Fraction of 1 <= n <= X with B_ell(n) = 0 mod M at each checkpoint X."""
    xs = list(checkpoints)
    if not xs:
        raise ValueError("need at least one checkpoint")
    if any(x < 1 for x in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("checkpoints must be positive and strictly ascending")
    if xs[-1] > SERIES_CAPACITY:
        raise CapacityError(f"X={xs[-1]} exceeds series capacity {SERIES_CAPACITY}")
    s = series_table.get(ell, M, xs[-1])
    _cross_check(ell, M, xs[-1], lambda ns: [s[n] for n in ns], "series")
    zeros = np.cumsum(s.coeffs[: xs[-1] + 1] == 0)
    # n = 0 is excluded from the count
    base = int(zeros[0])
    rows = tuple((x, int(zeros[x]) - base, Fraction(int(zeros[x]) - base, x)) for x in xs)
    return DensityReport(ell, M, rows)


# -- serialization ----------------------------------------------------------------

REPORT_COLUMNS = ("family", "parameters", "A", "B", "M", "form", "verdict", "witness_n")


def reports_to_rows(reports: Sequence[VerificationReport]) -> list[tuple]:
    rows = []
    for r in reports:
        p = r.progression
        witness = "" if r.witness_n is None else r.witness_n
        rows.append((p.family, p.parameter_string(), p.A, p.B, p.M, p.form.describe(), r.verdict, witness))
    return rows


def reports_to_csv(reports: Sequence[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    w.writerows(reports_to_rows(reports))
    return buf.getvalue()


def reports_to_json(reports: Sequence[VerificationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
