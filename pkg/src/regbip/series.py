"""Truncated power series over Z or Z/mZ.

A :class:`TruncatedSeries` holds the coefficients of q^0..q^N. Residues are
stored canonically in [0, m). Binary operations truncate to the shorter
operand; nothing is ever extrapolated past a truncation.

Moduli below 2**31 are stored as int64 and routed through the compiled (or
numpy fallback) kernels; exact and larger-modulus series use Python integers.
"""

from __future__ import annotations

import builtins
import math
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .kernels import SMALL_MODULUS


class ModulusMismatch(ValueError):
    pass


class NonUnitError(ValueError):
    pass


def _object_array(values) -> np.ndarray:
    values = list(values)
    arr = np.empty(len(values), dtype=object)
    arr[:] = [int(v) for v in values]
    return arr


class TruncatedSeries:
    """Coefficients of a power series known exactly up to q^truncation."""

    __slots__ = ("modulus", "coeffs")

    def __init__(self, coeffs: Iterable[int], modulus: Optional[int] = None):
        if modulus is not None and modulus < 2:
            raise ValueError("modulus must be at least 2")
        if (
            isinstance(coeffs, np.ndarray)
            and coeffs.dtype.kind == "i"
            and modulus is not None
            and modulus < SMALL_MODULUS
        ):
            raw = np.remainder(coeffs.astype(np.int64), modulus)
            self._set(raw, modulus)
            return
        if isinstance(coeffs, np.ndarray) and coeffs.dtype != object:
            raw = coeffs.astype(object)
        else:
            raw = _object_array(coeffs)
        if len(raw) == 0:
            raise ValueError("a truncated series needs at least one coefficient")
        if modulus is not None:
            raw = raw % modulus
            if modulus < SMALL_MODULUS:
                raw = raw.astype(np.int64)
        self._set(raw, modulus)

    def _set(self, arr, modulus):
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    @classmethod
    def _wrap(cls, arr: np.ndarray, modulus: Optional[int]) -> TruncatedSeries:
        # arr must already be canonical for the modulus.
        obj = cls.__new__(cls)
        obj._set(arr, modulus)
        return obj

    @classmethod
    def zero(cls, n: int, modulus: Optional[int] = None) -> TruncatedSeries:
        return cls([0] * (n + 1), modulus)

    @classmethod
    def one(cls, n: int, modulus: Optional[int] = None) -> TruncatedSeries:
        return cls([1] + [0] * n, modulus)

    @classmethod
    def monomial(cls, k: int, n: int, modulus: Optional[int] = None, c: int = 1) -> TruncatedSeries:
        vals = [0] * (n + 1)
        if k <= n:
            vals[k] = c
        return cls(vals, modulus)

    # -- accessors -------------------------------------------------------

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @property
    def small(self) -> bool:
        return self.coeffs.dtype == np.int64

    def __getitem__(self, i: int) -> int:
        if i < 0 or i > self.truncation:
            raise IndexError(f"exponent {i} outside [0, {self.truncation}]")
        return int(self.coeffs[i])

    def __len__(self):
        return len(self.coeffs)

    def tolist(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.coeffs != 0)]

    def is_zero(self) -> bool:
        return not np.any(self.coeffs != 0)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.truncation == other.truncation
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash((self.modulus, tuple(self.tolist())))

    def __repr__(self):
        head = self.tolist()[:8]
        ring = "Z" if self.modulus is None else f"Z/{self.modulus}"
        return f"TruncatedSeries({head}{'...' if self.truncation >= 8 else ''}, N={self.truncation}, {ring})"

    def agrees(self, other: TruncatedSeries, upto: Optional[int] = None) -> bool:
        """Coefficientwise equality over the common prefix (or up to ``upto``)."""
        _check(self, other)
        n = min(self.truncation, other.truncation)
        if upto is not None:
            n = min(n, upto)
        return bool(np.all(self.coeffs[: n + 1] == other.coeffs[: n + 1]))

    # -- structural ------------------------------------------------------

    def truncate(self, n: int) -> TruncatedSeries:
        if n > self.truncation:
            raise ValueError(f"cannot extend truncation {self.truncation} to {n}")
        return TruncatedSeries._wrap(self.coeffs[: n + 1].copy(), self.modulus)

    def reduce(self, m: int) -> TruncatedSeries:
        if self.modulus is not None and self.modulus % m:
            raise ModulusMismatch(f"cannot reduce mod {self.modulus} to mod {m}")
        return TruncatedSeries(self.coeffs, m)

    def shift(self, s: int, n: Optional[int] = None) -> TruncatedSeries:
        """Multiply by q^s (s >= 0); result valid up to truncation + s."""
        if s < 0:
            raise ValueError("negative shifts are not power series")
        top = self.truncation + s if n is None else n
        if top > self.truncation + s:
            raise ValueError("shift would extrapolate")
        out = np.zeros(top + 1, dtype=self.coeffs.dtype)
        if self.coeffs.dtype == object:
            out[:] = 0
        if s <= top:
            out[s:] = self.coeffs[: top + 1 - s]
        return TruncatedSeries._wrap(out, self.modulus)

    def dilate(self, k: int, n: Optional[int] = None) -> TruncatedSeries:
        """Substitute q -> q^k. Known up to k*(N+1)-1."""
        if k < 1:
            raise ValueError("dilation factor must be positive")
        limit = k * (self.truncation + 1) - 1
        top = limit if n is None else n
        if top > limit:
            raise ValueError("dilation would extrapolate")
        out = np.zeros(top + 1, dtype=self.coeffs.dtype)
        if self.coeffs.dtype == object:
            out[:] = 0
        src = self.coeffs[: top // k + 1]
        out[: k * len(src) : k] = src
        return TruncatedSeries._wrap(out, self.modulus)

    def sparse_terms(self) -> tuple[np.ndarray, list[int]]:
        idx = np.flatnonzero(self.coeffs != 0)
        return idx.astype(np.int64), [int(self.coeffs[i]) for i in idx]

    def nnz(self) -> int:
        return int(np.count_nonzero(self.coeffs != 0))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        _check(self, other)
        n = min(self.truncation, other.truncation)
        out = self.coeffs[: n + 1] - other.coeffs[: n + 1]
        return _finish(out, self.modulus)

    def __neg__(self):
        return _finish(-self.coeffs, self.modulus)

    def scale(self, c: int) -> TruncatedSeries:
        if self.small:
            return _finish(self.coeffs * (int(c) % self.modulus), self.modulus)
        return _finish(self.coeffs * int(c), self.modulus)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return pow_series(self, e)


def _check(a: TruncatedSeries, b: TruncatedSeries):
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"modulus mismatch: {a.modulus} vs {b.modulus}")


def _finish(arr: np.ndarray, modulus: Optional[int]) -> TruncatedSeries:
    if modulus is not None:
        arr = arr % modulus
    return TruncatedSeries._wrap(arr, modulus)


def _centre(v: int, m: int) -> int:
    v %= m
    return v - m if v > m // 2 else v


def _sparse_worth_it(nnz: int, n: int) -> bool:
    return nnz * 4 <= n + 1


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check(a, b)
    n = min(a.truncation, b.truncation)
    return _finish(a.coeffs[: n + 1] + b.coeffs[: n + 1], a.modulus)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the shorter operand."""
    _check(a, b)
    n = min(a.truncation, b.truncation)
    m = a.modulus
    if b.nnz() > a.nnz():
        a, b = b, a
    # b is now the sparser factor
    if a.small:
        if _sparse_worth_it(b.nnz(), n):
            exps, vals = b.truncate(n).sparse_terms()
            vals = np.array([_centre(v, m) for v in vals], dtype=np.int64)
            out = kernels.active.sparse_mul(a.coeffs[: n + 1], exps, vals, n, m)
        else:
            out = kernels.active.dense_mul(a.coeffs[: n + 1], b.coeffs[: n + 1], n, m)
        return TruncatedSeries._wrap(out, m)
    if _sparse_worth_it(b.nnz(), n):
        exps, vals = b.truncate(n).sparse_terms()
        out = np.empty(n + 1, dtype=object)
        out[:] = 0
        for e, v in zip(exps.tolist(), vals):
            out[e:] += v * a.coeffs[: n + 1 - e]
    else:
        out = np.convolve(a.coeffs[: n + 1], b.coeffs[: n + 1])[: n + 1]
    return _finish(out, m)


def _unit_inverse(c0: int, m: Optional[int]) -> int:
    if m is None:
        if c0 not in (1, -1):
            raise NonUnitError(f"constant term {c0} is not a unit in Z")
        return c0
    if math.gcd(c0, m) != 1:
        raise NonUnitError(f"constant term {c0} is not a unit mod {m}")
    return builtins.pow(c0, -1, m)


def divide(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """a / b for b with unit constant term; truncation min(Na, Nb)."""
    _check(a, b)
    n = min(a.truncation, b.truncation)
    m = a.modulus
    c0inv = _unit_inverse(b[0], m)
    if not _sparse_worth_it(b.nnz(), n):
        return mul(a, invert(b))
    exps, vals = b.truncate(n).sparse_terms()
    keep = exps > 0
    exps = exps[keep]
    vals = [v for v, k in zip(vals, keep.tolist()) if k]
    if a.small:
        cvals = np.array([_centre(v, m) for v in vals], dtype=np.int64)
        out = kernels.active.sparse_div(a.coeffs[: n + 1], exps, cvals, n, m, c0inv)
        return TruncatedSeries._wrap(out, m)
    ex = exps.tolist()
    src = a.coeffs
    res = [0] * (n + 1)
    for i in range(n + 1):
        acc = int(src[i])
        for e, v in zip(ex, vals):
            if e > i:
                break
            acc -= v * res[i - e]
        acc *= c0inv
        res[i] = acc % m if m is not None else acc
    return TruncatedSeries(res, m)


def invert(a: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse up to truncation; constant term must be a unit."""
    n = a.truncation
    m = a.modulus
    c0inv = _unit_inverse(a[0], m)
    if _sparse_worth_it(a.nnz(), n):
        return divide(TruncatedSeries.one(n, m), a)
    if a.small:
        out = kernels.active.dense_inv(a.coeffs, n, m, c0inv)
        return TruncatedSeries._wrap(out, m)
    # Newton iteration over Python integers
    g = _object_array([c0inv])
    prec = 1
    while prec < n + 1:
        prec = min(2 * prec, n + 1)
        ag = np.convolve(a.coeffs[:prec], g)[:prec]
        corr = -ag
        corr[0] += 2
        g = np.convolve(g, corr)[:prec]
        if m is not None:
            g = g % m
    return _finish(g[: n + 1], m)


def pow_series(a: TruncatedSeries, e: int) -> TruncatedSeries:
    """a**e by repeated squaring; equals the e-fold product."""
    if e < 0:
        raise ValueError("use invert for negative powers")
    result = TruncatedSeries.one(a.truncation, a.modulus)
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


# Short alias; ``pow`` shadows the builtin only inside callers that import it.
pow = pow_series  # noqa: A001


def pentagonal_terms(n: int) -> list[tuple[int, int]]:
    """(exponent, sign) pairs of (q;q)_inf up to q^n, ascending."""
    terms = [(0, 1)]
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > n:
            break
        s = -1 if k % 2 else 1
        terms.append((g1, s))
        g2 = k * (3 * k + 1) // 2
        if g2 <= n:
            terms.append((g2, s))
        k += 1
    return terms


def pentagonal_series(n: int, modulus: Optional[int] = None) -> TruncatedSeries:
    vals = [0] * (n + 1)
    for e, s in pentagonal_terms(n):
        vals[e] = s
    return TruncatedSeries(vals, modulus)


# Beyond this many repeated sparse passes, binary powering is cheaper.
_SPARSE_POWER_LIMIT = 8


def euler_power(e: int, n: int, modulus: Optional[int] = None) -> TruncatedSeries:
    """(q;q)_inf ** e truncated at q^n, for any integer e."""
    if e == 0:
        return TruncatedSeries.one(n, modulus)
    base = pentagonal_series(n, modulus)
    if abs(e) <= _SPARSE_POWER_LIMIT:
        out = TruncatedSeries.one(n, modulus)
        for _ in range(abs(e)):
            out = mul(out, base) if e > 0 else divide(out, base)
        return out
    out = pow_series(base, abs(e))
    return out if e > 0 else invert(out)


def euler_product(scale: int, exponent: int, n: int, modulus: Optional[int] = None) -> TruncatedSeries:
    """(q^scale; q^scale)_inf ** exponent truncated at q^n."""
    if scale < 1:
        raise ValueError("scale must be positive")
    return euler_power(exponent, n // scale, modulus).dilate(scale, n)


def eta_product(
    terms: dict[int, int], n: int, modulus: Optional[int] = None
) -> TruncatedSeries:
    """prod over (scale, exponent) of (q^scale; q^scale)_inf ** exponent, to q^n.

    Small exponents are applied as repeated sparse passes with the dilated
    pentagonal series, which keeps the cost near N * sqrt(N) per pass. Large
    exponents are expanded in the dilated variable first and multiplied in
    densely.
    """
    out = TruncatedSeries.one(n, modulus)
    passes = []
    for scale, e in sorted(terms.items()):
        if e == 0:
            continue
        if abs(e) <= _SPARSE_POWER_LIMIT:
            passes.append((scale, e))
        else:
            out = mul(out, euler_product(scale, e, n, modulus))
    for scale, e in passes:
        base = pentagonal_series(n // scale, modulus).dilate(scale, n)
        for _ in range(abs(e)):
            out = mul(out, base) if e > 0 else divide(out, base)
    return out
