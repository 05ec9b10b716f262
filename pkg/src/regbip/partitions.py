"""Counts of l-regular partitions and l-regular bipartitions.

The series route expands f_l^2 / f_1^2 (and f_l / f_1) with the series
engine. ``brute_force_B`` is an independent oracle: a plain knapsack DP over
admissible parts that shares no code with :mod:`regbip.series`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .series import TruncatedSeries, eta_product

ORACLE_BOUND = 10_000


@dataclass(frozen=True)
class BipartitionSeries:
    ell: int
    series: TruncatedSeries

    def __getitem__(self, n: int) -> int:
        return self.series[n]

    @property
    def truncation(self) -> int:
        return self.series.truncation

    @property
    def modulus(self) -> Optional[int]:
        return self.series.modulus


def _check_ell(ell: int):
    if ell < 2:
        raise ValueError(f"ell must be at least 2, got {ell}")


def bipartition_series(ell: int, n: int, modulus: Optional[int] = None) -> BipartitionSeries:
    """B_ell(0..n) as the expansion of f_ell^2 / f_1^2."""
    _check_ell(ell)
    return BipartitionSeries(ell, eta_product({ell: 2, 1: -2}, n, modulus))


def regular_series(ell: int, n: int, modulus: Optional[int] = None) -> TruncatedSeries:
    """b_ell(0..n) as the expansion of f_ell / f_1."""
    _check_ell(ell)
    return eta_product({ell: 1, 1: -1}, n, modulus)


# -- independent oracle -----------------------------------------------------

_oracle_cache: dict[int, list[int]] = {}
_oracle_lock = threading.Lock()


def _regular_counts(ell: int, n: int) -> list[int]:
    counts = [1] + [0] * n
    for part in range(1, n + 1):
        if part % ell == 0:
            continue
        for total in range(part, n + 1):
            counts[total] += counts[total - part]
    return counts


def brute_force_table(ell: int, n: int) -> list[int]:
    """[B_ell(0), ..., B_ell(n)] by DP and self-convolution of b_ell."""
    _check_ell(ell)
    if n > ORACLE_BOUND:
        raise ValueError(f"oracle bound is {ORACLE_BOUND}, asked for {n}")
    with _oracle_lock:
        cached = _oracle_cache.get(ell)
        if cached is not None and len(cached) > n:
            return cached[: n + 1]
    b = _regular_counts(ell, n)
    table = [sum(b[k] * b[t - k] for k in range(t + 1)) for t in range(n + 1)]
    with _oracle_lock:
        cached = _oracle_cache.get(ell)
        if cached is None or len(cached) < len(table):
            _oracle_cache[ell] = table
    return table


def brute_force_B(ell: int, n: int) -> int:
    return brute_force_table(ell, n)[n]


def brute_force_b(ell: int, n: int) -> int:
    _check_ell(ell)
    return _regular_counts(ell, n)[n]


# -- lacunary route for B_2, B_4 modulo 4 -------------------------------------
#
# Modulo 4, f_2^2/f_1^2 = f_1^2 and f_4^2/f_1^2 = f_1^6. Single coefficients
# of f_1^2 (pairs of pentagonal numbers) and of f_1^6 = (f_1^3)^2 (pairs of
# triangular numbers, Jacobi) cost O(sqrt(n)), so progressions far beyond the
# series capacity can still be checked.

LACUNARY = {2: 4, 4: 4}  # ell -> largest modulus the identity holds for


def _isqrt_vec(x: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(x.astype(np.float64))).astype(np.int64)
    r -= (r * r > x).astype(np.int64)
    r += ((r + 1) * (r + 1) <= x).astype(np.int64)
    return r


def _pentagonal_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    exps, signs = [], []
    k = 0
    while True:
        g = k * (3 * k - 1) // 2
        if g > n:
            break
        s = -1 if k % 2 else 1
        exps.append(g)
        signs.append(s)
        if k:
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                exps.append(g2)
                signs.append(s)
        k += 1
    return np.array(exps, dtype=np.int64), np.array(signs, dtype=np.int64)


def _pentagonal_value(x: np.ndarray) -> np.ndarray:
    # coefficient of q^x in (q;q)_inf
    disc = 24 * x + 1
    r = _isqrt_vec(disc)
    hit = r * r == disc
    k = np.where(r % 6 == 5, (r + 1) // 6, (r - 1) // 6)
    sign = np.where(k % 2 == 1, -1, 1)
    return np.where(hit, sign, 0)


def _jacobi_value(x: np.ndarray) -> np.ndarray:
    # coefficient of q^x in (q;q)_inf^3 = sum (-1)^k (2k+1) q^{k(k+1)/2}
    disc = 8 * x + 1
    r = _isqrt_vec(disc)
    hit = r * r == disc
    k = (r - 1) // 2
    return np.where(hit, np.where(k % 2 == 1, -1, 1) * (2 * k + 1), 0)


def euler_square_coefficient(t: int) -> int:
    """Coefficient of q^t in (q;q)_inf^2, exact."""
    exps, signs = _pentagonal_table(t)
    return int(np.dot(signs, _pentagonal_value(t - exps)))


def euler_sixth_coefficient(t: int) -> int:
    """Coefficient of q^t in (q;q)_inf^6, exact."""
    k = np.arange(0, int((2 * t) ** 0.5) + 2, dtype=np.int64)
    tri = k * (k + 1) // 2
    keep = tri <= t
    k, tri = k[keep], tri[keep]
    left = np.where(k % 2 == 1, -1, 1) * (2 * k + 1)
    return int(np.dot(left, _jacobi_value(t - tri)))


def lacunary_coefficients(ell: int, indices: Iterable[int], modulus: int) -> list[int]:
    """B_ell(n) mod ``modulus`` for ell in {2, 4} and modulus dividing 4."""
    if ell not in LACUNARY or LACUNARY[ell] % modulus:
        raise ValueError(f"no lacunary identity for ell={ell} mod {modulus}")
    one = euler_square_coefficient if ell == 2 else euler_sixth_coefficient
    return [one(int(t)) % modulus for t in indices]
