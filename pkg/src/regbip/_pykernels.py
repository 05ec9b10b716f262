"""Numpy fallback for the residue-ring kernels in ``_ckernels``.

Same contract: int64 residues in [0, m), m < 2**31, signed sparse values.
"""

import numpy as np

_I64_MAX = np.iinfo(np.int64).max


def _block(vmax, m):
    return max(1, (_I64_MAX - m) // max(1, vmax * (m - 1)))


def sparse_mul(a, exps, vals, n, m):
    out = np.zeros(n + 1, dtype=np.int64)
    la = len(a)
    block = _block(int(np.abs(vals).max(initial=1)), m)
    since = 0
    for e, v in zip(exps.tolist(), vals.tolist()):
        if e > n or v == 0:
            continue
        if since >= block:
            np.remainder(out, m, out=out)
            since = 0
        hi = min(n + 1, la + e)
        out[e:hi] += v * a[: hi - e]
        since += 1
    np.remainder(out, m, out=out)
    return out


def sparse_div(a, exps, vals, n, m, c0inv):
    out = np.zeros(n + 1, dtype=np.int64)
    la = len(a)
    nt = len(exps)
    vmax = int(np.abs(vals).max(initial=1))
    if nt * vmax * (m - 1) + m < _I64_MAX:
        counts = np.searchsorted(exps, np.arange(n + 1), side="right")
        for i in range(n + 1):
            k = counts[i]
            acc = int(a[i]) if i < la else 0
            if k:
                acc -= int(np.dot(vals[:k], out[i - exps[:k]]))
            out[i] = acc % m * c0inv % m
        return out
    ex, vs = exps.tolist(), vals.tolist()
    res = [0] * (n + 1)
    for i in range(n + 1):
        acc = int(a[i]) if i < la else 0
        for e, v in zip(ex, vs):
            if e > i:
                break
            acc -= v * res[i - e]
        res[i] = acc % m * c0inv % m
    return np.array(res, dtype=np.int64)


def dense_mul(a, b, n, m):
    a = a[: n + 1]
    b = b[: n + 1]
    size = min(len(a), len(b))
    if size * (m - 1) ** 2 < _I64_MAX:
        out = np.convolve(a, b)[: n + 1] % m
    elif size * (1 << 16) * m < _I64_MAX:
        lo, hi = a & 0xFFFF, a >> 16
        c_lo = np.convolve(lo, b)[: n + 1] % m
        c_hi = np.convolve(hi, b)[: n + 1] % m
        out = (c_hi * (1 << 16) % m + c_lo) % m
    else:
        out = np.convolve(a.astype(object), b.astype(object))[: n + 1] % m
        out = out.astype(np.int64)
    if len(out) < n + 1:
        out = np.concatenate([out, np.zeros(n + 1 - len(out), dtype=np.int64)])
    return out.astype(np.int64)


def dense_inv(a, n, m, c0inv):
    # Newton iteration g <- g (2 - a g), doubling the precision each step.
    g = np.array([c0inv % m], dtype=np.int64)
    prec = 1
    while prec < n + 1:
        prec = min(2 * prec, n + 1)
        ag = dense_mul(a[:prec], g, prec - 1, m)
        corr = (-ag) % m
        corr[0] = (corr[0] + 2) % m
        g = dense_mul(g, corr, prec - 1, m)
    return g[: n + 1]
