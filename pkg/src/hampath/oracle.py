"""Exact reference solver: dynamic programming over vertex subsets.

Independent of the propagation machinery on purpose; it sees only the cost
matrix.  Used to check optima and to grade solver answers on small
instances.
"""

from __future__ import annotations

import math

import numpy as np

MAX_ORACLE_N = 20


class SizeLimit(Exception):
    """Instance too large for the exact dynamic program."""


def dp_oracle(C, s, e):
    """Cheapest Hamiltonian path from s to e, by subset DP.

    Returns (cost, path) with an integer cost, or (math.inf, None) when no
    such path exists.  Raises SizeLimit above MAX_ORACLE_N nodes.
    """
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    if n > MAX_ORACLE_N:
        raise SizeLimit(f"n={n} exceeds {MAX_ORACLE_N}")
    if n == 1:
        return (0, [s]) if s == e else (math.inf, None)
    if s == e:
        return math.inf, None

    full = (1 << n) - 1
    sbit = 1 << s
    bits = 1 << np.arange(n)
    idx = np.arange(n)
    dp = np.full((full + 1, n), np.inf)
    dp[sbit, s] = 0.0

    for mask in range(sbit, full + 1):
        if not mask & sbit:
            continue
        row = dp[mask]
        if not np.isfinite(row).any():
            continue
        # best extension into every v at once; u outside mask holds inf in
        # row so it cannot contribute
        ext = (row[:, None] + C).min(axis=0)
        free = (mask & bits) == 0
        vs = idx[free]
        if vs.size == 0:
            continue
        nms = mask | bits[vs]
        cur = dp[nms, vs]
        better = ext[vs] < cur
        if better.any():
            dp[nms[better], vs[better]] = ext[vs][better]

    best = dp[full, e]
    if not math.isfinite(best):
        return math.inf, None

    # walk the table backwards, preferring the smallest predecessor so the
    # reconstructed path is deterministic
    path = [e]
    mask, v = full, e
    while mask != sbit:
        pm = mask ^ (1 << v)
        target = dp[mask, v]
        for u in range(n):
            if pm & (1 << u) and math.isfinite(dp[pm, u]) \
                    and abs(dp[pm, u] + C[u, v] - target) < 1e-9:
                path.append(u)
                mask, v = pm, u
                break
        else:
            raise AssertionError("broken DP back-pointer chain")
    path.reverse()
    return int(round(best)), path
