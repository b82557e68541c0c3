"""Pure numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built, and as the reference the extension is tested
against.
"""

from __future__ import annotations

import math

import numpy as np


def sieve_segment(lo: int, hi: int, base_primes: np.ndarray) -> np.ndarray:
    """Primality flags for the odd numbers of ``[lo, hi)``.

    Entry ``i`` describes ``(lo | 1) + 2*i``. ``base_primes`` must hold every
    odd prime up to ``isqrt(hi - 1)``.
    """
    first = lo | 1
    size = max(0, (hi - first + 1) // 2)
    flags = np.ones(size, dtype=np.uint8)
    if size == 0:
        return flags
    if first == 1:
        flags[0] = 0
    last = first + 2 * (size - 1)
    for p in base_primes:
        p = int(p)
        pp = p * p
        if pp > last:
            break
        start = max(pp, (first + p - 1) // p * p)
        if start % 2 == 0:
            start += p
        if start > last:
            continue
        flags[(start - first) // 2 :: p] = 0
    return flags


def log_sum(values: np.ndarray) -> float:
    """Correctly rounded sum of ``ln(v)``."""
    if len(values) == 0:
        return 0.0
    return math.fsum(np.log(np.asarray(values, dtype=np.float64)).tolist())


def weighted_log_sum(values: np.ndarray, weights: np.ndarray) -> float:
    if len(values) == 0:
        return 0.0
    logs = np.log(np.asarray(values, dtype=np.float64)) * weights
    return math.fsum(logs.tolist())


def count_runs(
    primes: np.ndarray,
    m: int,
    q: int,
    a: int,
    max_gap: int,
    start_lo: int,
    start_hi: int,
    max_witness: int,
):
    """Count runs of ``m + 1`` consecutive entries of ``primes``.

    A run starts at index ``i`` with ``start_lo < primes[i] <= start_hi``;
    all entries ``i .. i+m`` are ``a (mod q)`` and
    ``primes[i+m] - primes[i] <= max_gap``. Returns ``(count, witnesses)``
    where witnesses are the first ``max_witness`` ``(start, gap)`` pairs.
    """
    n = len(primes) - m
    if n <= 0:
        return 0, []
    p = np.asarray(primes, dtype=np.int64)
    good = (p % q) == (a % q)
    # run of m+1 good entries starting at i
    csum = np.concatenate(([0], np.cumsum(good, dtype=np.int64)))
    allgood = (csum[m + 1 :] - csum[: n]) == m + 1
    gaps = p[m:] - p[:n]
    starts = p[:n]
    hit = allgood & (gaps <= max_gap) & (starts > start_lo) & (starts <= start_hi)
    idx = np.flatnonzero(hit)
    witnesses = [(int(starts[i]), int(gaps[i])) for i in idx[:max_witness]]
    return int(len(idx)), witnesses


def mark_rough(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Flags for ``n`` in ``[lo, hi)``: 1 iff no entry of ``primes`` divides ``n``."""
    size = max(0, hi - lo)
    flags = np.ones(size, dtype=np.uint8)
    for p in primes:
        p = int(p)
        start = (lo + p - 1) // p * p
        if start < hi:
            flags[start - lo :: p] = 0
    return flags


def char_sum(
    residues: np.ndarray,
    logs: np.ndarray,
    turns: np.ndarray,
    cos_tab: np.ndarray,
    sin_tab: np.ndarray,
) -> complex:
    """Sum of ``logs[j] * root[turns[residues[j]]]``.

    ``root[t] = cos_tab[t] + i*sin_tab[t]``. Entries whose turn is negative
    (character value zero) are skipped.
    """
    t = turns[residues]
    keep = t >= 0
    if not keep.any():
        return 0j
    t = t[keep]
    w = logs[keep]
    re = math.fsum((w * cos_tab[t]).tolist())
    im = math.fsum((w * sin_tab[t]).tolist())
    return complex(re, im)
