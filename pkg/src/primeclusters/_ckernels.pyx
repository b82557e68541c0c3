# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Mirrors ``_pykernels`` function for function. Loops run without the GIL so
segment workers on a thread pool proceed in parallel.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log
from libc.string cimport memcpy
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()

# Odd-index presieve pattern for 3, 5, 7, 11, 13: entry j describes 2j + 1.
cdef enum:
    WHEEL = 15015
cdef uint8_t[WHEEL] _pattern
cdef int64_t[5] _wheel_primes = [3, 5, 7, 11, 13]


cdef void _build_pattern():
    cdef int64_t j, k
    for j in range(WHEEL):
        _pattern[j] = 1
        for k in range(5):
            if (2 * j + 1) % _wheel_primes[k] == 0:
                _pattern[j] = 0
                break


_build_pattern()


def sieve_segment(int64_t lo, int64_t hi, const int64_t[::1] base_primes):
    cdef int64_t first = lo | 1
    cdef int64_t size = (hi - first + 1) // 2
    if size < 0:
        size = 0
    out = np.empty(size, dtype=np.uint8)
    if size == 0:
        return out
    cdef uint8_t[::1] flags = out
    cdef int64_t last = first + 2 * (size - 1)
    cdef int64_t offset = ((first - 1) // 2) % WHEEL
    cdef int64_t pos = 0, chunk, k, p, pp, start, i
    cdef Py_ssize_t nb = base_primes.shape[0]
    with nogil:
        # tile the wheel pattern
        while pos < size:
            chunk = WHEEL - offset
            if chunk > size - pos:
                chunk = size - pos
            memcpy(&flags[pos], &_pattern[offset], chunk)
            pos += chunk
            offset = 0
        # wheel primes are prime themselves
        for k in range(5):
            p = _wheel_primes[k]
            if first <= p <= last:
                flags[(p - first) // 2] = 1
        if first == 1:
            flags[0] = 0
        for k in range(nb):
            p = base_primes[k]
            if p <= 13:
                continue
            pp = p * p
            if pp > last:
                break
            start = (first + p - 1) // p * p
            if start < pp:
                start = pp
            if (start & 1) == 0:
                start += p
            i = (start - first) // 2
            while i < size:
                flags[i] = 0
                i += p
    return out


def log_sum(const int64_t[::1] values):
    """Kahan-compensated sum of ln(v)."""
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i, n = values.shape[0]
    with nogil:
        for i in range(n):
            y = log(<double>values[i]) - c
            t = s + y
            c = (t - s) - y
            s = t
    return s


def weighted_log_sum(const int64_t[::1] values, const double[::1] weights):
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i, n = values.shape[0]
    with nogil:
        for i in range(n):
            y = log(<double>values[i]) * weights[i] - c
            t = s + y
            c = (t - s) - y
            s = t
    return s


def count_runs(const int64_t[::1] primes, int64_t m, int64_t q, int64_t a,
               int64_t max_gap, int64_t start_lo, int64_t start_hi,
               int64_t max_witness):
    cdef Py_ssize_t n = primes.shape[0] - m
    if n <= 0:
        return 0, []
    cdef int64_t target = a % q
    if target < 0:
        target += q
    cdef int64_t count = 0, streak = 0, i, j, p
    cdef int64_t nwit = 0
    wit_start = np.empty(max_witness if max_witness > 0 else 1, dtype=np.int64)
    wit_gap = np.empty(max_witness if max_witness > 0 else 1, dtype=np.int64)
    cdef int64_t[::1] ws = wit_start
    cdef int64_t[::1] wg = wit_gap
    cdef Py_ssize_t total = primes.shape[0]
    with nogil:
        # streak = number of consecutive good entries ending at index j
        # a run starting at i is good iff the streak at i + m reaches m + 1
        j = 0
        while j < m and j < total:
            if primes[j] % q == target:
                streak += 1
            else:
                streak = 0
            j += 1
        for i in range(n):
            j = i + m
            if primes[j] % q == target:
                streak += 1
            else:
                streak = 0
            p = primes[i]
            if streak >= m + 1 and p > start_lo and p <= start_hi \
                    and primes[j] - p <= max_gap:
                if nwit < max_witness:
                    ws[nwit] = p
                    wg[nwit] = primes[j] - p
                    nwit += 1
                count += 1
    return count, [(int(ws[k]), int(wg[k])) for k in range(nwit)]


def mark_rough(int64_t lo, int64_t hi, const int64_t[::1] primes):
    cdef int64_t size = hi - lo
    if size < 0:
        size = 0
    out = np.ones(size, dtype=np.uint8)
    cdef uint8_t[::1] flags = out
    cdef Py_ssize_t k, nb = primes.shape[0]
    cdef int64_t p, i
    with nogil:
        for k in range(nb):
            p = primes[k]
            i = (lo + p - 1) // p * p - lo
            while i < size:
                flags[i] = 0
                i += p
    return out


def char_sum(const int64_t[::1] residues, const double[::1] logs,
             const int64_t[::1] turns, const double[::1] cos_tab,
             const double[::1] sin_tab):
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0, y, t, w
    cdef Py_ssize_t j, n = residues.shape[0]
    cdef int64_t tv
    with nogil:
        for j in range(n):
            tv = turns[residues[j]]
            if tv < 0:
                continue
            w = logs[j]
            y = w * cos_tab[tv] - cr
            t = sr + y
            cr = (t - sr) - y
            sr = t
            y = w * sin_tab[tv] - ci
            t = si + y
            ci = (t - si) - y
            si = t
    return complex(sr, si)
