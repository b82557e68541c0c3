"""Segmented prime generation and prime counting functions.

Primes come out of an odd-only segmented sieve (see :mod:`._backend` for the
kernel). Everything that sums logarithms works segment by segment with a
compensated kernel and combines per-segment partials with ``math.fsum``, so
results do not depend on segment size or thread count beyond the last ulp.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _backend
from .arith import phi
from .errors import BudgetExceeded, DomainError

MAX_X = 2**63 - 1
DEFAULT_SEGMENT = 1 << 20
_BASE_CACHE_LIMIT = 1 << 25

_settings = {"threads": 1, "segment": DEFAULT_SEGMENT, "cache_path": None}


def configure(threads: int | None = None, segment: int | None = None, cache_path=None):
    """Set process-wide defaults for worker threads, segment span and cache file."""
    if threads is not None:
        if threads < 1:
            raise DomainError("threads must be >= 1")
        _settings["threads"] = int(threads)
    if segment is not None:
        if segment < 16:
            raise DomainError("segment size must be >= 16")
        _settings["segment"] = int(segment)
    if cache_path is not None:
        _settings["cache_path"] = os.fspath(cache_path) if cache_path else None


# -- base primes -------------------------------------------------------------

def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


_CACHE_MAGIC = b"PCPT"
_CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHHQQ")


def write_prime_cache(path, limit: int) -> int:
    """Store the primes up to ``limit`` as little-endian 64-bit deltas.

    Header: magic ``PCPT``, u16 version, u16 reserved, u64 limit, u64 count.
    Returns the number of primes written.
    """
    primes = _simple_sieve(limit)
    deltas = np.diff(primes, prepend=0).astype("<u8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, 0, limit, len(primes)))
        fh.write(deltas.tobytes())
    return len(primes)


def read_prime_cache(path) -> tuple[int, np.ndarray]:
    """Return ``(limit, primes)`` from a cache file; raises ``ValueError`` if invalid."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError("truncated prime cache header")
        magic, version, _, limit, count = _HEADER.unpack(head)
        if magic != _CACHE_MAGIC or version != _CACHE_VERSION:
            raise ValueError("not a prime cache file or unsupported version")
        body = np.frombuffer(fh.read(8 * count), dtype="<u8")
    if len(body) != count:
        raise ValueError("truncated prime cache body")
    return int(limit), np.cumsum(body).astype(np.int64)


@lru_cache(maxsize=8)
def _base_from_cache(path: str, limit: int) -> np.ndarray | None:
    try:
        cached_limit, primes = read_prime_cache(path)
    except (OSError, ValueError):
        return None
    if cached_limit < limit:
        return None
    return primes[: np.searchsorted(primes, limit, side="right")]


@lru_cache(maxsize=4)
def _base_primes_cached(limit: int) -> np.ndarray:
    path = _settings["cache_path"]
    if path:
        hit = _base_from_cache(path, limit)
        if hit is not None:
            return hit
    return _simple_sieve(limit)


def base_primes(limit: int) -> np.ndarray:
    """All primes ``<= limit`` (in-memory up to ``2**25``)."""
    if limit > _BASE_CACHE_LIMIT:
        raise BudgetExceeded(f"base prime table above {_BASE_CACHE_LIMIT} is streamed, not stored")
    # round up so nearby requests share one cached table
    key = 1 << max(10, (max(limit, 2) - 1).bit_length())
    primes = _base_primes_cached(min(key, _BASE_CACHE_LIMIT))
    return primes[: np.searchsorted(primes, limit, side="right")]


def _odd(primes: np.ndarray) -> np.ndarray:
    return primes[1:] if len(primes) and primes[0] == 2 else primes


# -- segments ----------------------------------------------------------------

@dataclass(frozen=True)
class PrimeSegment:
    """Sieved block ``[lo, hi)``; ``flags[i]`` is the primality of ``(lo | 1) + 2*i``."""

    lo: int
    hi: int
    flags: np.ndarray = field(repr=False, compare=False)

    def primes(self) -> np.ndarray:
        odd = (self.lo | 1) + 2 * np.flatnonzero(self.flags).astype(np.int64)
        if self.lo <= 2 < self.hi:
            return np.concatenate((np.array([2], dtype=np.int64), odd))
        return odd

    def count(self) -> int:
        return int(np.count_nonzero(self.flags)) + (1 if self.lo <= 2 < self.hi else 0)


def sieve_segment(lo: int, hi: int) -> PrimeSegment:
    if lo < 0 or hi < lo:
        raise DomainError(f"need 0 <= lo <= hi, got [{lo}, {hi})")
    if hi > MAX_X:
        raise DomainError("hi exceeds 2**63 - 1")
    root = math.isqrt(max(hi - 1, 0))
    k = _backend.kernels()
    if root <= _BASE_CACHE_LIMIT:
        flags = k.sieve_segment(lo, hi, _odd(base_primes(root)))
    else:
        flags = k.sieve_segment(lo, hi, _odd(base_primes(_BASE_CACHE_LIMIT)))
        # stream larger base primes in blocks; each pass only clears flags
        step = 1 << 24
        start = _BASE_CACHE_LIMIT + 1
        while start <= root:
            stop = min(start + step, root + 1)
            chunk = sieve_segment(start, stop).primes()
            if len(chunk):
                flags &= k.sieve_segment(lo, hi, chunk)
            start = stop
    return PrimeSegment(lo, hi, flags)


def _bounds(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(s + size, hi)) for s in range(lo, hi, size)]


def iter_segments(
    lo: int, hi: int, segment_size: int | None = None, threads: int | None = None
) -> Iterator[PrimeSegment]:
    """Yield sieved segments covering ``[lo, hi)`` in ascending order."""
    if lo < 0 or hi < lo:
        raise DomainError(f"need 0 <= lo <= hi, got [{lo}, {hi})")
    size = segment_size or _settings["segment"]
    workers = threads or _settings["threads"]
    spans = _bounds(lo, hi, size)
    if workers == 1 or len(spans) < 2:
        for s, e in spans:
            yield sieve_segment(s, e)
        return
    # keep a bounded window of work in flight; map preserves order
    with ThreadPoolExecutor(max_workers=workers) as pool:
        window = 4 * workers
        for i in range(0, len(spans), window):
            batch = spans[i : i + window]
            yield from pool.map(lambda b: sieve_segment(*b), batch)


def _map_segments(fn, lo: int, hi: int, segment_size=None, threads=None) -> list:
    """Apply ``fn`` to every segment, returning results in segment order."""
    size = segment_size or _settings["segment"]
    workers = threads or _settings["threads"]
    spans = _bounds(lo, hi, size)
    task = lambda b: fn(sieve_segment(*b))
    if workers == 1 or len(spans) < 2:
        return [task(b) for b in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, spans))


# -- primes and counts -------------------------------------------------------

def primes_in(lo: int, hi: int, segment_size: int | None = None, threads: int | None = None) -> np.ndarray:
    """Ascending ``int64`` array of the primes in ``[lo, hi)``."""
    if hi < lo:
        raise DomainError(f"hi < lo: [{lo}, {hi})")
    parts = _map_segments(PrimeSegment.primes, lo, hi, segment_size, threads)
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


def _check_x(x) -> int:
    x = math.floor(x)
    if x > MAX_X:
        raise DomainError("x exceeds 2**63 - 1")
    return x


def pi(x) -> int:
    """Number of primes ``<= x``."""
    x = _check_x(x)
    if x < 2:
        return 0
    return sum(_map_segments(PrimeSegment.count, 0, x + 1))


def _check_progression(q, a) -> None:
    if not isinstance(q, (int, np.integer)) or not isinstance(a, (int, np.integer)):
        raise DomainError(f"q and a must be integers, got {q!r}, {a!r}")
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")


def pi_ap(x, q: int, a: int) -> int:
    """Number of primes ``p <= x`` with ``p = a (mod q)``."""
    _check_progression(q, a)
    x = _check_x(x)
    if x < 2:
        return 0
    if q == 1:
        return pi(x)
    r = a % q

    def count(seg: PrimeSegment) -> int:
        return int(np.count_nonzero(seg.primes() % q == r))

    return sum(_map_segments(count, 0, x + 1))


def theta(x) -> float:
    """Sum of ``ln p`` over primes ``p <= x``."""
    x = _check_x(x)
    if x < 2:
        return 0.0
    k = _backend.kernels()
    return math.fsum(_map_segments(lambda s: k.log_sum(s.primes()), 0, x + 1))


def _higher_powers(x: int) -> tuple[np.ndarray, np.ndarray]:
    """Prime powers ``p**j <= x`` with ``j >= 2`` and their ``ln p``."""
    vals: list[int] = []
    logs: list[float] = []
    for p in base_primes(math.isqrt(x)).tolist():
        lp = math.log(p)
        v = p * p
        while v <= x:
            vals.append(v)
            logs.append(lp)
            v *= p
    order = np.argsort(vals, kind="stable")
    return np.asarray(vals, dtype=np.int64)[order], np.asarray(logs)[order]


def psi(x) -> float:
    """Chebyshev's function: sum of the von Mangoldt function over ``n <= x``."""
    x = _check_x(x)
    if x < 2:
        return 0.0
    _, logs = _higher_powers(x)
    return math.fsum([theta(x), math.fsum(logs.tolist())])


def psi_ap(x, q: int, a: int) -> float:
    """Von Mangoldt sum over ``n <= x`` with ``n = a (mod q)``."""
    _check_progression(q, a)
    x = _check_x(x)
    if x < 2:
        return 0.0
    if q == 1:
        return psi(x)
    r = a % q
    k = _backend.kernels()

    def part(seg: PrimeSegment) -> float:
        p = seg.primes()
        return k.log_sum(np.ascontiguousarray(p[p % q == r]))

    vals, logs = _higher_powers(x)
    tail = math.fsum(logs[vals % q == r].tolist())
    return math.fsum(_map_segments(part, 0, x + 1) + [tail])


def prime_powers(x) -> tuple[np.ndarray, np.ndarray]:
    """All prime powers ``n <= x`` in ascending order with ``Lambda(n)``."""
    x = _check_x(x)
    if x < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    primes = primes_in(0, x + 1)
    hv, hl = _higher_powers(x)
    vals = np.concatenate((primes, hv))
    logs = np.concatenate((np.log(primes.astype(np.float64)), hl))
    order = np.argsort(vals, kind="stable")
    return vals[order], logs[order]


def mertens_product(x) -> float:
    """``prod_{p <= x} (1 - 1/p)^(-1)``."""
    x = _check_x(x)
    if x < 2:
        return 1.0
    p = primes_in(0, x + 1).astype(np.float64)
    return math.exp(math.fsum((-np.log1p(-1.0 / p)).tolist()))


# -- logarithmic integral ----------------------------------------------------

def li(x: float, tol: float = 1e-13) -> float:
    """Offset logarithmic integral ``int_2^x dt / ln t``.

    Adaptive Simpson after substituting ``t = 2 (x/2)^u``, which keeps both
    endpoints exact (``u`` in ``[0, 1]``); leaves carry a Richardson
    correction and are combined with ``math.fsum``. ``tol`` is relative to
    ``x / ln x``. Accuracy is about one ulp of the result.
    """
    x = float(x)
    if not x >= 2.0:
        raise DomainError(f"li needs x >= 2, got {x}")
    if x == 2.0:
        return 0.0
    ratio = x / 2.0
    span = math.log(ratio)
    ln2 = math.log(2.0)

    def f(u: float) -> float:
        return 2.0 * ratio**u * span / (ln2 + u * span)

    eps = tol * max(1.0, x / math.log(x))
    panels = 32
    leaves: list[float] = []
    stack = []
    for i in range(panels):
        lo = i / panels
        hi = (i + 1) / panels
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        stack.append((lo, hi, flo, fmid, fhi, (hi - lo) / 6 * (flo + 4 * fmid + fhi), eps / panels, 0))
    while stack:
        lo, hi, flo, fmid, fhi, whole, e, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6 * (fmid + 4 * frm + fhi)
        delta = left + right - whole
        # below a few ulp the difference is rounding noise
        if abs(delta) <= max(15 * e, 4e-15 * abs(whole)) or depth >= 30:
            leaves.append(left + right + delta / 15)
        else:
            stack.append((lo, mid, flo, flm, fmid, left, e / 2, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, e / 2, depth + 1))
    return math.fsum(leaves)


# -- rough numbers -----------------------------------------------------------

def phi_rough(x, z) -> int:
    """Number of ``1 <= n <= x`` whose least prime factor exceeds ``z``."""
    x = _check_x(x)
    if z < 2:
        raise DomainError(f"z must be >= 2, got {z}")
    if x > 10**9:
        raise BudgetExceeded("phi_rough is limited to x <= 10**9")
    if x < 1:
        return 0
    zi = math.floor(z)
    if zi >= x:
        return 1
    root = math.isqrt(x)
    if zi >= root:
        # survivors are 1 and the primes in (z, x]
        return 1 + pi(x) - pi(zi)
    sieving = base_primes(zi)
    k = _backend.kernels()
    size = _settings["segment"]
    total = 0
    for s, e in _bounds(1, x + 1, size):
        total += int(np.count_nonzero(k.mark_rough(s, e, sieving)))
    # the sieving primes struck themselves out; they are not rough anyway
    return total


# -- Bombieri-Vinogradov style error sums ------------------------------------

BV_MAX_X = 10**8
BV_MAX_Q = 10**4
BV_DEVIATION = (
    "inner maximum over u <= x^(1+gamma/sqrt(ln x)) replaced by the single point u = x"
)


@dataclass(frozen=True)
class BVQuery:
    x: int
    q_max: int
    excluded_modulus: int = 1
    mode: str = "psi"

    def __post_init__(self):
        if self.x < 2:
            raise DomainError("x must be >= 2")
        if self.q_max < 1 or self.excluded_modulus < 1:
            raise DomainError("q_max and the excluded modulus must be >= 1")
        if self.mode not in ("psi", "pi"):
            raise DomainError(f"mode must be 'psi' or 'pi', got {self.mode!r}")


@dataclass(frozen=True)
class BVTerm:
    modulus: int
    worst_residue: int
    error: float


@dataclass(frozen=True)
class BVResult:
    query: BVQuery
    total: float
    terms: tuple[BVTerm, ...]
    deviations: tuple[str, ...] = (BV_DEVIATION,)


def bv_error_sum(query: BVQuery) -> BVResult:
    """Sum over moduli of the worst-residue error of primes in progressions.

    For each ``1 <= Q <= q_max`` coprime to the excluded modulus, takes the
    maximum over residues ``W`` coprime to ``Q`` of ``|psi(x;Q,W) - x/phi(Q)|``
    (or ``|pi(x;Q,W) - li(x)/phi(Q)|`` in ``pi`` mode).
    """
    if query.x > BV_MAX_X or query.q_max > BV_MAX_Q:
        raise BudgetExceeded(
            f"bv_error_sum budget is x <= {BV_MAX_X}, q_max <= {BV_MAX_Q}"
        )
    x = query.x
    if query.mode == "psi":
        vals, weights = prime_powers(x)
        main = float(x)
    else:
        vals = primes_in(0, x + 1)
        weights = np.ones(len(vals))
        main = li(x)
    terms = []
    for Q in range(1, query.q_max + 1):
        if math.gcd(Q, query.excluded_modulus) != 1:
            continue
        ph = phi(Q)
        sums = _residue_sums(vals, weights, Q)
        best_w, best = 0, -1.0
        expected = main / ph
        for W in range(Q):
            if math.gcd(W, Q) != 1:
                continue
            err = abs(sums[W] - expected)
            if err > best:
                best_w, best = W, err
        terms.append(BVTerm(Q, best_w, best))
    total = math.fsum(t.error for t in terms)
    return BVResult(query, total, tuple(terms))


def _residue_sums(vals: np.ndarray, weights: np.ndarray, q: int) -> list[float]:
    """Compensated per-residue sums of ``weights`` grouped by ``vals % q``."""
    res = vals % q
    order = np.argsort(res, kind="stable")
    res_sorted = res[order]
    w_sorted = weights[order]
    cuts = np.searchsorted(res_sorted, np.arange(q + 1))
    return [math.fsum(w_sorted[cuts[r] : cuts[r + 1]].tolist()) for r in range(q)]
