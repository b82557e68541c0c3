"""Exact integer arithmetic and multiplicative functions.

Everything here works on Python integers. Factorization covers
``1 <= n <= 2**63 - 1``: trial division by the primes below ``2**16`` and,
for a cofactor that survives, a deterministic Miller-Rabin test with a
fixed base set followed by Brent's variant of Pollard rho with fixed seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, NoSolutionError

MAX_N = 2**63 - 1
_TRIAL_LIMIT = 1 << 16
# Deterministic for n < 3.3e24 (Sorenson & Webster), far beyond 2**63.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _small_primes(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


_PRIMES = _small_primes(_TRIAL_LIMIT)
_PRIME_SET = frozenset(_PRIMES)


class _Infinity:
    """Positive infinity as a tagged value.

    Compares greater than every number but refuses arithmetic, so the
    convention ``P^-(1) = +inf`` cannot silently leak into a computation.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("primeclusters.INF")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True


INF = _Infinity()


@dataclass(frozen=True)
class Factorization:
    value: int
    parts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = 1
        prod = 1
        for p, e in self.parts:
            if p <= prev or e < 1 or not is_prime(p):
                raise DomainError(f"malformed factorization {self.parts!r}")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise DomainError(f"parts multiply to {prod}, not {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)


def is_prime(n: int) -> bool:
    """Deterministic primality for ``n < 3.3e24``."""
    if n < _TRIAL_LIMIT:
        return n in _PRIME_SET
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    # n is odd, composite, and has no prime factor below _TRIAL_LIMIT.
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise RuntimeError(f"rho failed to split {n}")  # pragma: no cover


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out)
        _split(r, out)
        return
    d = _brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Standard form of ``n`` as ascending ``(prime, exponent)`` pairs."""
    n = int(n)
    if n < 1 or n > MAX_N:
        raise DomainError(f"factorize needs 1 <= n <= 2**63-1, got {n}")
    parts: dict[int, int] = {}
    m = n
    for p in _PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            parts[p] = e
    if m > 1:
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
            parts[m] = parts.get(m, 0) + 1
        else:
            _split(m, parts)
    return Factorization(n, tuple(sorted(parts.items())))


def _check_positive(n: int, name: str = "n") -> int:
    n = int(n)
    if n < 1:
        raise DomainError(f"{name} must be a positive integer, got {n}")
    return n


def phi(n: int) -> int:
    n = _check_positive(n)
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def mu(n: int) -> int:
    n = _check_positive(n)
    parts = factorize(n).parts
    if any(e > 1 for _, e in parts):
        return 0
    return -1 if len(parts) % 2 else 1


def mangoldt(n: int) -> float:
    n = _check_positive(n)
    parts = factorize(n).parts
    if len(parts) == 1:
        return math.log(parts[0][0])
    return 0.0


def squarefree_divisors(n: int) -> list[int]:
    primes = factorize(_check_positive(n)).primes
    out = []
    for r in range(len(primes) + 1):
        for combo in combinations(primes, r):
            out.append(math.prod(combo))
    return sorted(out)


def phi_identity_rhs(n: int) -> Fraction:
    """Sum of ``1/phi(d)`` over the squarefree divisors ``d`` of ``n``."""
    primes = factorize(_check_positive(n)).primes
    # phi(d) = prod (p - 1) for squarefree d; summed over a common denominator
    den = math.prod(p - 1 for p in primes)
    num = 0
    for r in range(len(primes) + 1):
        for combo in combinations(primes, r):
            num += den // math.prod(p - 1 for p in combo)
    return Fraction(num, den)


def order_mod(a: int, m: int) -> int:
    """Multiplicative order of ``a`` modulo ``m``."""
    if m < 2:
        raise DomainError(f"modulus must exceed 1, got {m}")
    a %= m
    if math.gcd(a, m) != 1:
        raise DomainError(f"({a}, {m}) > 1: no multiplicative order")
    order = phi(m)
    for p, e in factorize(order):
        for _ in range(e):
            if pow(a, order // p, m) == 1:
                order //= p
            else:
                break
    return order


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def egcd_solve(a: int, b: int, c: int) -> tuple[int, int]:
    """Solve ``a*x + b*y = c`` returning the solution with minimal ``|x|``.

    Ties between ``x`` and ``-x`` resolve to the non-negative one.
    """
    if a == 0 and b == 0:
        raise DomainError("a and b are both zero")
    g, x, y = egcd(a, b)
    if c % g:
        raise NoSolutionError(f"gcd({a}, {b}) = {g} does not divide {c}")
    x, y = x * (c // g), y * (c // g)
    if b == 0:
        return x, y
    # x runs through a residue class mod |b/g|
    step = abs(b // g)
    lo = x % step
    x = lo if lo <= step - lo else lo - step
    return x, (c - a * x) // b


@dataclass(frozen=True)
class CongruenceSystem:
    equations: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, pairs: Iterable[Sequence[int]]) -> "CongruenceSystem":
        return cls(tuple((int(r), int(m)) for r, m in pairs))


def crt_solve(system: CongruenceSystem | Iterable[Sequence[int]]) -> tuple[int, int]:
    """Solve ``x = r_i (mod m_i)`` for pairwise coprime moduli."""
    if not isinstance(system, CongruenceSystem):
        system = CongruenceSystem.of(system)
    eqs = system.equations
    for _, m in eqs:
        if m < 1:
            raise DomainError(f"moduli must be positive, got {m}")
    for i in range(len(eqs)):
        for j in range(i + 1, len(eqs)):
            if math.gcd(eqs[i][1], eqs[j][1]) != 1:
                raise DomainError(
                    f"moduli {eqs[i][1]} and {eqs[j][1]} are not coprime"
                )
    residue, modulus = 0, 1
    for r, m in eqs:
        # residue + modulus*s = r (mod m)
        inv = pow(modulus, -1, m) if m > 1 else 0
        s = (r - residue) * inv % m if m > 1 else 0
        residue += modulus * s
        modulus *= m
        residue %= modulus
    return residue, modulus


def coprime_shift(n: int, a: int, b: int) -> int:
    """Return ``t`` with ``gcd(n + t*a, b) = 1``.

    Requires ``1 <= a < b``, ``a | b`` and ``gcd(n, a) = 1``. When ``n`` is
    already coprime to ``b`` the answer is 0; otherwise ``t`` solves
    ``n + t*a = 1`` modulo every prime of ``b`` not dividing ``a``,
    reduced into ``[0, prod of those primes)``.
    """
    if not (1 <= a < b) or b % a or math.gcd(n, a) != 1:
        raise DomainError(
            f"coprime_shift needs 1 <= a < b, a | b, (n, a) = 1; got n={n}, a={a}, b={b}"
        )
    if math.gcd(n, b) == 1:
        return 0
    eqs = []
    for p in factorize(b).primes:
        if a % p:
            eqs.append(((1 - n) * pow(a, -1, p) % p, p))
    t, _ = crt_solve(CongruenceSystem(tuple(eqs)))
    return t


def least_prime_factor(n: int):
    """Smallest prime dividing ``n``; ``INF`` for ``n = 1``."""
    n = _check_positive(n)
    if n == 1:
        return INF
    return factorize(n).parts[0][0]


def sum_logp_over_p(n: int) -> float:
    """Sum of ``ln p / p`` over the distinct primes dividing ``n``."""
    return math.fsum(math.log(p) / p for p in factorize(_check_positive(n)).primes)


def lcm(*values: int) -> int:
    return reduce(lambda u, v: u * v // math.gcd(u, v), values, 1)


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(_check_positive(n)))


# -- table versions for bulk work ------------------------------------------

def phi_table(n: int) -> np.ndarray:
    """``phi(k)`` for ``0 <= k <= n`` (entry 0 is 0)."""
    table = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if table[p] == p:
            table[p::p] -= table[p::p] // p
    return table


def lpf_table(n: int) -> np.ndarray:
    """Least prime factor for ``0 <= k <= n``; entries 0 and 1 are 0."""
    table = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if table[p] == 0:
            block = table[p::p]
            block[block == 0] = p
    return table
