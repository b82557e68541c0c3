"""Admissible sets of linear forms ``L_i(n) = q*n + a + q*b_i`` and the
arithmetic around them: rough-tuple selection, the discriminant-like
products ``a^(k+1) prod |b_i - b|`` and root counts modulo squarefree d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import sieve
from .arith import crt_solve, factorize, is_squarefree
from .errors import BudgetExceeded, DomainError, InsufficientTupleSpace

MAX_K = 64
OMEGA_MAX = 10**9
DELTA_LIMIT = 2**127


@dataclass(frozen=True)
class LinearSet:
    q: int
    a: int
    b: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise DomainError(f"q must be positive, got {self.q}")
        if math.gcd(self.a, self.q) != 1:
            raise DomainError(f"(a, q) = ({self.a}, {self.q}) is not 1")
        if not self.b:
            raise DomainError("need at least one b")
        if any(y <= x for x, y in zip(self.b, self.b[1:])):
            raise DomainError("b must be strictly ascending")
        if any(v < 0 for v in self.b):
            raise DomainError("b entries must be non-negative")

    @property
    def k(self) -> int:
        return len(self.b)

    def forms(self, n: int) -> list[int]:
        return [self.q * n + self.a + self.q * bi for bi in self.b]

    def to_line(self) -> str:
        """Interchange format ``q a b1,b2,...,bk``."""
        return f"{self.q} {self.a} {','.join(map(str, self.b))}"

    @classmethod
    def from_line(cls, line: str) -> "LinearSet":
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"expected 'q a b1,...,bk', got {line!r}")
        return cls(int(parts[0]), int(parts[1]), tuple(int(v) for v in parts[2].split(",")))


def _primes_upto(k: int) -> list[int]:
    return [int(p) for p in sieve.base_primes(k)]


def _check_size(ls: LinearSet) -> None:
    if ls.k > MAX_K:
        raise DomainError(f"k = {ls.k} exceeds {MAX_K}")


def is_admissible_definition(ls: LinearSet) -> bool:
    """Brute force: for each prime ``p <= k`` some ``n`` leaves every form nonzero mod p."""
    _check_size(ls)
    for p in _primes_upto(ls.k):
        if not any(all(v % p for v in ls.forms(n)) for n in range(p)):
            return False
    return True


def is_admissible_criterion(ls: LinearSet) -> bool:
    """For each prime ``p <= k`` not dividing q, the ``b_i`` miss some class mod p."""
    _check_size(ls)
    for p in _primes_upto(ls.k):
        if ls.q % p == 0:
            continue
        if len({bi % p for bi in ls.b}) == p:
            return False
    return True


def omega_set(N: int, k: int) -> np.ndarray:
    """``1 <= n <= N`` coprime to every prime ``<= k``."""
    if N > OMEGA_MAX:
        raise BudgetExceeded(f"N above {OMEGA_MAX}")
    if N < 1:
        return np.zeros(0, dtype=np.int64)
    keep = np.ones(N + 1, dtype=bool)
    keep[0] = False
    for p in _primes_upto(k):
        keep[p::p] = False
    return np.flatnonzero(keep).astype(np.int64)


def choose_tuple(k: int, eta: float, y: float, q: int, a: int) -> LinearSet:
    """The ``k`` smallest elements of ``omega_set(floor(eta*y/q), k)`` as a LinearSet."""
    if k < 1:
        raise DomainError("k must be positive")
    N = math.floor(eta * y / q)
    omega = omega_set(N, k)
    if len(omega) < k:
        raise InsufficientTupleSpace(len(omega), k)
    return LinearSet(q, a, tuple(int(v) for v in omega[:k]))


def eta_recipe(k: int, q: int, c6: float = 1.0) -> tuple[float, bool]:
    """``1 / (12 c6 k^4 (ln k)^2 lnln(q+2))`` clamped to 1/2; returns ``(eta, clamped)``."""
    if k < 3:
        raise DomainError("eta recipe needs k >= 3")
    if c6 <= 0:
        raise DomainError("c6 must be positive")
    value = 1.0 / (12.0 * c6 * k**4 * math.log(k) ** 2 * math.log(math.log(q + 2)))
    if value > 0.5:
        return 0.5, True
    return value, False


K_RECIPE_MAX = 10**6


def k_recipe(m: int, c_tilde: float = 1.0) -> int:
    """``ceil(exp(c_tilde * m))``.

    Products within a few ulp of an integer are treated as that integer, so
    ``c_tilde = ln 5`` gives 5 rather than tripping on rounding.
    """
    if m < 1 or c_tilde < 0:
        raise DomainError("need m >= 1 and c_tilde >= 0")
    v = math.exp(c_tilde * m)
    if v > K_RECIPE_MAX:
        raise BudgetExceeded(f"k = ceil({v:.6g}) exceeds {K_RECIPE_MAX}")
    nearest = round(v)
    if abs(v - nearest) <= 8 * math.ulp(v):
        return int(nearest)
    return math.ceil(v)


@dataclass(frozen=True)
class DeltaContext:
    a_coeff: int
    b_list: tuple[int, ...]
    x_scale: float
    eta: float

    def __post_init__(self):
        if self.a_coeff < 1:
            raise DomainError("a_coeff must be positive")
        if not self.b_list:
            raise DomainError("b_list is empty")
        if self.x_scale <= math.e:
            raise DomainError("x_scale must exceed e")
        lx = math.log(self.x_scale)
        if any(not 1 <= b <= lx for b in self.b_list):
            raise DomainError("each b_i must lie in [1, ln x_scale]")
        if not lx ** -0.9 <= self.eta <= 1:
            raise DomainError("eta must lie in [(ln x)^(-9/10), 1]")

    @property
    def k(self) -> int:
        return len(self.b_list)

    @property
    def range_len(self) -> int:
        return math.floor(self.eta * math.log(self.x_scale))


def delta_of(ctx: DeltaContext, b: int) -> int:
    """``a^(k+1) * prod |b_i - b|``; raises ``OverflowError`` past 128 bits."""
    value = ctx.a_coeff ** (ctx.k + 1)
    if value >= DELTA_LIMIT:
        raise OverflowError("a^(k+1) exceeds 128 bits")
    for bi in ctx.b_list:
        value *= abs(bi - b)
        if value >= DELTA_LIMIT:
            raise OverflowError("Delta exceeds 128 bits")
    return value


def _ratio_over_phi(ctx: DeltaContext, b: int) -> Fraction:
    """``Delta/phi(Delta)``, from the distinct primes of ``a`` and of each ``|b_i - b|``."""
    delta_of(ctx, b)  # enforces the overflow policy
    primes = set(factorize(ctx.a_coeff).primes)
    for bi in ctx.b_list:
        primes.update(factorize(abs(bi - b)).primes)
    out = Fraction(1)
    for p in primes:
        out *= Fraction(p, p - 1)
    return out


SUM_DELTA_MAX = 10**6


def sum_delta_ratio(ctx: DeltaContext) -> tuple[float, float]:
    """Sum of ``Delta/phi(Delta)`` over ``1 <= b <= eta ln x`` with ``b`` not in ``b_list``.

    Returns ``(sum, sum / (lnln(a+2) ln(k+1) eta ln x))``.
    """
    n = ctx.range_len
    if n > SUM_DELTA_MAX:
        raise BudgetExceeded(f"eta ln x = {n} exceeds {SUM_DELTA_MAX} terms")
    if n < 1:
        return 0.0, 0.0
    taken = set(ctx.b_list)
    total = sum((_ratio_over_phi(ctx, b) for b in range(1, n + 1) if b not in taken), Fraction(0))
    scale = (
        math.log(math.log(ctx.a_coeff + 2))
        * math.log(ctx.k + 1)
        * ctx.eta
        * math.log(ctx.x_scale)
    )
    s = float(total)
    return s, s / scale


ROOT_D_MAX = 10**6


def count_roots_mod(b_list: Sequence[int], d: int, range_len: int) -> int:
    """``#{1 <= b <= range_len : d | prod (b - b_i)}`` for squarefree ``d``.

    Roots modulo each prime of ``d`` are combined by the Chinese remainder
    theorem; each resulting class mod ``d`` is counted arithmetically.
    """
    if d < 1 or d > ROOT_D_MAX:
        raise DomainError(f"d must lie in [1, {ROOT_D_MAX}]")
    if not is_squarefree(d):
        raise DomainError(f"d = {d} is not squarefree")
    if range_len < 0:
        raise DomainError("range_len must be non-negative")
    classes = [0]
    modulus = 1
    for p in factorize(d).primes:
        roots = sorted({bi % p for bi in b_list})
        classes = [crt_solve([(r, modulus), (s, p)])[0] for r in classes for s in roots]
        modulus *= p
    return sum((range_len - r) // d - (-r) // d for r in classes)


def n0_bound(b_list: Sequence[int], d: int, eta_lnx: float) -> float:
    """``(2 eta ln x / d) * prod_{p | d} min(p, k)``."""
    k = len(b_list)
    return 2.0 * eta_lnx / d * math.prod(min(p, k) for p in factorize(d).primes)
