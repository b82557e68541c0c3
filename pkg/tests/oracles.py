"""Slow, obviously-correct reference implementations used only by tests."""

import math


def td_is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def td_primes(lo: int, hi: int) -> list[int]:
    """Primes in [lo, hi) by trial division."""
    return [n for n in range(max(lo, 2), hi) if td_is_prime(n)]


def td_factor(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def coprime_count(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def run_starts(primes: list[int], m: int, q: int, a: int, y: float) -> list[int]:
    """First primes of runs p_i..p_{i+m} all = a mod q with p_{i+m} - p_i <= y.

    ``primes`` must be every prime in some initial segment, in order.
    """
    out = []
    for i in range(len(primes) - m):
        run = primes[i : i + m + 1]
        if run[-1] - run[0] <= y and all((p - a) % q == 0 for p in run):
            out.append(run[0])
    return out


def brute_scan(x: int, y: float, m: int, q: int, a: int) -> int:
    primes = td_primes(2, 2 * x + 200)
    return sum(1 for p in run_starts(primes, m, q, a, y) if x / 2 < p <= x)


def brute_conductor(chi) -> int:
    """Smallest divisor d of q such that chi agrees on units congruent mod d."""
    q = chi.modulus
    units = [n for n in range(q) if math.gcd(n, q) == 1]
    for d in range(1, q + 1):
        if q % d:
            continue
        seen = {}
        ok = True
        for n in units:
            t = chi.turn(n)
            if seen.setdefault(n % d, t) != t:
                ok = False
                break
        if ok:
            return d
    raise AssertionError


def mangoldt_sum(u: int, weight) -> complex:
    """Sum of Lambda(n) * weight(n) for n <= u by factoring each n."""
    total = 0j
    for n in range(2, u + 1):
        f = td_factor(n)
        if len(f) == 1:
            total += math.log(f[0][0]) * weight(n)
    return total
