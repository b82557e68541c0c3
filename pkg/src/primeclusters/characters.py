"""Dirichlet characters modulo q.

A character is stored as a vector of exponents on fixed generators of the
unit group mod q. Generators are chosen per prime-power factor: the smallest
primitive root for odd ``p**a``, ``-1`` for 4, and ``(-1, 5)`` for ``2**e``
with ``e >= 3``; each is lifted to be 1 modulo the other factors. Values are
exact "turns" ``t/D`` (the character value is ``exp(2 pi i t/D)``), where
``D`` is the exponent of the group. Floats appear only in the psi sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from . import _backend, sieve
from .arith import coprime_shift, crt_solve, factorize, lcm, order_mod, phi
from .errors import DomainError

MAX_MODULUS = 10**6


@dataclass(frozen=True)
class Component:
    """Unit group of one prime-power factor ``p**a`` of the modulus."""

    prime: int
    exponent: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    lifted: tuple[int, ...]
    dlog: np.ndarray = field(repr=False, compare=False)

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent


def _smallest_primitive_root(pa: int) -> int:
    target = phi(pa)
    g = 2
    while True:
        if math.gcd(g, pa) == 1 and order_mod(g, pa) == target:
            return g
        g += 1


def _component(p: int, a: int, q: int) -> Component:
    pa = p**a
    rest = q // pa

    def lift(g: int) -> int:
        if rest == 1:
            return g % pa
        return crt_solve([(g, pa), (1, rest)])[0]

    if p == 2 and a == 1:
        table = np.full((2, 0), 0, dtype=np.int64)
        return Component(2, 1, (), (), (), table)
    if p == 2 and a == 2:
        table = np.full((4, 1), -1, dtype=np.int64)
        table[1, 0] = 0
        table[3, 0] = 1
        return Component(2, 2, (3,), (2,), (lift(3),), table)
    if p == 2:
        half = pa // 4
        table = np.full((pa, 2), -1, dtype=np.int64)
        x = 1
        for gamma in range(half):
            table[x] = (0, gamma)
            table[pa - x] = (1, gamma)
            x = x * 5 % pa
        gens = (pa - 1, 5)
        return Component(2, a, gens, (2, half), tuple(lift(g) for g in gens), table)
    g = _smallest_primitive_root(pa)
    order = pa - pa // p
    table = np.full((pa, 1), -1, dtype=np.int64)
    x = 1
    for e in range(order):
        table[x, 0] = e
        x = x * g % pa
    return Component(p, a, (g,), (order,), (lift(g),), table)


@dataclass(frozen=True)
class CharacterGroup:
    modulus: int
    components: tuple[Component, ...] = field(repr=False)

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(g for c in self.components for g in c.lifted)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(d for c in self.components for d in c.orders)

    @property
    def exponent(self) -> int:
        return lcm(*self.orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def dlog(self, n: int) -> tuple[int, ...] | None:
        """Exponent vector of ``n`` on the generators, or ``None`` if ``(n, q) > 1``."""
        out: list[int] = []
        for c in self.components:
            row = c.dlog[n % c.modulus]
            if c.generators and row[0] < 0:
                return None
            if not c.generators and n % 2 == 0:
                return None
            out.extend(int(v) for v in row)
        return tuple(out)

    @cached_property
    def unit_mask(self) -> np.ndarray:
        return np.gcd(np.arange(self.modulus), self.modulus) == 1

    @cached_property
    def dlog_rows(self) -> np.ndarray:
        """``(q, r)`` array of exponent vectors for every residue (garbage on non-units)."""
        n = np.arange(self.modulus, dtype=np.int64)
        cols = [c.dlog[n % c.modulus] for c in self.components if c.generators]
        if not cols:
            return np.zeros((self.modulus, 0), dtype=np.int64)
        return np.concatenate(cols, axis=1)


@lru_cache(maxsize=256)
def group_for(q: int) -> CharacterGroup:
    """Unit group of ``Z/qZ`` with generators and discrete-log tables."""
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")
    if q > MAX_MODULUS:
        raise DomainError(f"modulus above table budget {MAX_MODULUS}")
    comps = tuple(_component(p, a, q) for p, a in factorize(q))
    return CharacterGroup(q, comps)


@dataclass(frozen=True)
class CharValue:
    """``zero`` or the root of unity ``exp(2 pi i num/den)`` in lowest terms."""

    kind: str
    num: int = 0
    den: int = 1

    @classmethod
    def from_turn(cls, t: Fraction | None) -> "CharValue":
        if t is None:
            return cls("zero")
        t = t % 1
        return cls("root", t.numerator, t.denominator)

    @property
    def turn(self) -> Fraction | None:
        return None if self.kind == "zero" else Fraction(self.num, self.den)

    def __complex__(self) -> complex:
        if self.kind == "zero":
            return 0j
        return _root(self.num, self.den)

    def __str__(self) -> str:
        return "0" if self.kind == "zero" else f"e({self.num}/{self.den})"


def _root(num: int, den: int) -> complex:
    """``exp(2 pi i num/den)`` with exact values at multiples of a quarter turn."""
    num %= den
    if (4 * num) % den == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * num // den]
    angle = 2.0 * math.pi * num / den
    return complex(math.cos(angle), math.sin(angle))


@lru_cache(maxsize=64)
def _root_tables(den: int) -> tuple[np.ndarray, np.ndarray]:
    vals = [_root(t, den) for t in range(den)]
    return (
        np.array([v.real for v in vals], dtype=np.float64),
        np.array([v.imag for v in vals], dtype=np.float64),
    )


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: tuple[int, ...]
    group: CharacterGroup = field(repr=False, compare=False)

    def __post_init__(self):
        if len(self.exponents) != len(self.group.orders):
            raise DomainError("exponent vector does not match the generators")
        for e, d in zip(self.exponents, self.group.orders):
            if not 0 <= e < d:
                raise DomainError(f"exponent {e} outside [0, {d})")

    @property
    def denominator(self) -> int:
        return self.group.exponent

    @cached_property
    def turns(self) -> np.ndarray:
        """Turn numerators (over ``denominator``) for residues ``0..q-1``; -1 where zero."""
        D = self.denominator
        weights = np.array(
            [e * (D // d) for e, d in zip(self.exponents, self.group.orders)],
            dtype=np.int64,
        )
        t = (self.group.dlog_rows @ weights) % D
        t[~self.group.unit_mask] = -1
        return np.ascontiguousarray(t, dtype=np.int64)

    def turn(self, n: int) -> Fraction | None:
        t = int(self.turns[n % self.modulus])
        return None if t < 0 else Fraction(t, self.denominator)

    def __call__(self, n: int) -> complex:
        t = int(self.turns[n % self.modulus])
        return 0j if t < 0 else _root(t, self.denominator)

    def __str__(self) -> str:
        return f"chi_{self.modulus}{list(self.exponents)}"


def character(q: int, exponents) -> DirichletCharacter:
    g = group_for(q)
    return DirichletCharacter(q, tuple(int(e) for e in exponents), g)


def principal(q: int) -> DirichletCharacter:
    g = group_for(q)
    return DirichletCharacter(q, (0,) * len(g.orders), g)


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All ``phi(q)`` characters mod ``q``, principal first."""
    g = group_for(q)
    return [DirichletCharacter(q, e, g) for e in product(*(range(d) for d in g.orders))]


def eval_char(chi: DirichletCharacter, n: int) -> CharValue:
    return CharValue.from_turn(chi.turn(n))


def is_principal(chi: DirichletCharacter) -> bool:
    return not any(chi.exponents)


def is_real(chi: DirichletCharacter) -> bool:
    return all((2 * e) % d == 0 for e, d in zip(chi.exponents, chi.group.orders))


def from_values(q: int, turn_of) -> DirichletCharacter:
    """Build the character mod ``q`` whose turn at each generator is ``turn_of(g)``."""
    g = group_for(q)
    exps = []
    for gen, d in zip(g.generators, g.orders):
        t = turn_of(gen)
        if t is None:
            raise DomainError(f"character vanishes at generator {gen}")
        e = t * d
        if e.denominator != 1:
            raise DomainError(f"turn {t} at generator {gen} has order not dividing {d}")
        exps.append(int(e) % d)
    return DirichletCharacter(q, tuple(exps), g)


def same_values(chi1: DirichletCharacter, chi2: DirichletCharacter, limit: int | None = None) -> bool:
    """Pointwise equality on ``0 <= n < limit`` (default ``lcm`` of the moduli)."""
    n_max = limit or lcm(chi1.modulus, chi2.modulus)
    return all(chi1.turn(n) == chi2.turn(n) for n in range(n_max))


# -- conductor and induction --------------------------------------------------

def _has_period(chi: DirichletCharacter, d: int) -> bool:
    """Whether ``chi`` on units mod q is constant on classes mod ``d`` (``d | q``)."""
    q = chi.modulus
    table = chi.turns.reshape(q // d, d)
    masked = np.where(table >= 0, table, -1)
    hi = masked.max(axis=0)
    lo = np.where(table >= 0, table, np.iinfo(np.int64).max).min(axis=0)
    ok = (hi < 0) | (hi == lo)
    return bool(ok.all())


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def conductor(chi: DirichletCharacter) -> int:
    """Least period of ``chi`` on the units, found among the divisors of q."""
    for d in _divisors(chi.modulus):
        if _has_period(chi, d):
            return d
    raise AssertionError("q itself is always a period")  # pragma: no cover


def conductor_from_components(chi: DirichletCharacter) -> int:
    """Conductor from the orders of the prime-power components.

    Independent of :func:`conductor`; used to cross-check it.
    """
    out = 1
    i = 0
    for c in chi.group.components:
        exps = chi.exponents[i : i + len(c.orders)]
        i += len(c.orders)
        if not c.orders:
            continue
        if c.prime != 2:
            o = c.orders[0] // math.gcd(c.orders[0], exps[0])
            if o > 1:
                v = 0
                while o % c.prime == 0:
                    o //= c.prime
                    v += 1
                out *= c.prime ** (v + 1)
        elif c.exponent == 2:
            if exps[0]:
                out *= 4
        else:
            o = c.orders[1] // math.gcd(c.orders[1], exps[1])
            if o > 1:
                out *= 4 * o
            elif exps[0]:
                out *= 4
    return out


def is_primitive(chi: DirichletCharacter) -> bool:
    # periods among divisors are closed under gcd, so testing q/p suffices
    q = chi.modulus
    return all(not _has_period(chi, q // p) for p in factorize(q).primes)


def induce_primitive(chi: DirichletCharacter) -> tuple[int, DirichletCharacter]:
    """Return ``(c, chi1)``: the conductor and the primitive character inducing ``chi``.

    ``chi1(n) = chi(n + t*c)`` with ``t`` from :func:`coprime_shift`, so that
    ``n + t*c`` is a unit mod q.
    """
    q = chi.modulus
    c = conductor(chi)
    if c == q:
        return q, chi

    def turn_of(n: int) -> Fraction | None:
        return chi.turn(n + coprime_shift(n, c, q) * c)

    return c, from_values(c, turn_of)


def lift(chi1: DirichletCharacter, q: int) -> DirichletCharacter:
    """Character mod ``q`` induced by ``chi1`` (modulus must divide q)."""
    if q % chi1.modulus:
        raise DomainError(f"{chi1.modulus} does not divide {q}")
    return from_values(q, chi1.turn)


def decompose(chi: DirichletCharacter) -> list[DirichletCharacter]:
    """Factor ``chi`` into characters modulo the prime powers of q.

    Component ``i`` is ``n -> chi(n*A_i + sum_{j != i} A_j)`` where ``A_i``
    is 1 modulo the i-th prime power and 0 modulo the others.
    """
    q = chi.modulus
    if q == 1:
        return []
    powers = [p**a for p, a in factorize(q)]
    A = [crt_solve([(1 if j == i else 0, pj) for j, pj in enumerate(powers)])[0] for i in range(len(powers))]
    out = []
    for i, pa in enumerate(powers):
        rest = sum(A) - A[i]
        out.append(from_values(pa, lambda n, i=i, rest=rest: chi.turn(n * A[i] + rest)))
    return out


def product_turn(chars: list[DirichletCharacter], n: int) -> Fraction | None:
    total = Fraction(0)
    for c in chars:
        t = c.turn(n)
        if t is None:
            return None
        total += t
    return total % 1


# -- character sums ------------------------------------------------------------

@lru_cache(maxsize=8)
def _prime_powers(u: int) -> tuple[np.ndarray, np.ndarray]:
    return sieve.prime_powers(u)


PSI_CHI_MAX = 10**8


def psi_chi(u, chi: DirichletCharacter) -> complex:
    """Sum of ``Lambda(n) chi(n)`` over ``n <= u``."""
    u = math.floor(u)
    if u > PSI_CHI_MAX:
        raise DomainError(f"u above {PSI_CHI_MAX}")
    if u < 2:
        return 0j
    vals, logs = _prime_powers(u)
    cos_tab, sin_tab = _root_tables(chi.denominator)
    res = np.ascontiguousarray(vals % chi.modulus)
    return _backend.kernels().char_sum(res, np.ascontiguousarray(logs), chi.turns, cos_tab, sin_tab)


def psi_prime_chi(u, chi: DirichletCharacter) -> complex:
    """``psi(u, chi)`` minus ``u`` when ``chi`` is principal."""
    value = psi_chi(u, chi)
    return value - u if is_principal(chi) else value


def psi_ap_via_characters(u, Q: int, W: int) -> float:
    """``psi(u; Q, W)`` rebuilt from character sums by orthogonality."""
    if Q < 1:
        raise DomainError("Q must be positive")
    if math.gcd(W, Q) != 1:
        raise DomainError(f"({W}, {Q}) > 1")
    ph = phi(Q)
    terms = []
    for chi in enumerate_characters(Q):
        w = chi(W).conjugate()
        terms.append(w * psi_prime_chi(u, chi))
    re = math.fsum(t.real for t in terms)
    return u / ph + re / ph


# -- exact root-of-unity sums -------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Integer coefficients (constant term first) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n)[:-1]:
        poly = _poly_div_exact(poly, list(cyclotomic(d)))
    return tuple(poly)


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        coef = num[i + len(den) - 1] // den[-1]
        out[i] = coef
        for j, dv in enumerate(den):
            num[i + j] -= coef * dv
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


def root_sum_exact(turns) -> int | None:
    """Exact value of ``sum exp(2 pi i t)`` over rational turns when it is an integer.

    Reduces the group-ring element modulo the cyclotomic polynomial of the
    common denominator; returns ``None`` when the sum is not a rational integer.
    """
    turns = [Fraction(t) % 1 for t in turns]
    if not turns:
        return 0
    D = lcm(*(t.denominator for t in turns))
    coeffs = [0] * D
    for t in turns:
        coeffs[int(t * D)] += 1
    phi_D = list(cyclotomic(D))
    deg = len(phi_D) - 1
    for i in range(D - 1, deg - 1, -1):
        c = coeffs[i]
        if c:
            for j, v in enumerate(phi_D):
                coeffs[i - deg + j] -= c * v
    rem = coeffs[:deg] if deg else coeffs[:1]
    if deg == 0:  # pragma: no cover
        return sum(coeffs)
    if any(rem[1:]):
        return None
    return rem[0]


def orthogonality_sum(q: int, W: int, n: int) -> int | None:
    """``sum_chi conj(chi(W)) chi(n)`` over all characters mod q, computed exactly."""
    turns = []
    for chi in enumerate_characters(q):
        tw, tn = chi.turn(W), chi.turn(n)
        if tw is None or tn is None:
            continue
        turns.append(tn - tw)
    return root_sum_exact(turns)


def orthogonality_table(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``sum_chi conj(chi(W)) chi(n)`` for all units ``W, n`` mod q.

    Returns ``(units, S)`` with ``S[i, j]`` the sum for ``W = units[i]``,
    ``n = units[j]``. Each row is reduced modulo the cyclotomic polynomial
    in integer arithmetic, as :func:`root_sum_exact` does pair by pair.
    """
    g = group_for(q)
    chars = enumerate_characters(q)
    units = np.flatnonzero(g.unit_mask)
    D = g.exponent
    T = np.stack([c.turns[units] for c in chars])  # (chars, units)
    cyc = np.array(cyclotomic(D), dtype=np.int64)
    deg = len(cyc) - 1
    n_units = len(units)
    out = np.empty((n_units, n_units), dtype=np.int64)
    cols = np.broadcast_to(np.arange(n_units), T.shape)
    for i in range(n_units):
        diff = (T - T[:, i : i + 1]) % D
        counts = np.zeros((n_units, D), dtype=np.int64)
        np.add.at(counts, (cols, diff), 1)
        for k in range(D - 1, deg - 1, -1):
            c = counts[:, k].copy()
            counts[:, k - deg : k + 1] -= c[:, None] * cyc
        if deg > 1 and counts[:, 1:deg].any():
            raise ArithmeticError(f"non-integer orthogonality sum for q = {q}")
        out[i] = counts[:, 0]
    return units, out


# -- classification --------------------------------------------------------------

def real_characters(q: int) -> list[DirichletCharacter]:
    g = group_for(q)
    choices = [(0, d // 2) if d % 2 == 0 else (0,) for d in g.orders]
    return [DirichletCharacter(q, e, g) for e in product(*choices)]


def real_primitive_moduli_scan(limit: int) -> list[int]:
    """Moduli ``q <= limit`` that carry a real primitive character."""
    if limit > 10**4:
        raise DomainError("limit above 10**4")
    return [q for q in range(1, limit + 1) if any(is_primitive(c) for c in real_characters(q))]


def character_table_csv(chi: DirichletCharacter) -> str:
    """CSV ``n,turn`` for ``0 <= n < q``; turn is ``num/den`` or ``zero``."""
    lines = ["n,turn"]
    for n in range(chi.modulus):
        t = chi.turn(n)
        lines.append(f"{n},zero" if t is None else f"{n},{t.numerator}/{t.denominator}")
    return "\n".join(lines) + "\n"
