import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from primeclusters import arith, sieve
from primeclusters.errors import BudgetExceeded, DomainError

from oracles import td_is_prime, td_primes

# frozen from an independent numpy sieve (integer x in [2, 10**6])
PSI_RATIO = (0.34657359027997264, 1.03882057760913)
THETA_RATIO = (0.34657359027997264, 0.9993738882249728)
PI_RATIO = (0.34657359027997264, 1.2550587129324797)
# prod (1 - 1/p)^-1 / ln x on x = round(10**(2 + j/4)), j = 0..24
MERTENS_RATIO = (1.781079595525264, 1.804788323394488)
PI_1E6 = 78498


def test_examples(backend):
    assert sieve.primes_in(10, 20).tolist() == [11, 13, 17, 19]
    p = sieve.primes_in(50, 100)
    assert len(p) == 10 and p[0] == 53
    assert sieve.pi(100) == 25
    assert sieve.pi_ap(20, 4, 1) == 3
    assert sieve.pi_ap(20, 4, 2) == 1
    assert sieve.theta(10) == pytest.approx(math.log(210), rel=1e-15)
    # ln 2520 = 7.8320...; see ledger for the quoted approximation
    assert sieve.psi(10) == pytest.approx(math.log(2520), rel=1e-15)
    assert sieve.phi_rough(20, 2) == 10
    assert sieve.phi_rough(100, 3) == 33


def test_pi_million(backend):
    assert sieve.pi(10**6) == PI_1E6


def test_pi_small_against_trial_division():
    primes = td_primes(0, 3000)
    for x in range(0, 3000, 7):
        assert sieve.pi(x) == sum(1 for p in primes if p <= x)


@pytest.mark.parametrize("size", [2**10, 2**16, 2**20])
def test_segment_size_independence(size):
    ref = sieve.primes_in(0, 3 * 10**6)
    assert np.array_equal(sieve.primes_in(0, 3 * 10**6, segment_size=size), ref)
    assert np.array_equal(sieve.primes_in(0, 3 * 10**6, segment_size=size, threads=3), ref)


def test_threads_do_not_change_sums():
    a = sieve.theta(2 * 10**6)
    n = sieve.pi(2 * 10**6)
    sieve.configure(threads=3, segment=2**14)
    try:
        assert sieve.theta(2 * 10**6) == pytest.approx(a, rel=4e-16)
        assert sieve.pi(2 * 10**6) == n
    finally:
        sieve.configure(threads=1, segment=sieve.DEFAULT_SEGMENT)


def test_iter_segments_cover_range():
    segs = list(sieve.iter_segments(100, 10**5, segment_size=4096, threads=2))
    assert segs[0].lo == 100 and segs[-1].hi == 10**5
    assert all(a.hi == b.lo for a, b in zip(segs, segs[1:]))
    assert np.array_equal(np.concatenate([s.primes() for s in segs]), sieve.primes_in(100, 10**5))


def test_large_segments_stream_base_primes():
    # sqrt(hi) above the cached base-prime limit
    lo = 2**52
    got = sieve.primes_in(lo, lo + 400)
    assert got.tolist() == [n for n in range(lo, lo + 400) if arith.is_prime(n)]


def test_domain_errors():
    with pytest.raises(DomainError):
        sieve.primes_in(10, 5)
    with pytest.raises(DomainError):
        sieve.pi_ap(100, 4, 2.5)
    with pytest.raises(DomainError):
        sieve.phi_rough(100, 1)
    with pytest.raises(BudgetExceeded):
        sieve.phi_rough(10**10, 5)
    with pytest.raises(DomainError):
        sieve.configure(threads=0)


def test_partition_over_residues():
    for x in (1, 2, 97, 1000, 10**5):
        total = sieve.pi(x)
        for q in (1, 2, 3, 7, 12, 30, 50):
            assert sum(sieve.pi_ap(x, q, a) for a in range(q)) == total


def test_psi_decomposition():
    x = 10**5
    total = sieve.psi(x)
    for q in range(1, 51):
        parts = math.fsum(sieve.psi_ap(x, q, a) for a in range(q))
        assert parts == pytest.approx(total, rel=1e-8)


def test_psi_against_mangoldt():
    for x in (2, 3, 10, 100, 1000):
        assert sieve.psi(x) == pytest.approx(math.fsum(arith.mangoldt(n) for n in range(1, x + 1)), rel=1e-13)


def test_phi_rough_against_lpf_scan():
    lpf = arith.lpf_table(10**4)
    for x in list(range(1, 200)) + [997, 5000, 10**4]:
        for z in (2, 3, 5, 10, 31, 97, 100):
            want = 1 + int(np.count_nonzero(lpf[2 : x + 1] > z)) if x >= 1 else 0
            assert sieve.phi_rough(x, z) == want, (x, z)


@pytest.mark.parametrize("x", [2, 2.5, 3, 10, 100, 1e4, 1e6, 1e8])
def test_li_against_mpmath(x):
    with mpmath.workdps(40):
        ref = float(mpmath.li(x) - mpmath.li(2))
    assert abs(sieve.li(x) - ref) <= 1e-9


def test_li_large_x_last_ulp():
    with mpmath.workdps(40):
        ref = float(mpmath.li(1e10) - mpmath.li(2))
    assert abs(sieve.li(1e10) - ref) <= max(1e-9, 2 * math.ulp(ref))


def test_li_example():
    assert sieve.li(3) == pytest.approx(1.1184248145, abs=1e-9)


def test_chebyshev_regression():
    N = 10**6
    vals, logs = sieve.prime_powers(N)
    lam = np.zeros(N + 1)
    lam[vals] = logs
    x = np.arange(2, N + 1, dtype=np.float64)
    psi = np.cumsum(lam)[2:]
    primes = sieve.primes_in(0, N + 1)
    isp = np.zeros(N + 1, bool)
    isp[primes] = True
    theta = np.cumsum(np.where(isp, np.log(np.maximum(np.arange(N + 1), 1)), 0.0))[2:]
    pic = np.cumsum(isp)[2:]
    for got, (lo, hi) in [(psi / x, PSI_RATIO), (theta / x, THETA_RATIO), (pic * np.log(x) / x, PI_RATIO)]:
        assert got.min() >= lo * (1 - 1e-12)
        assert got.max() <= hi * (1 + 1e-12)


def test_mertens_regression():
    ratios = [sieve.mertens_product(round(10 ** (2 + j / 4))) / math.log(round(10 ** (2 + j / 4))) for j in range(25)]
    assert min(ratios) >= MERTENS_RATIO[0] * (1 - 1e-12)
    assert max(ratios) <= MERTENS_RATIO[1] * (1 + 1e-12)


def test_prime_cache_roundtrip(tmp_path):
    path = tmp_path / "primes.bin"
    n = sieve.write_prime_cache(path, 10**5)
    limit, primes = sieve.read_prime_cache(path)
    assert limit == 10**5 and n == len(primes) == 9592
    assert np.array_equal(primes, sieve.primes_in(0, 10**5 + 1))
    path.write_bytes(b"junk" + path.read_bytes()[4:])
    with pytest.raises(ValueError):
        sieve.read_prime_cache(path)


def test_configured_cache_is_used(tmp_path):
    path = tmp_path / "primes.bin"
    sieve.write_prime_cache(path, 2**12)
    sieve.configure(cache_path=path)
    try:
        assert sieve.pi(10**7) == 664579
    finally:
        sieve.configure(cache_path="")


def test_bv_example_against_double_loop():
    res = sieve.bv_error_sum(sieve.BVQuery(10**4, 20))
    assert res.deviations == (sieve.BV_DEVIATION,)
    total = 0.0
    for Q in range(1, 21):
        ph = arith.phi(Q)
        errs = [abs(sieve.psi_ap(10**4, Q, W) - 10**4 / ph) for W in range(Q) if math.gcd(W, Q) == 1]
        total += max(errs)
    assert res.total == pytest.approx(total, rel=1e-9)


def test_bv_pi_mode_and_exclusion():
    res = sieve.bv_error_sum(sieve.BVQuery(10**4, 10, excluded_modulus=3, mode="pi"))
    assert [t.modulus for t in res.terms] == [1, 2, 4, 5, 7, 8, 10]
    for t in res.terms:
        want = max(abs(sieve.pi_ap(10**4, t.modulus, W) - sieve.li(10**4) / arith.phi(t.modulus))
                   for W in range(t.modulus) if math.gcd(W, t.modulus) == 1)
        assert t.error == pytest.approx(want, rel=1e-12)
    with pytest.raises(BudgetExceeded):
        sieve.bv_error_sum(sieve.BVQuery(10**9, 10))
    with pytest.raises(DomainError):
        sieve.BVQuery(10**4, 10, mode="theta")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 3000))
def test_primes_in_random_windows(lo, width):
    got = sieve.primes_in(lo, lo + width).tolist()
    assert got == [n for n in range(lo, lo + width) if arith.is_prime(n)]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5000))
def test_pi_and_theta_step(x):
    assert sieve.pi(x) - sieve.pi(x - 1) == (1 if td_is_prime(x) else 0)
    step = sieve.theta(x) - sieve.theta(x - 1)
    assert step == pytest.approx(math.log(x) if td_is_prime(x) else 0.0, abs=1e-9)
