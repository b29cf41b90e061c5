import math
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sievelab import arith


def trial_primes(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, math.isqrt(k) + 1))]


def brute_mobius(n):
    out, k, m = 1, 2, n
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            out = -out
        k += 1
    return -out if m > 1 else out


def brute_tau3(n):
    return sum(1 for a in range(1, n + 1) if n % a == 0 for b in range(1, n // a + 1) if (n // a) % b == 0)


def test_primes_match_trial_division():
    assert arith.primes_up_to(1000).tolist() == trial_primes(1000)
    assert arith.primes_below(11).tolist() == [2, 3, 5, 7]
    assert arith.primes_up_to(1).tolist() == []


def test_segmented_matches_table():
    got = np.concatenate(list(arith.segmented_primes(10**5, 3 * 10**5, segment=4096)))
    ref = arith.primes_up_to(3 * 10**5)
    assert got.tolist() == ref[ref >= 10**5].tolist()


@pytest.mark.parametrize("q,a", [(3, 1), (3, 2), (5, 4), (7, 3), (12, 5)])
def test_progression_count(q, a):
    x = 20000
    ref = sum(1 for p in trial_primes(x) if p % q == a % q)
    assert arith.count_primes_in_progression(x, q, a) == ref


@given(st.integers(1, 5000))
def test_mobius_and_tau3(n):
    assert arith.mobius(n) == brute_mobius(n)
    if n <= 600:
        assert arith.tau3(n) == brute_tau3(n)
    f = arith.factorize(n)
    assert math.prod(p**e for p, e in f.prime_powers) == n
    assert f.is_squarefree == (brute_mobius(n) != 0)


def test_tables_agree_with_pointwise():
    n = 3000
    mt = arith.mobius_table(n)
    assert all(mt[k] == arith.mobius(k) for k in range(1, n + 1))
    t3 = arith.tau3_table(n)
    sq = arith.squarefree_up_to(n)
    assert all(t3[d] == arith.tau3(int(d)) for d in sq)
    assert arith.tau3(30) == 27


def test_factorize_rejects_nonpositive():
    with pytest.raises(ValueError):
        arith.factorize(0)


def jacobi_brute(D, n):
    """(D/n) for odd prime n by Euler's criterion."""
    r = pow(D % n, (n - 1) // 2, n)
    return 0 if D % n == 0 else (1 if r == 1 else -1)


@given(st.integers(-500, 500), st.sampled_from([3, 5, 7, 11, 13, 101, 997]))
def test_kronecker_on_odd_primes(D, p):
    assert arith.kronecker(D, p) == jacobi_brute(D, p)


@given(st.integers(-200, 200).filter(arith.is_fundamental_discriminant),
       st.integers(1, 300), st.integers(1, 300))
def test_kronecker_completely_multiplicative(D, m, n):
    assert arith.kronecker(D, m * n) == arith.kronecker(D, m) * arith.kronecker(D, n)


def test_character_from_modulus():
    chi3 = arith.RealCharacter.from_modulus(3)
    assert [chi3(n) for n in range(6)] == [0, 1, -1, 0, 1, -1]
    chi4 = arith.RealCharacter.from_modulus(4)
    assert chi4.disc == -4 and [chi4(n) for n in range(4)] == [0, 1, 0, -1]
    with pytest.raises(ValueError):
        arith.RealCharacter.from_modulus(9)
    chi5 = arith.RealCharacter.from_modulus(5)
    assert chi5.table(10).tolist() == [0, 1, -1, -1, 1, 0, 1, -1, -1, 1, 0]


@pytest.mark.parametrize("D,closed", [
    (-3, math.pi / 3**1.5),
    (-4, math.pi / 4),
    (5, 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)),
    (-7, math.pi / math.sqrt(7)),
    (-23, 3 * math.pi / math.sqrt(23)),
    (8, math.log(1 + math.sqrt(2)) / math.sqrt(2)),
])
def test_l_one_closed_forms(D, closed):
    chi = arith.RealCharacter.from_discriminant(D)
    lv = arith.l_one_with_bound(chi)
    assert abs(lv.value - closed) <= max(lv.tail_bound, 1e-12)
    assert lv.tail_bound <= 1e-6


def test_l_one_rejects_loose_tolerance():
    chi = arith.RealCharacter.from_modulus(3)
    with pytest.raises(ValueError):
        arith.l_one(chi, eps=1e-30, cutoff=30)


def test_euler_phi():
    for n in range(1, 200):
        assert arith.euler_phi(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
