"""
Arithmetic substrate: primes, factorization tables, Mobius and tau_3,
real primitive characters and L(1, chi).

Everything here is deterministic. Tables are built lazily and cached at
module level; once built they are only read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np

DEFAULT_PRIME_LIMIT = 10**7

_prime_limit = DEFAULT_PRIME_LIMIT
_spf: Optional[np.ndarray] = None  # smallest prime factor, index n
_primes: Optional[np.ndarray] = None


def set_prime_limit(limit: int) -> None:
    """Change the largest n the cached tables may grow to."""
    global _prime_limit
    _prime_limit = int(limit)


def _ensure_tables(n: int) -> None:
    global _spf, _primes
    if _spf is not None and len(_spf) > n:
        return
    if n > _prime_limit:
        raise ValueError(f"table request {n} exceeds prime limit {_prime_limit}")
    size = max(n, 1024, 0 if _spf is None else 2 * (len(_spf) - 1))
    size = min(size, _prime_limit)
    spf = np.zeros(size + 1, dtype=np.int64)
    for p in range(2, math.isqrt(size) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    spf[0] = 0
    spf[1] = 1
    _spf = spf
    _primes = np.nonzero(spf[2:] == np.arange(2, size + 1))[0] + 2


def primes_up_to(n: int) -> np.ndarray:
    """All primes p <= n as an int64 array (from the cached table)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    _ensure_tables(n)
    return _primes[: np.searchsorted(_primes, n, side="right")]


def primes_below(n: int) -> np.ndarray:
    """All primes p < n."""
    return primes_up_to(n - 1)


def spf_table(n: int) -> np.ndarray:
    """Smallest-prime-factor table covering 0..n (may be longer)."""
    _ensure_tables(n)
    return _spf


def segmented_primes(lo: int, hi: int, segment: int = 1 << 22) -> Iterator[np.ndarray]:
    """Yield arrays of the primes in [lo, hi], one segment at a time.

    Only the base primes up to sqrt(hi) come from the cached table, so
    hi may exceed the table limit.
    """
    lo = max(lo, 2)
    if hi < lo:
        return
    base = primes_up_to(math.isqrt(hi))
    start = lo
    while start <= hi:
        stop = min(start + segment - 1, hi)
        mark = np.ones(stop - start + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > stop:
                break
            first = max(p * p, ((start + p - 1) // p) * p)
            mark[first - start :: p] = False
        yield np.nonzero(mark)[0].astype(np.int64) + start
        start = stop + 1


def count_primes_in_progression(x: int, q: int, a: int) -> int:
    """pi(x; q, a), the number of primes p <= x with p = a (mod q)."""
    total = 0
    for block in segmented_primes(2, x):
        total += int(np.count_nonzero(block % q == a % q))
    return total


@dataclass(frozen=True)
class Factorization:
    """n as an ordered list of (prime, exponent) pairs."""

    n: int
    prime_powers: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.prime_powers:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.prime_powers}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factorization does not multiply to {self.n}")

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.prime_powers)

    @property
    def omega(self) -> int:
        return len(self.prime_powers)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.prime_powers)

    @property
    def kernel(self) -> int:
        return math.prod(self.primes)


def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    pairs: List[Tuple[int, int]] = []
    m = n
    if m <= _prime_limit:
        spf = spf_table(m)
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        return Factorization(n, tuple(pairs))
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        pairs.append((m, 1))
    return Factorization(n, tuple(pairs))


def prime_factors(n: int) -> Tuple[int, ...]:
    return factorize(n).primes


def mobius(n: int) -> int:
    f = factorize(n)
    if not f.is_squarefree:
        return 0
    return -1 if f.omega % 2 else 1


def is_squarefree(n: int) -> bool:
    return mobius(n) != 0


def tau3(n: int) -> int:
    """Number of ordered triples (a, b, c) of positive integers with abc = n."""
    return math.prod((e + 1) * (e + 2) // 2 for _, e in factorize(n).prime_powers)


def mobius_table(n: int) -> np.ndarray:
    """mu(k) for k = 0..n as int8 (mu(0) set to 0)."""
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_up_to(n):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def squarefree_up_to(n: int) -> np.ndarray:
    """Sorted squarefree d with 1 <= d <= n."""
    if n < 1:
        return np.zeros(0, dtype=np.int64)
    return np.nonzero(mobius_table(n))[0].astype(np.int64)


def largest_prime_factor_table(n: int) -> np.ndarray:
    lpf = np.ones(n + 1, dtype=np.int64)
    for p in primes_up_to(n):
        lpf[int(p) :: int(p)] = p
    return lpf


def tau3_table(n: int) -> np.ndarray:
    """tau_3 on squarefree arguments (3 ** omega), valid for squarefree k <= n."""
    t = np.ones(n + 1, dtype=np.int64)
    for p in primes_up_to(n):
        t[int(p) :: int(p)] *= 3
    return t


# ---------------------------------------------------------------------------
# real characters


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D / n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D / n), n odd positive
    a = D % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(abs(m))
    return False


def _is_prime(n: int) -> bool:
    return n >= 2 and factorize(n).prime_powers == ((n, 1),)


@dataclass(frozen=True)
class RealCharacter:
    """Real primitive character chi mod q, stored as its table over one period."""

    q: int
    disc: int
    values: Tuple[int, ...] = field(repr=False)

    @classmethod
    def from_discriminant(cls, D: int) -> "RealCharacter":
        if not is_fundamental_discriminant(D):
            raise ValueError(f"{D} is not a fundamental discriminant")
        q = abs(D)
        return cls(q, D, tuple(kronecker(D, n) for n in range(q)))

    @classmethod
    def from_modulus(cls, q: int) -> "RealCharacter":
        """The real primitive character mod q.

        For an odd prime q this is the Legendre symbol (n / q). Otherwise q
        must be |D| for exactly one fundamental discriminant D.
        """
        if q < 3:
            raise ValueError(f"no real primitive character mod {q}")
        if _is_prime(q):
            D = q if q % 4 == 1 else -q
            chi = cls(q, D, tuple(_legendre(n, q) for n in range(q)))
            return chi
        cands = [D for D in (q, -q) if is_fundamental_discriminant(D)]
        if len(cands) != 1:
            if not cands:
                raise ValueError(f"no real primitive character mod {q}")
            raise ValueError(f"two real primitive characters mod {q}; use from_discriminant")
        return cls.from_discriminant(cands[0])

    def __call__(self, n: int) -> int:
        return self.values[n % self.q]

    def table(self, n: int) -> np.ndarray:
        """chi(k) for k = 0..n as int8."""
        period = np.array(self.values, dtype=np.int8)
        return np.resize(period, n + 1)


def _legendre(n: int, p: int) -> int:
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


def char_eval(chi: RealCharacter, n: int) -> int:
    return chi(n)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n).primes:
        out -= out // p
    return out


@dataclass(frozen=True)
class LValue:
    value: float
    tail_bound: float
    cutoff: int


def l_one_with_bound(chi: RealCharacter, cutoff: Optional[int] = None) -> LValue:
    """L(1, chi) from partial sums with a first-order tail correction.

    With N a multiple of q and A(n) the character partial sums,
    sum_{n>N} chi(n)/n = sum_{n>N} A(n)/(n(n+1)). Replacing A by its period
    mean Abar leaves sum_{n>N} (A(n)-Abar)/(n(n+1)), which one more partial
    summation bounds by max|B| / ((N+1)(N+2)), B the (periodic) partial sums
    of A - Abar.
    """
    q = chi.q
    if cutoff is None:
        cutoff = max(10**6, q * 10**4)
    N = -(-cutoff // q) * q
    n = np.arange(1, N + 1, dtype=np.float64)
    vals = np.resize(np.array(chi.values, dtype=np.float64), N + 1)[1:]
    partial = math.fsum(vals / n)
    period = np.array([chi(k) for k in range(1, q + 1)], dtype=np.int64)
    A = np.cumsum(period)
    if A[-1] != 0:
        raise ValueError("character sums over a period must vanish")
    Abar = float(A.mean())
    B = np.cumsum(A - Abar)
    tail = Abar / (N + 1)
    bound = float(np.max(np.abs(B))) / ((N + 1) * (N + 2))
    return LValue(partial + tail, bound, N)


def l_one(chi: RealCharacter, eps: float = 1e-6, cutoff: Optional[int] = None) -> float:
    """L(1, chi) to within eps; raises if the tail bound at the cutoff is too big."""
    lv = l_one_with_bound(chi, cutoff)
    if lv.tail_bound > eps:
        raise ValueError(f"tail bound {lv.tail_bound:.3g} exceeds eps={eps} at N={lv.cutoff}")
    return lv.value
