"""Integer primitives: symbols, primality, factorization, sieving.

Everything here is deterministic. Inputs above ``MAX_INT`` are rejected
rather than handed to code paths that were only validated below it.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import CapacityError

MAX_INT = 2**63
SEGMENT_SIZE = 1 << 20
SIEVE_LIMIT_MAX = 2 * 10**8
TRIAL_DIVISION_BOUND = 1 << 20

# Deterministic for n < 3.3e24, which covers the whole 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _check_range(n: int) -> None:
    if abs(n) > MAX_INT:
        raise CapacityError(f"|{n}| exceeds the supported range 2^63")


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for any nonzero n."""
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol
    a %= n
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


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2^64."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
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


def _pollard_brent(n: int) -> int:
    # Fixed seed schedule keeps factorizations reproducible.
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise RuntimeError(f"pollard-brent failed to split {n}")


def _split(n: int, out: Counter) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] += 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out)
        _split(r, out)
        return
    g = _pollard_brent(n)
    _split(g, out)
    _split(n // g, out)


@lru_cache(maxsize=65536)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    out: Counter = Counter()
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] += 1
            n //= p
    p, step = 7, 4
    # wheel mod 6 over the remaining candidates
    while p * p <= n and p < TRIAL_DIVISION_BOUND:
        while n % p == 0:
            out[p] += 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        if p * p > n:
            out[n] += 1
        else:
            _split(n, out)
    return tuple(sorted(out.items()))


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of 1 <= n <= 2^63 as sorted (prime, exponent) pairs."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    _check_range(n)
    return list(_factor_cached(n))


def phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def tau(n: int) -> int:
    """Number of divisors of n."""
    return math.prod(e + 1 for _, e in factorize(n))


def omega_distinct(n: int) -> int:
    return len(factorize(n))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(abs(n)))


@dataclass(frozen=True)
class Modulus:
    """Modulus m with two residue classes s1, s2 coprime to it."""

    m: int
    s1: int
    s2: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"modulus must be positive, got {self.m}")
        for s in (self.s1, self.s2):
            if math.gcd(s, self.m) != 1:
                raise ValueError(f"residue {s} is not coprime to {self.m}")

    def require_even(self):
        if self.m % 2:
            raise ValueError(f"modulus {self.m} must be even here")
        return self


class PrimeTable:
    """Immutable table of all primes up to ``limit``, indexed by residue mod m."""

    def __init__(self, limit: int, primes: np.ndarray, m: int = 1):
        primes.setflags(write=False)
        self.limit = limit
        self.primes = primes
        self.m = m

    def __len__(self):
        return len(self.primes)

    def __contains__(self, n) -> bool:
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)

    @cached_property
    def residue_index(self) -> dict[int, np.ndarray]:
        res = self.primes % self.m
        index = {}
        for r in range(self.m):
            if math.gcd(r, self.m) != 1:
                continue
            cls = self.primes[res == r]
            cls.setflags(write=False)
            index[r] = cls
        return index

    def in_class(self, s: int) -> np.ndarray:
        return self.residue_index[s % self.m]

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean primality array of length limit + 1."""
        out = np.zeros(self.limit + 1, dtype=bool)
        out[self.primes] = True
        out.setflags(write=False)
        return out


def _small_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def sieve_primes(
    limit: int,
    modulus: Modulus | int = 1,
    segment_size: int = SEGMENT_SIZE,
    max_limit: int = SIEVE_LIMIT_MAX,
) -> PrimeTable:
    """Segmented sieve of Eratosthenes up to ``limit`` inclusive."""
    if limit < 2:
        raise ValueError("sieve limit must be at least 2")
    if limit > max_limit:
        raise CapacityError(f"sieve limit {limit} exceeds budget {max_limit}")
    m = modulus.m if isinstance(modulus, Modulus) else int(modulus)
    base = _small_sieve(math.isqrt(limit))
    chunks = [base]
    low = math.isqrt(limit) + 1
    while low <= limit:
        high = min(low + segment_size, limit + 1)
        seg = np.ones(high - low, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            seg[start - low :: p] = False
        chunks.append(np.flatnonzero(seg) + low)
        low = high
    primes = np.concatenate(chunks).astype(np.int64)
    return PrimeTable(limit, primes, m)
