"""Ramanujan sums, twisted sums mu_s, singular series, prime-pair counts.

Finite singular-series sums are accumulated in exact rationals; floats
appear only at the return boundary.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import Modulus, PrimeTable, factorize, mobius, phi, sieve_primes, tau

log = logging.getLogger(__name__)

PRODUCT_PRIME_BOUND = 10**7
TWO_PI_I = 2j * math.pi


def e(x) -> complex:
    """e(x) = exp(2 pi i x), with x reduced mod 1 first when rational."""
    if isinstance(x, Fraction):
        x = x - math.floor(x)
        return cmath.exp(TWO_PI_I * float(x))
    return cmath.exp(TWO_PI_I * (x - math.floor(x)))


def ramanujan_c(q: int, n: int) -> int:
    """c_q(n) = phi(q) mu(q/g) / phi(q/g) with g = gcd(q, n)."""
    if q < 1:
        raise ValueError("q must be positive")
    r = q // math.gcd(q, n)
    return mobius(r) * (phi(q) // phi(r))


def _units(q: int) -> np.ndarray:
    r = np.arange(1, q + 1, dtype=np.int64)
    return r[np.gcd(r, q) == 1]


def ramanujan_c_direct(q: int, n) -> np.ndarray | complex:
    """Root-of-unity sum over a coprime to q; ``n`` may be an int or an array."""
    a = _units(q)
    ns = np.atleast_1d(np.asarray(n, dtype=np.int64))
    phases = np.outer(ns, a) % q / q
    out = np.exp(TWO_PI_I * phases).sum(axis=1)
    return complex(out[0]) if np.ndim(n) == 0 else out


def _split_q(q: int, m: int) -> tuple[int, int]:
    d = math.gcd(q, m)
    return d, q // d


def mu_s(q: int, a: int, s: int, m: int) -> complex:
    """Closed form of the sum of e(ar/q) over units r mod q with r = s mod gcd(q, m)."""
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) != 1")
    d, q0 = _split_q(q, m)
    if math.gcd(q0, m) != 1:
        return 0j
    mu0 = mobius(q0)
    if mu0 == 0:
        return 0j
    # s' with s'd = -s mod p for each prime p | q0, glued by CRT
    s_prime = (-s * pow(d, -1, q0)) % q0 if q0 > 1 else 0
    return mu0 * e(Fraction(a * s % q, q) + Fraction(a * s_prime % q0, q0))


def mu_s_direct(q: int, a: int, s: int, m: int) -> complex:
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) != 1")
    d = math.gcd(q, m)
    r = _units(q)
    r = r[(r - s) % d == 0]
    return complex(np.exp(TWO_PI_I * (a * r % q / q)).sum())


@dataclass(frozen=True)
class SingularSeriesSpec:
    modulus: Modulus
    h: int
    P: int = 1

    def __post_init__(self):
        if self.P < 1:
            raise ValueError("truncation P must be at least 1")

    def with_classes(self, s1: int, s2: int) -> "SingularSeriesSpec":
        return SingularSeriesSpec(Modulus(self.modulus.m, s1, s2), self.h, self.P)


def singular_finite_exact(spec: SingularSeriesSpec) -> Fraction:
    """Sum over q <= P of mu(q0)^2 c_q0(-h) c_d(s1+s2-h) / phi(q0 m)^2."""
    m, s1, s2 = spec.modulus.m, spec.modulus.s1, spec.modulus.s2
    h = spec.h
    phi_m = phi(m)
    total = Fraction(0)
    for q in range(1, spec.P + 1):
        d, q0 = _split_q(q, m)
        if math.gcd(q0, m) != 1 or mobius(q0) == 0:
            continue
        num = ramanujan_c(q0, -h) * ramanujan_c(d, s1 + s2 - h)
        if num:
            total += Fraction(num, (phi(q0) * phi_m) ** 2)
    return total


def singular_finite(spec: SingularSeriesSpec) -> float:
    return float(singular_finite_exact(spec))


def singular_finite_direct(spec: SingularSeriesSpec) -> complex:
    """Finite singular series straight from the mu_s definition (slow, for checks)."""
    m, s1, s2 = spec.modulus.m, spec.modulus.s1, spec.modulus.s2
    total = 0j
    for q in range(1, spec.P + 1):
        _, q0 = _split_q(q, m)
        w = phi(q0 * m) ** 2
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            total += (
                mu_s_direct(q, a, s1, m) * mu_s_direct(q, a, s2, m)
                * e(Fraction(-a * spec.h % q, q)) / w
            )
    return total


@lru_cache(maxsize=8)
def _odd_prime_array(bound: int) -> np.ndarray:
    return sieve_primes(bound).primes[1:].astype(np.float64)


@lru_cache(maxsize=64)
def _base_product(m: int, bound: int) -> float:
    """Product of 1 - 1/(p-1)^2 over odd primes p <= bound with p not dividing m."""
    p = _odd_prime_array(bound)
    keep = np.ones(len(p), dtype=bool)
    for r, _ in factorize(m) if m > 1 else []:
        keep &= p != r
    terms = np.log1p(-1.0 / (p[keep] - 1.0) ** 2)
    return math.exp(math.fsum(terms.tolist()))


def product_tail_estimate(bound: int) -> float:
    """Bound on |log| of the omitted factors: integral of dt / (t^2 log t) past bound."""
    return 1.0 / (bound * math.log(bound))


def singular_product(spec: SingularSeriesSpec, prime_bound: int = PRODUCT_PRIME_BOUND) -> float:
    """Euler-product form of the singular series S_{s1 s2}(h)."""
    m, s1, s2, h = spec.modulus.m, spec.modulus.s1, spec.modulus.s2, spec.h
    if (s1 + s2 - h) % m:
        return 0.0
    if m % 2 and h % 2:
        return 0.0
    value = m / phi(m) ** 2
    if m % 2:
        value *= 2.0  # p = 2 divides h but not m
    value *= _base_product(m, prime_bound)
    for p, _ in factorize(abs(h)) if h else []:
        if p == 2 or m % p == 0:
            continue
        # swap the generic factor for 1 + 1/(p-1)
        value *= (p - 1) / (p - 2) if p <= prime_bound else p / (p - 1)
    log.debug("singular product truncated at %d, tail <= %.3g", prime_bound, product_tail_estimate(prime_bound))
    return value


def singular_S(spec: SingularSeriesSpec, prime_bound: int = PRODUCT_PRIME_BOUND) -> float:
    s1, s2 = spec.modulus.s1, spec.modulus.s2
    return (
        singular_product(spec.with_classes(s1, s1), prime_bound)
        + 2 * singular_product(spec, prime_bound)
        + singular_product(spec.with_classes(s2, s2), prime_bound)
    )


def tail_bound(h: int, P: int) -> float:
    """h tau(h) / (P phi(h)), tau counting divisors."""
    h = abs(h)
    return h * tau(h) / (P * phi(h))


@dataclass
class RepCount:
    n: int
    weighted: float
    unweighted: int
    by_class: dict[str, dict]

    def to_json(self) -> dict:
        return {"n": self.n, "weighted": self.weighted, "unweighted": self.unweighted,
                "by_class": self.by_class}


def rep_count(n: int, modulus: Modulus, table: PrimeTable) -> RepCount:
    """Ordered prime pairs p1 + p2 = n with both primes in the classes s1, s2 mod m.

    ``by_class`` holds the (s1, s1), (s1, s2), (s2, s2) components; the
    total is the first plus twice the second plus the third.
    """
    if table.limit < n:
        raise ValueError(f"prime table up to {table.limit} cannot cover n = {n}")
    m, s1, s2 = modulus.m, modulus.s1 % modulus.m, modulus.s2 % modulus.m
    classes = sorted({s1, s2})
    primes = table.primes[table.primes < n]
    res = primes % m
    sel = np.isin(res, classes)
    p = primes[sel]
    q = n - p
    ok = table.mask[q] & np.isin(q % m, classes)
    p, q = p[ok], q[ok]
    w = np.log(p) * np.log(q)
    rp, rq = p % m, q % m

    def component(a, b):
        pick = (rp == a) & (rq == b)
        return {"count": int(pick.sum()), "weighted": math.fsum(w[pick].tolist())}

    by_class = {f"{s1},{s1}": component(s1, s1), f"{s1},{s2}": component(s1, s2),
                f"{s2},{s2}": component(s2, s2)}
    if s1 == s2:
        by_class = {f"{s1},{s1}": by_class[f"{s1},{s1}"]}
    return RepCount(n=n, weighted=math.fsum(w.tolist()), unweighted=int(len(p)), by_class=by_class)


def f_s_eval(alpha, s: int, modulus: Modulus, table: PrimeTable) -> complex:
    """Sum of log p * e(alpha p) over primes p <= table.limit with p = s mod m."""
    p = table.in_class(s) if table.m == modulus.m else table.primes[table.primes % modulus.m == s % modulus.m]
    if isinstance(alpha, Fraction):
        a, q = alpha.numerator, alpha.denominator
        frac = (a * p % q) / q
    else:
        frac = np.mod(alpha * p.astype(np.float64), 1.0)
    return complex(np.sum(np.log(p) * np.exp(TWO_PI_I * frac)))


@dataclass
class MajorArcRow:
    q: int
    a: int
    relative_error: float


def major_arc_diagnostic(N: int, q_max: int, modulus: Modulus, s: int | None = None,
                         table: PrimeTable | None = None) -> list[MajorArcRow]:
    """|f_s(a/q) - N mu_s(q, a) / phi(q0 m)| / N for q <= q_max."""
    if N > 10**7:
        raise ValueError("major arc diagnostic is limited to N <= 10^7")
    s = modulus.s1 if s is None else s
    m = modulus.m
    if table is None or table.limit != N:
        table = sieve_primes(N, m)
    rows = []
    for q in range(1, q_max + 1):
        _, q0 = _split_q(q, m)
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            f = f_s_eval(Fraction(a, q), s, modulus, table)
            expected = N * mu_s(q, a, s, m) / phi(q0 * m)
            rows.append(MajorArcRow(q, a, abs(f - expected) / N))
    return rows


def classify_major_arc(rows: list[MajorArcRow], ok: float = 0.02, fail: float = 0.05) -> str:
    worst = max(r.relative_error for r in rows)
    if worst <= ok:
        return "ok"
    return "warn" if worst <= fail else "fail"
