"""Positive definite binary quadratic forms and their class groups.

Forms are plain ``(a, b, c)`` triples standing for ax^2 + bxy + cy^2 with
discriminant b^2 - 4ac < 0. Class groups are computed by brute-force
enumeration of reduced forms; no analytic class number formula is used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .arith import factorize
from .errors import CapacityError, PreconditionError

DISC_MAX = 10**9
CENSUS_CAP = 10**4
_NUMPY_THRESHOLD = 10**5


class NormNotRepresented(ValueError):
    pass


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 or (abs(b) != a and a != c)

    def evaluate(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self):
        return f"({self.a}, {self.b}, {self.c})"


def is_discriminant(disc: int) -> bool:
    return disc < 0 and disc % 4 in (0, 1)


def is_fundamental(disc: int) -> bool:
    if not is_discriminant(disc):
        return False
    if disc % 4 == 1:
        return all(e == 1 for _, e in factorize(-disc))
    k = -disc // 4
    return k % 4 in (1, 2) and all(e == 1 for _, e in factorize(k))


def principal_form(disc: int) -> QuadForm:
    if not is_discriminant(disc):
        raise ValueError(f"{disc} is not a negative discriminant")
    b = disc % 2
    return QuadForm(1, b, (b * b - disc) // 4)


def _normalize(a: int, b: int, c: int) -> tuple[int, int, int]:
    # shift b into (-a, a]
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce(f) -> QuadForm:
    """Unique reduced representative of the class of ``f``."""
    a, b, c = f
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"{tuple(f)} is not positive definite")
    a, b, c = _normalize(a, b, c)
    while a > c:
        a, b, c = _normalize(c, -b, a)
    if a == c and b < 0:
        b = -b
    return QuadForm(a, b, c)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose(f, g) -> QuadForm:
    """Gauss composition of two primitive forms of the same discriminant."""
    a1, b1, c1 = f
    a2, b2, c2 = g
    if b1 * b1 - 4 * a1 * c1 != b2 * b2 - 4 * a2 * c2:
        raise ValueError(f"discriminant mismatch: {tuple(f)} vs {tuple(g)}")
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce((a3, b3, c3))


def inverse(f) -> QuadForm:
    a, b, c = f
    return reduce((a, -b, c))


def power(f, n: int) -> QuadForm:
    if n < 0:
        return power(inverse(f), -n)
    result = principal_form(QuadForm(*f).disc)
    base = reduce(f)
    while n:
        if n & 1:
            result = compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def is_principal(f) -> bool:
    return reduce(f).a == 1


def enumerate_reduced(disc: int, max_disc: int = DISC_MAX) -> list[QuadForm]:
    """All primitive reduced forms of discriminant ``disc``, sorted."""
    if not is_discriminant(disc):
        raise ValueError(f"{disc} is not a negative discriminant (must be < 0 and 0 or 1 mod 4)")
    if -disc > max_disc:
        raise CapacityError(f"|disc| = {-disc} exceeds enumeration bound {max_disc}")
    forms = []
    a_max = math.isqrt(-disc // 3)
    use_numpy = -disc > _NUMPY_THRESHOLD
    for b in range(disc % 2, a_max + 1, 2):
        n = (b * b - disc) // 4
        lo, hi = max(b, 1), math.isqrt(n)
        if lo > hi:
            continue
        if use_numpy:
            cand = np.arange(lo, hi + 1, dtype=np.int64)
            hits = cand[n % cand == 0].tolist()
        else:
            hits = [a for a in range(lo, hi + 1) if n % a == 0]
        for a in hits:
            c = n // a
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
            if 0 < b < a < c:
                forms.append(QuadForm(a, -b, c))
    forms.sort(key=lambda f: (f.a, abs(f.b), -f.b))
    return forms


def class_number(disc: int) -> int:
    return len(enumerate_reduced(disc))


def class_order(f, h: int | None = None, max_steps: int = 10**6) -> int:
    """Order of the class of ``f``.

    With the class number ``h`` known the order is found by stripping
    prime factors from h; otherwise by repeated composition.
    """
    f = reduce(f)
    if h is not None:
        order = h
        for p, _ in factorize(h):
            while order % p == 0 and is_principal(power(f, order // p)):
                order //= p
        return order
    g, n = f, 1
    while not is_principal(g):
        g = compose(g, f)
        n += 1
        if n > max_steps:
            raise CapacityError(f"order of {f} exceeds {max_steps}")
    return n


def _v2(n: int) -> int:
    return (n & -n).bit_length() - 1


def _p_group_type(counts: list[int], p: int) -> list[int]:
    """Elementary divisors of an abelian p-group.

    ``counts[k]`` is the number of elements killed by p^k.
    """
    ranks = []
    for k in range(1, len(counts)):
        r = round(math.log(counts[k] // counts[k - 1], p))
        ranks.append(r)
    # ranks[k-1] = number of cyclic factors of order >= p^k
    divisors = []
    for k in range(len(ranks)):
        nxt = ranks[k + 1] if k + 1 < len(ranks) else 0
        divisors += [p ** (k + 1)] * (ranks[k] - nxt)
    return sorted(divisors)


@dataclass
class ClassGroupProfile:
    disc: int
    h: int
    two_sylow_type: list[int]
    two_rank: int
    order_census: dict[int, int] | None = None
    method: str = "enumeration"
    census_cap: int = CENSUS_CAP
    two_sylow: list[QuadForm] = field(default_factory=list, repr=False)

    @property
    def two_part(self) -> int:
        return 1 << _v2(self.h)

    def to_json(self) -> dict:
        out = {"disc": self.disc, "h": self.h, "two_sylow_type": list(self.two_sylow_type)}
        if self.order_census is not None:
            out["census"] = {str(k): v for k, v in sorted(self.order_census.items())}
        return out


def two_sylow_subgroup(forms: list[QuadForm], h: int) -> list[QuadForm]:
    """Every element of the 2-Sylow subgroup, as reduced forms.

    Raises each class to the odd part of h until 2^v2(h) distinct
    images have been collected.
    """
    size = 1 << _v2(h)
    odd = h >> _v2(h)
    seen = {}
    for f in forms:
        g = power(f, odd)
        seen.setdefault(g, None)
        if len(seen) == size:
            break
    if len(seen) != size:
        raise AssertionError(f"collected {len(seen)} of {size} 2-Sylow elements")
    return sorted(seen, key=lambda f: (f.a, abs(f.b), -f.b))


def two_sylow_type_of(elements: list[QuadForm]) -> list[int]:
    size = len(elements)
    e = _v2(size)
    counts = []
    for k in range(e + 1):
        counts.append(sum(1 for g in elements if is_principal(power(g, 1 << k))))
    return _p_group_type(counts, 2)


def order_census(forms: list[QuadForm], h: int) -> dict[int, int]:
    census: dict[int, int] = {}
    for f in forms:
        o = class_order(f, h)
        census[o] = census.get(o, 0) + 1
    return census


def class_group_profile(
    disc: int,
    census: bool = True,
    census_cap: int = CENSUS_CAP,
    max_disc: int = DISC_MAX,
) -> ClassGroupProfile:
    forms = enumerate_reduced(disc, max_disc=max_disc)
    h = len(forms)
    sylow = two_sylow_subgroup(forms, h)
    ttype = two_sylow_type_of(sylow)
    involutions = sum(1 for g in sylow if is_principal(compose(g, g)))
    profile = ClassGroupProfile(
        disc=disc,
        h=h,
        two_sylow_type=ttype,
        two_rank=_v2(involutions),
        method="enumeration+2-sylow-powering",
        census_cap=census_cap,
        two_sylow=sylow,
    )
    if census and h <= census_cap:
        profile.order_census = order_census(forms, h)
    return profile


def form_from_ideal_norm(disc: int, n: int, b_hint: int | None = None) -> QuadForm:
    """Form (n, b, c) attached to an ideal of norm n.

    ``b_hint`` picks the square root of disc mod 4n; it is shifted into
    (-n, n]. Without a hint the least non-negative root is used.
    """
    if n < 1:
        raise ValueError("norm must be positive")
    if b_hint is None:
        roots = [b for b in range(0, 2 * n) if (b * b - disc) % (4 * n) == 0]
        if not roots:
            raise NormNotRepresented(f"no b with b^2 = {disc} mod {4 * n}")
        b = roots[0]
    else:
        b = b_hint
    b = b + 2 * n * ((n - b) // (2 * n))
    if (b * b - disc) % (4 * n):
        raise NormNotRepresented(f"{b_hint}^2 is not {disc} mod {4 * n}")
    c = (b * b - disc) // (4 * n)
    if math.gcd(math.gcd(n, b), c) != 1:
        raise NormNotRepresented(f"form ({n}, {b}, {c}) is not primitive")
    return QuadForm(n, b, c)


@dataclass
class AnkenyChowlaCertificate:
    w: int
    x: int
    m: int
    d: int
    J: QuadForm
    order: int
    divisible: bool
    exact: bool

    @property
    def passed(self) -> bool:
        return self.divisible

    def to_json(self) -> dict:
        return {
            "w": self.w, "x": self.x, "m": self.m, "d": self.d,
            "J": list(self.J), "order": self.order,
            "divisible": self.divisible, "exact": self.exact, "pass": self.passed,
        }


def ankeny_chowla_violations(w: int, x: int, m: int) -> list[str]:
    bad = []
    if m <= 1:
        bad.append("m > 1")
    if w % 2 == 0:
        bad.append("w odd")
    if x % 2:
        bad.append("x even")
    if math.gcd(x, w) != 1:
        bad.append("gcd(x, w) = 1")
    if not (0 < x <= w**m - 4):
        bad.append("0 < x <= w^m - 4")
    return bad


def verify_ankeny_chowla(w: int, x: int, m: int) -> AnkenyChowlaCertificate:
    """Check that the ideal of norm w above x + sqrt(-d) has order 2m."""
    bad = ankeny_chowla_violations(w, x, m)
    if bad:
        raise PreconditionError(bad)
    d = w ** (2 * m) - x * x
    # the ideal [w, x + sqrt(-d)] is the form (w, -2x, w^(2m-1))
    J = reduce((w, -2 * x, w ** (2 * m - 1)))
    order = class_order(J)
    return AnkenyChowlaCertificate(
        w=w, x=x, m=m, d=d, J=J, order=order,
        divisible=order % (2 * m) == 0, exact=order == 2 * m,
    )
