"""Genus theory: Hilbert symbols, Hasse's square-class test, certificates.

The square-class test for an ideal of norm n in Q(sqrt(-D)) is

    class is a square  <=>  (n, -D)_p = +1 for every prime p | D

and is evaluated with the local Hilbert symbols below, independently of
the form arithmetic in :mod:`twoclass.quadforms`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arith import factorize, is_prime, kronecker
from .errors import CapacityError, PreconditionError
from .quadforms import (
    DISC_MAX,
    QuadForm,
    class_group_profile,
    compose,
    enumerate_reduced,
    verify_ankeny_chowla,
)

INF = math.inf


def _split_valuation(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def _eps(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def hilbert_symbol(a: int, b: int, p) -> int:
    """Local Hilbert symbol (a, b)_p over Q; ``p`` is a prime or ``INF``."""
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero arguments")
    if p == INF:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split_valuation(a, p)
    beta, v = _split_valuation(b, p)
    if p == 2:
        e = _eps(u) * _eps(v) + alpha * _omega(v) + beta * _omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * _eps(p)) % 2 else 1
    return sign * kronecker(u, p) ** beta * kronecker(v, p) ** alpha


def reciprocity_product(a: int, b: int) -> int:
    """Product of (a, b)_v over all places; +1 by Hilbert reciprocity."""
    places = {2, INF} | {p for p, _ in factorize(abs(a * b))}
    prod = 1
    for p in places:
        prod *= hilbert_symbol(a, b, p)
    return prod


@dataclass
class HasseCheck:
    D: int
    norm: int
    symbols: dict[int, int]
    is_square_class: bool
    reciprocity_ok: bool

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "norm": self.norm,
            "symbols": {str(p): s for p, s in sorted(self.symbols.items())},
            "square": self.is_square_class,
            "reciprocity_ok": self.reciprocity_ok,
        }


def hasse_check(norm: int, D: int) -> HasseCheck:
    """Square-class verdict for an ideal of norm ``norm`` in Q(sqrt(-D))."""
    if norm < 1 or D < 1:
        raise ValueError("norm and D must be positive")
    symbols = {p: hilbert_symbol(norm, -D, p) for p, _ in factorize(D)}
    return HasseCheck(
        D=D,
        norm=norm,
        symbols=symbols,
        is_square_class=all(s == 1 for s in symbols.values()),
        reciprocity_ok=reciprocity_product(norm, -D) == 1,
    )


def hasse_is_square_class(norm: int, p1: int, p2: int) -> HasseCheck:
    """Hasse test in Q(sqrt(-p1 p2)) with D = 4 p1 p2."""
    if p1 == p2 or not (is_prime(p1) and is_prime(p2)) or 2 in (p1, p2):
        raise ValueError(f"need two distinct odd primes, got {p1}, {p2}")
    return hasse_check(norm, 4 * p1 * p2)


def ambiguous_classes(disc: int) -> list[QuadForm]:
    """Reduced forms of order dividing 2: b = 0, a = b or a = c."""
    return [f for f in enumerate_reduced(disc) if f.b == 0 or f.a == f.b or f.a == f.c]


def represented_value(f, disc: int, radius: int = 20) -> tuple[int, int, int]:
    """Smallest value of f coprime to 2*disc with |x|, |y| <= radius."""
    best = None
    for x in range(-radius, radius + 1):
        for y in range(0, radius + 1):
            if x == 0 and y == 0:
                continue
            n = QuadForm(*f).evaluate(x, y)
            if math.gcd(n, 2 * disc) == 1 and (best is None or n < best[0]):
                best = (n, x, y)
    if best is None:
        raise ValueError(f"{tuple(f)} represents nothing coprime to {2 * disc} in the scan box")
    return best


@dataclass
class SquareClassComparison:
    form: QuadForm
    represented: int
    at: tuple[int, int]
    brute_force: bool
    hasse: bool

    @property
    def agree(self) -> bool:
        return self.brute_force == self.hasse


def compare_square_classes(disc: int, radius: int = 20) -> list[SquareClassComparison]:
    """Exhaustive squaring image versus the Hilbert-symbol verdict per class."""
    forms = enumerate_reduced(disc)
    squares = {compose(f, f) for f in forms}
    D = -disc
    out = []
    for f in forms:
        n, x, y = represented_value(f, disc, radius)
        out.append(SquareClassComparison(
            form=f, represented=n, at=(x, y),
            brute_force=f in squares,
            hasse=hasse_check(n, D).is_square_class,
        ))
    return out


def _check(name: str, ok: bool) -> dict:
    return {"name": name, "ok": bool(ok)}


def alg_preconditions(ell: int, w: int, p1: int, p2: int, m_param: int | None = None) -> list[dict]:
    m = m_param
    if m is None and w % 3 == 0 and math.isqrt(w // 3) ** 2 == w // 3:
        m = math.isqrt(w // 3)
    checks = [
        _check("ell >= 2", ell >= 2),
        _check("w = 3*m^2 with m odd", m is not None and m % 2 == 1 and w == 3 * m * m),
        _check("p1 prime", is_prime(p1)),
        _check("p2 prime", is_prime(p2)),
        _check("p1 = 11 mod 24", p1 % 24 == 11),
        _check("p2 = 7 mod 24", p2 % 24 == 7),
    ]
    ok_sum = ell >= 1 and p1 + p2 == 2 * w ** (2 ** (ell - 1))
    checks.append(_check("p1 + p2 = 2*w^(2^(ell-1))", ok_sum))
    return checks


@dataclass
class PropositionReport:
    witness: dict
    preconditions: list[dict]
    ambiguous: dict[str, HasseCheck] = field(default_factory=dict)
    j_classes: dict[str, HasseCheck] = field(default_factory=dict)
    ankeny_chowla: dict | None = None
    two_sylow_type: list[int] | None = None
    expected_type: list[int] | None = None
    method: str = "profile"
    hasse_ok: bool = False

    @property
    def passed(self) -> bool:
        if self.two_sylow_type is None:
            return self.hasse_ok
        return self.two_sylow_type == self.expected_type

    @property
    def consistent(self) -> bool:
        """Hasse route and direct class-group route agree."""
        return self.two_sylow_type is None or self.hasse_ok == self.passed

    def to_json(self) -> dict:
        symbols = {}
        for label, chk in {**self.ambiguous, **self.j_classes}.items():
            symbols[label] = chk.to_json()
        return {
            "witness": self.witness,
            "preconditions": self.preconditions,
            "symbols": symbols,
            "ankeny_chowla": self.ankeny_chowla,
            "type": self.two_sylow_type,
            "expected_type": self.expected_type,
            "method": self.method,
            "hasse_ok": self.hasse_ok,
            "pass": self.passed,
        }


def verify_proposition_alg(witness, max_disc: int = DISC_MAX) -> PropositionReport:
    """Certify that Q(sqrt(-p1 p2)) has 2-class group (2, 2^ell).

    ``witness`` needs attributes ``ell``, ``w``, ``p1``, ``p2`` (and
    optionally ``m_param``). Hypotheses are checked one by one and any
    failure raises :class:`PreconditionError` naming them.
    """
    ell, w, p1, p2 = witness.ell, witness.w, witness.p1, witness.p2
    m_param = getattr(witness, "m_param", None)
    pre = alg_preconditions(ell, w, p1, p2, m_param)
    failed = [c["name"] for c in pre if not c["ok"]]
    if failed:
        raise PreconditionError(failed)

    D = 4 * p1 * p2
    p = min(p1, p2)
    report = PropositionReport(
        witness={"ell": ell, "w": w, "p1": p1, "p2": p2, "d": p1 * p2},
        preconditions=pre,
        expected_type=[2, 2**ell],
    )
    # the three classes of order 2 have norms 2, p, 2p
    for label, norm in (("A", 2), ("B", p), ("C", 2 * p)):
        report.ambiguous[label] = hasse_check(norm, D)
    for label, norm in (("J", w), ("JA", 2 * w), ("JB", p * w), ("JC", 2 * p * w)):
        report.j_classes[label] = hasse_check(norm, D)

    x = abs(p1 - p2) // 2
    cert = verify_ankeny_chowla(w, x, 2 ** (ell - 1))
    report.ankeny_chowla = cert.to_json()

    # one non-square class of order 2 forces the first invariant to be 2;
    # three non-square classes among J, JA, JB, JC pin the second to 2^ell
    amb_nonsquare = sum(not c.is_square_class for c in report.ambiguous.values())
    j_nonsquare = sum(not c.is_square_class for c in report.j_classes.values())
    report.hasse_ok = amb_nonsquare >= 1 and j_nonsquare >= 3 and cert.exact

    try:
        profile = class_group_profile(-D, census=False, max_disc=max_disc)
    except CapacityError:
        report.method = "hasse-only"
    else:
        report.two_sylow_type = profile.two_sylow_type
    return report


def k1_preconditions(p1: int, p2: int) -> list[dict]:
    return [
        _check("p1 prime", is_prime(p1)),
        _check("p2 prime", is_prime(p2)),
        _check("p1 = 3 mod 8", p1 % 8 == 3),
        _check("p2 = 7 mod 8*p1", p2 % (8 * p1) == 7),
        _check("p1 < p2", p1 < p2),
    ]


@dataclass
class K1Report:
    p1: int
    p2: int
    disc: int
    preconditions: list[dict]
    symbols: dict[str, HasseCheck]
    two_sylow_type: list[int] | None

    @property
    def hasse_ok(self) -> bool:
        return all(not c.is_square_class for c in self.symbols.values())

    @property
    def passed(self) -> bool:
        if self.two_sylow_type is None:
            return self.hasse_ok
        return self.two_sylow_type == [2, 2]

    def to_json(self) -> dict:
        return {
            "p1": self.p1, "p2": self.p2, "disc": self.disc,
            "preconditions": self.preconditions,
            "symbols": {k: v.to_json() for k, v in self.symbols.items()},
            "type": self.two_sylow_type,
            "hasse_ok": self.hasse_ok,
            "pass": self.passed,
        }


def verify_proposition_k1(p1: int, p2: int, max_disc: int = DISC_MAX) -> K1Report:
    pre = k1_preconditions(p1, p2)
    failed = [c["name"] for c in pre if not c["ok"]]
    if failed:
        raise PreconditionError(failed)
    D = 4 * p1 * p2
    symbols = {label: hasse_check(norm, D) for label, norm in (("A", 2), ("B", p1), ("C", 2 * p1))}
    try:
        ttype = class_group_profile(-D, census=False, max_disc=max_disc).two_sylow_type
    except CapacityError:
        ttype = None
    return K1Report(p1=p1, p2=p2, disc=-D, preconditions=pre, symbols=symbols, two_sylow_type=ttype)


def construct_type_2_2(p1_bound: int, pairs_per_p1: int = 2):
    """Yield K1Reports for p1 = 3 mod 8 up to ``p1_bound``.

    For each p1 the first ``pairs_per_p1`` primes p2 = 7 mod 8*p1 with
    p2 > p1 are used.
    """
    if p1_bound < 3:
        raise ValueError("p1_bound must be at least 3")
    for p1 in range(3, p1_bound + 1, 8):
        if not is_prime(p1):
            continue
        found = 0
        p2 = 7
        while found < pairs_per_p1:
            if p2 > p1 and is_prime(p2):
                yield verify_proposition_k1(p1, p2)
                found += 1
            p2 += 8 * p1


def genus_count_expected(disc: int) -> int:
    return 2 ** (len(factorize(-disc)) - 1)

