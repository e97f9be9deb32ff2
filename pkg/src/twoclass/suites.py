"""Invariant sweeps shared by the ``verify`` command and the test suite.

Each suite returns a plain dict with a ``passed`` flag and counters so
it can be printed or serialized as is.
"""
from __future__ import annotations

import math

import numpy as np

from .analytic import (
    classify_major_arc,
    major_arc_diagnostic,
    mu_s,
    mu_s_direct,
    ramanujan_c,
    ramanujan_c_direct,
)
from .arith import Modulus, factorize, sieve_primes
from .genus import ambiguous_classes, compare_square_classes, genus_count_expected
from .quadforms import is_fundamental
from .search import census, exhaustive_crosscheck


def ramanujan_sweep(q_max: int = 500, n_max: int = 500) -> dict:
    ns = np.arange(-n_max, n_max + 1)
    checked = mismatches = 0
    worst = 0.0
    for q in range(1, q_max + 1):
        direct = ramanujan_c_direct(q, ns)
        rounded = np.rint(direct.real).astype(np.int64)
        worst = max(worst, float(np.abs(direct - rounded).max()))
        closed = np.array([ramanujan_c(q, int(n)) for n in ns], dtype=np.int64)
        mismatches += int((closed != rounded).sum())
        checked += len(ns)
    return {"suite": "ramanujan_c", "checked": checked, "mismatches": mismatches,
            "max_rounding_gap": worst, "passed": mismatches == 0 and worst < 1e-6}


def mu_s_sweep(q_max: int = 200, residues=(7, 11), moduli=(8, 24), tol: float = 1e-10) -> dict:
    checked = 0
    worst = 0.0
    branches = {"q0 coprime to m": 0, "q0 shares a prime with m": 0, "q0 not squarefree": 0}
    for m in moduli:
        for s in residues:
            for q in range(1, q_max + 1):
                q0 = q // math.gcd(q, m)
                if math.gcd(q0, m) != 1:
                    branch = "q0 shares a prime with m"
                elif any(e > 1 for _, e in factorize(q0)):
                    branch = "q0 not squarefree"
                else:
                    branch = "q0 coprime to m"
                for a in range(1, q + 1):
                    if math.gcd(a, q) != 1:
                        continue
                    gap = abs(mu_s(q, a, s, m) - mu_s_direct(q, a, s, m))
                    worst = max(worst, gap)
                    branches[branch] += 1
                    checked += 1
    return {"suite": "mu_s", "checked": checked, "max_abs_error": worst,
            "branches": branches, "passed": worst < tol}


def oracles() -> dict:
    parts = [ramanujan_sweep(), mu_s_sweep()]
    return {"suite": "oracles", "parts": parts, "passed": all(p["passed"] for p in parts)}


def odd_prime_pair_discs(bound: int):
    """Fundamental discriminants -4 p1 p2 (odd p1 < p2) with |disc| <= bound."""
    primes = [int(p) for p in sieve_primes(max(bound // 12, 3)).primes if p > 2]
    for i, p1 in enumerate(primes):
        for p2 in primes[i + 1:]:
            if 4 * p1 * p2 > bound:
                break
            if (p1 * p2) % 4 == 1:
                yield p1, p2, -4 * p1 * p2


def hasse_sweep(bound: int = 20000) -> dict:
    discs = classes = disagreements = 0
    failures = []
    for p1, p2, disc in odd_prime_pair_discs(bound):
        discs += 1
        for cmp in compare_square_classes(disc):
            classes += 1
            if not cmp.agree:
                disagreements += 1
                failures.append({"disc": disc, "form": list(cmp.form), "n": cmp.represented})
    return {"suite": "hasse", "discriminants": discs, "classes": classes,
            "disagreements": disagreements, "failures": failures[:20],
            "passed": disagreements == 0 and discs > 0}


def genus_count_sweep(bound: int = 20000) -> dict:
    tested = bad = 0
    failures = []
    for k in range(3, bound + 1):
        disc = -k
        if not is_fundamental(disc):
            continue
        tested += 1
        got = len(ambiguous_classes(disc))
        want = genus_count_expected(disc)
        if got != want:
            bad += 1
            failures.append({"disc": disc, "ambiguous": got, "expected": want})
    return {"suite": "genus_count", "tested": tested, "mismatches": bad,
            "failures": failures[:20], "passed": bad == 0}


def hasse() -> dict:
    parts = [hasse_sweep(), genus_count_sweep()]
    return {"suite": "hasse", "parts": parts, "passed": all(p["passed"] for p in parts)}


def census_crosscheck(x_small: int = 10**5) -> dict:
    report = exhaustive_crosscheck(x_small)
    grid = [10**k for k in range(1, int(math.log10(x_small)) + 1)]
    records = census(2, grid)
    counts = [r.count for r in records]
    monotone = all(a <= b for a, b in zip(counts, counts[1:]))
    shaped = set(report["shaped"].get(2, []))
    agrees = records[-1].count == len([d for d in shaped if d <= grid[-1]])
    return {"suite": "census-crosscheck", "crosscheck": report,
            "census": [r.to_json() for r in records],
            "monotone": monotone, "census_matches_exhaustive": agrees,
            "passed": not report["mismatches"] and monotone and agrees}


def major_arc(N: int = 10**6, q_max: int = 12, modulus: Modulus = Modulus(24, 7, 11)) -> dict:
    table = sieve_primes(N, modulus.m)
    out = {}
    statuses = []
    for s in (modulus.s1, modulus.s2):
        rows = major_arc_diagnostic(N, q_max, modulus, s=s, table=table)
        status = classify_major_arc(rows)
        statuses.append(status)
        out[str(s)] = {"status": status,
                       "max_relative_error": max(r.relative_error for r in rows),
                       "rows": [(r.q, r.a, r.relative_error) for r in rows]}
    return {"suite": "major-arc", "N": N, "q_max": q_max, "m": modulus.m, "by_class": out,
            "warnings": statuses.count("warn"), "passed": "fail" not in statuses}


SUITES = {
    "oracles": oracles,
    "hasse": hasse,
    "census-crosscheck": census_crosscheck,
    "major-arc": major_arc,
}
