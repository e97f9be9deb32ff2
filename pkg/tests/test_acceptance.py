"""Acceptance gate: one test and one printed pass/fail line per criterion."""
import time

from conftest import record

from twoclass.analytic import (
    SingularSeriesSpec,
    rep_count,
    singular_S,
    singular_finite,
    singular_product,
    tail_bound,
)
from twoclass.arith import Modulus
from twoclass.quadforms import class_group_profile
from twoclass.genus import verify_proposition_k1
from twoclass.search import F, census, run_search
from twoclass.suites import (
    genus_count_sweep,
    hasse_sweep,
    major_arc,
    mu_s_sweep,
    ramanujan_sweep,
)

M = Modulus(24, 7, 11)

# criterion 9 floor: half the census ratio observed at X = 10^5 (0.5964),
# rounded down; fixed once and not re-derived from later runs
CENSUS_FLOOR = 0.29


def test_criterion_1_smallest_instances():
    t0 = time.perf_counter()
    p = class_group_profile(-308)
    k1 = verify_proposition_k1(3, 7)
    q = class_group_profile(-84)
    dt = time.perf_counter() - t0
    ok = (p.h == 8 and p.two_sylow_type == [2, 4] and q.two_sylow_type == [2, 2]
          and k1.passed and dt < 1.0)
    record(1, ok, f"disc -308: h={p.h} type={p.two_sylow_type}; disc -84: type={q.two_sylow_type}; {dt:.3f}s")
    assert ok


def test_criterion_2_zero_counterexamples():
    bad, total = [], 0
    for ell in (2, 3):
        seen = set()
        for w in run_search(ell, 10**7):
            if w.d in seen:
                continue
            seen.add(w.d)
            total += 1
            ttype = class_group_profile(-4 * w.d, census=False).two_sylow_type
            if ttype != [2, 2**ell]:
                bad.append((ell, w.d, ttype))
    ok = not bad and total > 0
    record(2, ok, f"{total} witnesses with d <= 1e7 certified, {len(bad)} counterexamples")
    assert ok, bad


def test_criterion_3_hasse_vs_brute_force():
    r = hasse_sweep(20000)
    record(3, r["passed"], f"{r['discriminants']} discriminants, {r['classes']} classes, "
                           f"{r['disagreements']} disagreements")
    assert r["passed"], r["failures"]


def test_criterion_4_genus_count():
    r = genus_count_sweep(20000)
    record(4, r["passed"], f"{r['tested']} fundamental discriminants, {r['mismatches']} mismatches")
    assert r["passed"], r["failures"]


def test_criterion_5_closed_form_oracles():
    rc = ramanujan_sweep(500, 500)
    mu = mu_s_sweep(200, tol=1e-10)
    branches_hit = all(v > 0 for v in mu["branches"].values())
    ok = rc["passed"] and mu["passed"] and branches_hit
    record(5, ok, f"c_q: {rc['checked']} values, {rc['mismatches']} mismatches; "
                  f"mu_s: {mu['checked']} values, max err {mu['max_abs_error']:.1e}, branches {mu['branches']}")
    assert ok


def test_criterion_6_singular_series_convergence():
    worst = 0.0
    ok = True
    for h in (18, 162, 1458):
        prod = singular_product(SingularSeriesSpec(M, h))
        for P in (10**2, 10**3, 10**4):
            gap = abs(singular_finite(SingularSeriesSpec(M, h, P)) - prod)
            bound = 10 * tail_bound(h, P)
            worst = max(worst, gap / bound)
            ok &= gap <= bound
    record(6, ok, f"worst gap / (10 h tau(h) / (P phi(h))) = {worst:.2e}")
    assert ok


def test_criterion_7_vanishing_law():
    bad = []
    for s1, s2 in ((7, 11), (7, 7), (11, 11)):
        spec_mod = Modulus(24, s1, s2)
        for h in range(1, 2 * 24 + 1):
            v = singular_product(SingularSeriesSpec(spec_mod, h))
            if (v == 0) != ((h - s1 - s2) % 24 != 0):
                bad.append((s1, s2, h, v))
    ok = not bad
    record(7, ok, f"h over two full residue systems mod 24, 3 class pairs, {len(bad)} violations")
    assert ok, bad


def test_criterion_8_representations(table_1e6):
    mod = Modulus(24, 11, 7)
    targets = [F(2, n) for n in range(40) if F(2, n) <= 10**6]
    exceptions, errs = [], []
    for f in targets:
        rc = rep_count(f, mod, table_1e6)
        if rc.by_class["11,7"]["count"] == 0:
            exceptions.append(f)
        errs.append(abs(rc.weighted / (f * singular_S(SingularSeriesSpec(mod, f))) - 1))
    tail = errs[-20:]
    mean = sum(tail) / len(tail)
    ok = not exceptions and mean <= 0.15
    record(8, ok, f"{len(targets)} targets F(n) <= 1e6, {len(exceptions)} exceptions, "
                  f"mean |R/(F S) - 1| over largest {len(tail)} = {mean:.4f}")
    assert ok, exceptions


def test_criterion_9_census_floor():
    recs = census(2, [10**5, 10**6, 10**7])
    ok = all(r.ratio >= CENSUS_FLOOR for r in recs)
    shown = ", ".join(f"X={r.X:.0e}: n={r.count} ratio={r.ratio:.3f}" for r in recs)
    record(9, ok, f"floor {CENSUS_FLOOR}; {shown}")
    assert ok


def test_criterion_10_major_arc():
    r = major_arc(10**6, 12, Modulus(24, 7, 11))
    worst = max(v["max_relative_error"] for v in r["by_class"].values())
    status = "ok" if worst <= 0.02 else ("warn" if worst <= 0.05 else "fail")
    record(10, status != "fail", f"N=1e6, q<=12: max relative error {worst:.2e} ({status})")
    assert status != "fail"
