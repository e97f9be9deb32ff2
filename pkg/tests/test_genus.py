import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from twoclass.errors import PreconditionError
from twoclass.genus import (
    INF,
    ambiguous_classes,
    compare_square_classes,
    construct_type_2_2,
    hasse_check,
    hasse_is_square_class,
    hilbert_symbol,
    reciprocity_product,
    verify_proposition_alg,
    verify_proposition_k1,
)
from twoclass.search import PrimePairWitness

nonzero = st.integers(-300, 300).filter(bool)


def hilbert_brute(a, b, p):
    """Odd p: solvability of a x^2 + b y^2 = z^2 via the unit/valuation split,
    checked against Euler's criterion only (independent of kronecker)."""
    def split(n):
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v, n

    def leg(u):
        r = pow(u % p, (p - 1) // 2, p)
        return -1 if r == p - 1 else 1

    al, u = split(a)
    be, v = split(b)
    s = (-1) ** (al * be * ((p - 1) // 2))
    return s * leg(u) ** be * leg(v) ** al


@given(nonzero, nonzero, st.sampled_from([3, 5, 7, 11, 13]))
def test_hilbert_odd_vs_euler(a, b, p):
    assert hilbert_symbol(a, b, p) == hilbert_brute(a, b, p)


@given(nonzero, nonzero)
def test_reciprocity(a, b):
    assert reciprocity_product(a, b) == 1


@given(nonzero, nonzero, st.sampled_from([2, 3, 5, INF]))
def test_hilbert_symmetric_and_bilinear(a, b, p):
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
    assert hilbert_symbol(a, a * a * b, p) == hilbert_symbol(a, b, p)


def test_hilbert_at_two_by_solvability():
    # (a, b)_2 = 1 iff a x^2 + b y^2 = z^2 has a primitive solution mod 2^6
    # (enough for units and single powers of 2 in each argument)
    for a, b in itertools.product([1, 3, 5, 7, 2, 6, 10, 14, -1, -2], repeat=2):
        mod = 64
        sol = any(
            (a * x * x + b * y * y - z * z) % mod == 0
            for x in range(16) for y in range(16) for z in range(16)
            if (x % 2 or y % 2 or z % 2)
        )
        assert (hilbert_symbol(a, b, 2) == 1) == sol, (a, b)


def test_symbol_values_for_77():
    assert hilbert_symbol(2, -308, 2) == -1
    assert hilbert_symbol(3, -308, 2) == -1
    assert hilbert_symbol(21, -308, 7) == -1
    assert hilbert_symbol(33, -308, 11) == -1
    assert hasse_is_square_class(1, 7, 11).is_square_class
    assert not hasse_is_square_class(2, 7, 11).is_square_class
    assert not hasse_is_square_class(3, 7, 11).is_square_class


def test_hasse_reciprocity_flag():
    for n in range(1, 60):
        assert hasse_check(n, 308).reciprocity_ok


def test_ambiguous_counts():
    assert len(ambiguous_classes(-308)) == 4
    assert len(ambiguous_classes(-4)) == 1
    assert len(ambiguous_classes(-4 * 3 * 5 * 7)) == 8


def test_square_classes_small():
    assert all(c.agree for c in compare_square_classes(-308))
    assert sum(c.brute_force for c in compare_square_classes(-308)) == 2


def test_alg_witnesses():
    # 18 = 2*3^2 (ell = 2), 162 = 2*3^4 (ell = 3), 1458 = 2*27^2 (ell = 2)
    for ell, n, p1, p2 in [(2, 0, 11, 7), (3, 0, 59, 103), (3, 0, 131, 31), (2, 1, 179, 1279)]:
        wit = PrimePairWitness.build(ell, n, p1, p2)
        rep = verify_proposition_alg(wit)
        assert rep.passed and rep.hasse_ok and rep.consistent
        assert rep.two_sylow_type == [2, 2**ell]
        assert rep.to_json()["pass"]


def test_alg_rejects_bad_witness():
    class W:
        ell, w, p1, p2 = 2, 3, 7, 11
    with pytest.raises(PreconditionError) as exc:
        verify_proposition_alg(W())
    assert "p1 = 11 mod 24" in str(exc.value) and "p2 = 7 mod 24" in str(exc.value)


def test_k1_smallest():
    rep = verify_proposition_k1(3, 7)
    assert rep.disc == -84 and rep.two_sylow_type == [2, 2] and rep.passed and rep.hasse_ok


def test_k1_hasse_agrees_with_profile():
    reports = list(construct_type_2_2(60, 3))
    assert reports
    for r in reports:
        assert r.hasse_ok == (r.two_sylow_type == [2, 2])
        assert sympy.isprime(r.p2) and r.p2 % (8 * r.p1) == 7
    # the congruence alone does not force type (2, 2): p1 = 11 is a counterexample
    assert any(not r.passed for r in reports if r.p1 == 11)
    assert all(r.passed for r in reports if r.p1 in (3, 19))


def test_k1_preconditions():
    with pytest.raises(PreconditionError):
        verify_proposition_k1(5, 47)
