from math import gcd, prod

import pytest
from hypothesis import given, settings, strategies as st

from equisums.errors import DomainError
from equisums.ring import (
    build_context,
    cha_dhi_applicable,
    factorize,
    is_primitive_root,
    is_semi_primitive_root,
    multiplicative_order,
    totient,
)


def order_by_iteration(a, n):
    x, r = a % n, 1
    while x != 1:
        x = x * a % n
        r += 1
    return r


def is_prime(p):
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


@pytest.mark.parametrize("m, expected", [(7, ((7, 1),)), (9, ((3, 2),)), (105, ((3, 1), (5, 1), (7, 1)))])
def test_factorize_examples(m, expected):
    assert factorize(m) == expected


@pytest.mark.parametrize("m", [1, 0, -5])
def test_factorize_rejects_small(m):
    with pytest.raises(DomainError):
        factorize(m)


def test_factorize_round_trip_exhaustive():
    for m in range(2, 10**6 + 1):
        f = factorize(m)
        assert prod(p**e for p, e in f) == m


@given(st.integers(2, 10**12))
def test_factorize_is_valid(m):
    f = factorize(m)
    primes = [p for p, _ in f]
    assert primes == sorted(set(primes))
    assert all(is_prime(p) and e >= 1 for p, e in f[:-1])
    assert prod(p**e for p, e in f) == m


@pytest.mark.parametrize("a, n, expected", [(2, 7, 3), (2, 17, 8), (2, 9, 6)])
def test_multiplicative_order_examples(a, n, expected):
    assert multiplicative_order(a, n) == expected


def test_multiplicative_order_needs_unit():
    with pytest.raises(DomainError):
        multiplicative_order(3, 9)


@given(st.integers(2, 400).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
def test_order_matches_iteration(case):
    n, a = case
    if gcd(a, n) != 1:
        return
    r = multiplicative_order(a, n)
    assert r == order_by_iteration(a, n)
    assert totient(n) % r == 0


def test_build_context_examples():
    c7, c9, c4 = build_context(7), build_context(9), build_context(4)
    assert (c7.phi, c7.r, c7.units, c7.is_prime_power) == (6, 3, (1, 2, 3, 4, 5, 6), True)
    assert (c9.phi, c9.r, c9.units, c9.is_prime_power) == (6, 6, (1, 2, 4, 5, 7, 8), True)
    assert (c4.phi, c4.units, c4.is_odd, c4.r) == (2, (1, 3), False, None)
    with pytest.raises(DomainError, match="even"):
        c4.order
    with pytest.raises(DomainError):
        build_context(2)


def test_context_invariants_up_to_200():
    for n in range(3, 201):
        ctx = build_context(n)
        scanned = [a for a in range(1, n) if gcd(a, n) == 1]
        assert list(ctx.units) == scanned and len(scanned) == ctx.phi
        assert ctx.is_prime_power == (len(ctx.factorization) == 1)
        if ctx.is_odd:
            assert pow(2, ctx.r, n) == 1 and ctx.phi % ctx.r == 0
            assert all(pow(2, m, n) != 1 for m in range(1, ctx.r))


@pytest.mark.parametrize(
    "m, q, prim, semi",
    [(3, 7, True, False), (2, 7, False, True), (2, 9, True, False), (4, 9, False, True)],
)
def test_root_predicates(m, q, prim, semi):
    assert is_primitive_root(m, q) is prim
    assert is_semi_primitive_root(m, q) is semi


def test_root_predicates_reject_bad_input():
    with pytest.raises(DomainError):
        is_primitive_root(3, 9)
    with pytest.raises(DomainError):
        is_primitive_root(2, 15)


def test_primitive_and_semi_primitive_exclusive():
    for q in (5, 7, 9, 11, 13, 25, 27, 49, 121):
        for m in build_context(q).units:
            assert not (is_primitive_root(m, q) and is_semi_primitive_root(m, q))


def test_cha_dhi_15_and_21():
    rep = cha_dhi_applicable(15)
    assert rep.applicable and rep.clause == "Ib"
    rep = cha_dhi_applicable(21)
    assert not rep.applicable
    # 3 has full order 6 mod 7, so the semi-primitive clause fails on that side
    assert rep.checks == {"p1_semi_mod_m2": False, "p2_semi_mod_m1": True}


def test_cha_dhi_prime_power_branch():
    with pytest.raises(DomainError, match="prime power branch"):
        cha_dhi_applicable(9)


def test_cha_dhi_three_primes_literal_pattern():
    # 3*7*11: all 3 mod 4 with (p-1)/2 = 1, 3, 5 pairwise coprime
    rep = cha_dhi_applicable(231)
    assert rep.checks["all_3_mod_4"] and rep.checks["halves_coprime"]
    expected = (
        is_primitive_root(3, 7) and is_primitive_root(7, 11) and is_primitive_root(11, 3)
        and is_semi_primitive_root(3, 11) and is_semi_primitive_root(7, 3) and is_semi_primitive_root(11, 7)
    )
    assert rep.applicable is expected
    assert not cha_dhi_applicable(3 * 5 * 7).applicable
