"""Lucas engine: fast doubling, ranks, periods, square lifting."""

import math
import random

import pytest

from fibtotient.arith import kronecker, sieve_primes, v2
from fibtotient.errors import BudgetError, DomainError
from fibtotient.lucas import (
    FIBONACCI,
    LucasParams,
    brute_rank,
    divides_index,
    lucas_pair_mod,
    lucas_u_exact,
    period_mod_prime,
    rank_at_square,
    rank_of_apparition,
)

PELL = LucasParams(2, -1)


def naive_uv(params, n, m):
    """Direct iteration oracle for (U_n, V_n) mod m."""
    u0, u1 = 0, 1
    v0, v1 = 2, params.P
    for _ in range(n):
        u0, u1 = u1, (params.P * u1 - params.Q * u0) % m
        v0, v1 = v1, (params.P * v1 - params.Q * v0) % m
    return u0 % m, v0 % m


def test_params_validation():
    with pytest.raises(DomainError):
        LucasParams(2, 1)  # D = 0
    with pytest.raises(DomainError):
        LucasParams(3, 2)  # D = 1, a square
    with pytest.raises(DomainError):
        LucasParams(6, 5)  # D = 16
    assert FIBONACCI.D == 5
    assert PELL.D == 8
    assert LucasParams(1, 1).D == -3  # negative discriminants are fine


def test_pair_mod_examples():
    assert lucas_pair_mod(FIBONACCI, 10, 10**9)[0] == 55
    assert lucas_pair_mod(FIBONACCI, 0, 97) == (0, 2)
    assert lucas_pair_mod(FIBONACCI, 12, 10**6)[0] == 144
    # Pell numbers: 0, 1, 2, 5, 12, 29
    assert lucas_pair_mod(PELL, 5, 1000)[0] == 29


def test_fast_doubling_matches_naive():
    rng = random.Random(5)
    param_sets = [FIBONACCI, PELL, LucasParams(3, 1), LucasParams(-3, -2),
                  LucasParams(5, 3), LucasParams(1, 1)]
    for params in param_sets:
        m = rng.choice([2, 3, 10, 97, 1009, 10**9 + 9])
        u0, u1 = 0, 1 % m
        v0, v1 = 2 % m, params.P % m
        for n in range(400):
            assert lucas_pair_mod(params, n, m) == (u0, v0), (params, n, m)
            u0, u1 = u1, (params.P * u1 - params.Q * u0) % m
            v0, v1 = v1, (params.P * v1 - params.Q * v0) % m


def test_exact_values():
    fibs = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    for n, f in enumerate(fibs):
        assert lucas_u_exact(FIBONACCI, n) == f
    assert lucas_u_exact(FIBONACCI, 100) == 354224848179261915075
    assert lucas_u_exact(PELL, 5) == 29


def test_rank_examples():
    assert rank_of_apparition(FIBONACCI, 107) == 36
    assert rank_of_apparition(FIBONACCI, 3167) == 96
    assert rank_of_apparition(FIBONACCI, 41) == 20
    assert rank_of_apparition(FIBONACCI, 61) == 15


def test_brute_rank_examples():
    assert brute_rank(FIBONACCI, 5) == 5  # F_5 = 5
    assert brute_rank(FIBONACCI, 2) == 3  # F_3 = 2
    assert brute_rank(FIBONACCI, 3) == 4  # F_4 = 3


def test_rank_descent_matches_brute_force():
    for p in sieve_primes(2000).primes:
        if p in (2, 5):
            continue
        assert rank_of_apparition(FIBONACCI, p) == brute_rank(FIBONACCI, p), p


def test_rank_domain_errors():
    with pytest.raises(DomainError):
        rank_of_apparition(FIBONACCI, 5)  # divides D
    with pytest.raises(DomainError):
        rank_of_apparition(FIBONACCI, 2)
    with pytest.raises(DomainError):
        rank_of_apparition(FIBONACCI, 91)  # composite
    with pytest.raises(BudgetError):
        brute_rank(FIBONACCI, 107, cap=10)


def test_rank_divisibility_relations():
    # z(p) | p - (5|p), and the 2-adic relation when (5|p) = -1, p = 3 mod 4
    for p in sieve_primes(2000).primes:
        if p in (2, 5):
            continue
        z = rank_of_apparition(FIBONACCI, p)
        eps = kronecker(5, p)
        assert (p - eps) % z == 0, p
        if eps == -1 and p % 4 == 3:
            assert v2(z) == v2(p + 1), p


def test_period_examples():
    assert period_mod_prime(FIBONACCI, 53).period == 108
    assert period_mod_prime(FIBONACCI, 5).period == 20
    assert period_mod_prime(FIBONACCI, 1583).period == 3168
    assert period_mod_prime(FIBONACCI, 1103).period == 96


def test_period_record_fields():
    rec = period_mod_prime(FIBONACCI, 53)
    assert rec.q == 53 and rec.method == "matrix-order"
    assert rec.period % rec.rank == 0
    assert rec.rank == 27  # z(53)


def brute_period(params, q):
    a, b, k = 0, 1 % q, 0
    while True:
        a, b = b, (params.P * b - params.Q * a) % q
        k += 1
        if (a, b) == (0, 1 % q):
            return k


def test_period_matrix_vs_brute_fibonacci():
    for q in sieve_primes(500).primes:
        if q == 2:
            continue
        assert period_mod_prime(FIBONACCI, q).period == brute_period(FIBONACCI, q), q


def test_period_matrix_vs_brute_random_params():
    rng = random.Random(17)
    primes = [q for q in sieve_primes(200).primes if q > 2]
    for _ in range(25):
        P = rng.randint(-10, 10)
        Q = rng.randint(-10, 10)
        try:
            params = LucasParams(P, Q)
        except DomainError:
            continue
        for q in primes:
            if params.Q % q == 0:
                continue  # sequence mod q is not purely periodic
            assert (
                period_mod_prime(params, q).period == brute_period(params, q)
            ), (P, Q, q)


def test_period_brute_path_when_q_divides_Q():
    # q | Q makes the recurrence non-invertible mod q; the state (0, 1)
    # never recurs and the brute path must give up within its cap.
    params = LucasParams(1, 3)
    with pytest.raises(BudgetError):
        period_mod_prime(params, 3, brute_cap=1000)


def test_period_divides_q2_minus_1():
    for q in sieve_primes(2000).primes:
        if q in (2, 5):
            continue
        rec = period_mod_prime(FIBONACCI, q)
        assert (q * q - 1) % rec.period == 0, q
        assert rec.period % rec.rank == 0, q
    # q = 5 is the documented exception: 20 does not divide 24
    assert period_mod_prime(FIBONACCI, 5).period == 20


def test_divides_index_examples():
    assert divides_index(FIBONACCI, 107, 108)
    assert not divides_index(FIBONACCI, 107, 37)
    assert divides_index(FIBONACCI, 2207, 96)


def test_divides_index_iff_rank_divides():
    for p in [3, 7, 11, 13, 23, 107, 2207]:
        z = brute_rank(FIBONACCI, p)
        for m in range(0, 4 * z, max(1, z // 3)):
            assert divides_index(FIBONACCI, p, m) == (m % z == 0), (p, m)


def test_gcd_identity():
    fibs = [lucas_u_exact(FIBONACCI, n) for n in range(121)]
    for a in range(1, 121):
        for b in range(1, 121):
            assert math.gcd(fibs[a], fibs[b]) == fibs[math.gcd(a, b)]


def test_rank_at_square():
    # F_4 = 3 and 9 does not divide 3, so the rank lifts to 3 * 4 = 12;
    # F_12 = 144 = 9 * 16 confirms it.
    assert rank_at_square(FIBONACCI, 3, 4) == 12
    assert lucas_u_exact(FIBONACCI, 12) % 9 == 0
    # F_3 = 2, 4 does not divide 2, lift to 6; F_6 = 8 is divisible by 4.
    assert rank_at_square(FIBONACCI, 2, 3) == 6
    z53 = rank_of_apparition(FIBONACCI, 53)
    assert rank_at_square(FIBONACCI, 53, z53) == 53 * z53


def test_no_wall_sun_sun_below_1000():
    for p in sieve_primes(1000).primes:
        if p in (2, 5):
            continue
        z = rank_of_apparition(FIBONACCI, p)
        assert rank_at_square(FIBONACCI, p, z) == p * z, p
