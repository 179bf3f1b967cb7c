"""Lucas sequence engine.

U_n(P, Q) is defined by U_0 = 0, U_1 = 1, U_n = P*U_{n-1} - Q*U_{n-2}, with
companion sequence V_0 = 2, V_1 = P and the same recurrence.  The Fibonacci
numbers are U_n(1, -1).  This module computes terms mod m by fast doubling,
the rank of apparition of a prime, the period of the sequence mod a prime
(Pisano period in the Fibonacci case), and the lifted rank at prime squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import factor_word, is_prime, kronecker
from .errors import BudgetError, DomainError

DEFAULT_BRUTE_CAP = 1_000_000


@dataclass(frozen=True)
class LucasParams:
    """The parameter pair (P, Q); the discriminant D = P**2 - 4Q must be a
    non-square so that the sequence is nondegenerate."""

    P: int
    Q: int

    def __post_init__(self):
        d = self.P * self.P - 4 * self.Q
        if d == 0:
            raise DomainError("discriminant is zero")
        if d > 0 and math.isqrt(d) ** 2 == d:
            raise DomainError(f"discriminant {d} is a perfect square")

    @property
    def D(self) -> int:
        return self.P * self.P - 4 * self.Q

    def __repr__(self):
        return f"LucasParams(P={self.P}, Q={self.Q})"


FIBONACCI = LucasParams(1, -1)


def _u_pair(params: LucasParams, n: int, m: int) -> tuple[int, int]:
    """(U_n, U_{n+1}) mod m by binary doubling.

    Uses U_{2k} = U_k * (2*U_{k+1} - P*U_k) and U_{2k+1} = U_{k+1}**2 - Q*U_k**2,
    which need no division and therefore work for every modulus m >= 2.
    """
    P = params.P % m
    Q = params.Q % m
    a, b = 0, 1 % m
    if n == 0:
        return a, b
    for bit in bin(n)[2:]:
        c = a * (2 * b - P * a) % m
        d = (b * b - Q * a * a) % m
        if bit == "1":
            a, b = d, (P * d - Q * c) % m
        else:
            a, b = c, d
    return a, b


def lucas_pair_mod(params: LucasParams, n: int, m: int) -> tuple[int, int]:
    """(U_n mod m, V_n mod m) in O(log n) modular steps."""
    if m < 2:
        raise DomainError("modulus must be >= 2")
    u_n, u_n1 = _u_pair(params, n, m)
    v_n = (2 * u_n1 - params.P * u_n) % m
    return u_n, v_n


def lucas_u_exact(params: LucasParams, n: int) -> int:
    """Exact integer U_n, by the same doubling scheme without reduction."""
    P, Q = params.P, params.Q
    a, b = 0, 1
    if n == 0:
        return 0
    for bit in bin(n)[2:]:
        c = a * (2 * b - P * a)
        d = b * b - Q * a * a
        if bit == "1":
            a, b = d, P * d - Q * c
        else:
            a, b = c, d
    return a


def divides_index(params: LucasParams, p: int, m: int) -> bool:
    """True iff p divides U_m: a single fast-doubling evaluation mod p.

    Because the indices divisible by p are exactly the multiples of the rank
    of apparition, this decides "rank | m" without computing the rank, and it
    works for arbitrarily large p.
    """
    if p < 2:
        raise DomainError("modulus must be >= 2")
    return _u_pair(params, m, p)[0] == 0


def brute_rank(params: LucasParams, p: int, cap: int = DEFAULT_BRUTE_CAP) -> int:
    """Rank of apparition by direct iteration of the recurrence mod p.

    Fallback for primes dividing 2*Q*D, where the order-descent route is not
    available.  Raises BudgetError after cap steps.
    """
    P = params.P % p
    Q = params.Q % p
    a, b = 1 % p, P  # U_1, U_2
    k = 1
    while a != 0:
        a, b = b, (P * b - Q * a) % p
        k += 1
        if k > cap:
            raise BudgetError(f"no zero term mod {p} within {cap} iterations")
    return k


def rank_of_apparition(params: LucasParams, p: int) -> int:
    """Smallest k >= 1 with p | U_k, for a prime p not dividing 2*Q*D.

    The zero indices mod p form exactly the multiples of the rank, so the
    rank is found like a multiplicative order: factor p - (D|p) and descend
    through its prime factors.
    """
    D = params.D
    if p < 3 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    if math.gcd(p, 2 * params.Q * D) != 1:
        raise DomainError(f"{p} divides 2*Q*D; use brute_rank")
    eps = kronecker(D, p)
    n = p - eps
    k = n
    for ell in factor_word(n):
        while k % ell == 0 and _u_pair(params, k // ell, p)[0] == 0:
            k //= ell
    return k


@dataclass(frozen=True)
class PeriodRecord:
    """Period and rank of the sequence mod an odd prime q."""

    q: int
    period: int
    rank: int
    method: str  # "matrix-order" or "brute-force"


def _is_identity_index(params: LucasParams, e: int, q: int) -> bool:
    # The companion matrix [[P, -Q], [1, 0]] satisfies M**e = I mod q exactly
    # when U_e = 0 and U_{e+1} = 1.
    a, b = _u_pair(params, e, q)
    return a == 0 and b == 1 % q


def period_mod_prime(
    params: LucasParams, q: int, brute_cap: int = DEFAULT_BRUTE_CAP
) -> PeriodRecord:
    """Period of (U_n mod q) for an odd prime q.

    When q does not divide Q the period equals the order of the companion
    matrix in GL_2(F_q), found by descent over the factored universal
    exponent q**3 - q (which also covers the repeated-eigenvalue case q | D,
    e.g. the Fibonacci prime 5 where the period does not divide q**2 - 1).
    Otherwise the sequence is iterated directly until the state (0, 1)
    recurs, up to brute_cap steps.
    """
    if q < 3 or q % 2 == 0:
        raise DomainError(f"{q} is not an odd prime")
    if params.Q % q == 0:
        period = _brute_period(params, q, brute_cap)
        rank = brute_rank(params, q, brute_cap)
        return PeriodRecord(q=q, period=period, rank=rank, method="brute-force")
    # Merge the factorizations of q-1, q and q+1.
    exponent_factors: dict[int, int] = {q: 1}
    for part in (q - 1, q + 1):
        for p, e in factor_word(part).items():
            exponent_factors[p] = exponent_factors.get(p, 0) + e
    order = q * (q - 1) * (q + 1)
    for ell in exponent_factors:
        while order % ell == 0 and _is_identity_index(params, order // ell, q):
            order //= ell
    if math.gcd(q, 2 * params.Q * params.D) == 1:
        rank = rank_of_apparition(params, q)
    else:
        rank = brute_rank(params, q, brute_cap)
    return PeriodRecord(q=q, period=order, rank=rank, method="matrix-order")


def _brute_period(params: LucasParams, q: int, cap: int) -> int:
    P = params.P % q
    Q = params.Q % q
    a, b = 0, 1 % q
    k = 0
    while True:
        a, b = b, (P * b - Q * a) % q
        k += 1
        if a == 0 and b == 1 % q:
            return k
        if k > cap:
            raise BudgetError(f"state (0, 1) mod {q} did not recur within {cap} steps")


def rank_at_square(params: LucasParams, p: int, rank_p: int) -> int:
    """Rank of apparition at p**2, given the rank at p.

    Returns rank_p itself when U_{rank_p} is divisible by p**2 (a
    Wall-Sun-Sun-type prime for this sequence; none are known for Fibonacci),
    and p * rank_p otherwise.
    """
    if _u_pair(params, rank_p, p * p)[0] == 0:
        return rank_p
    return p * rank_p
