"""Partial factorization of Fibonacci/Lucas values with explicit unknowns.

Large sequence terms rarely factor completely at desk scale, so factoring
results carry an explicit cofactor with a status, factor tables of known
complete factorizations can be loaded from disk, and divisibility questions
about Euler's totient of a term come back as three-valued verdicts
(yes / no / unknown) rather than guesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .arith import brent_rho, is_prime, sieve_primes
from .errors import CapacityError, DomainError, TableError
from .lucas import FIBONACCI, LucasParams, divides_index, lucas_u_exact

COFACTOR_ONE = "one"
COFACTOR_PRIME = "prime"
COFACTOR_COMPOSITE = "composite_unknown"

DEFAULT_RHO_BUDGET = 2_000_000
MAX_EXACT_INDEX = 100_000

_FACTOR_TRIAL_BOUND = 10_000


@dataclass(frozen=True)
class PartialFactorization:
    """A factored part plus a cofactor: value == cofactor * prod(p**e).

    Prime cofactors are folded into the factor list on construction, so a
    normalized instance has cofactor 1 (complete) or a composite cofactor
    that nobody has split yet.
    """

    value: int
    factors: tuple[tuple[int, int], ...]  # ascending (prime, exponent)
    cofactor: int
    cofactor_status: str

    def __post_init__(self):
        prod = self.cofactor
        for p, e in self.factors:
            prod *= p**e
        if prod != self.value:
            raise DomainError(
                f"factors times cofactor give {prod}, expected {self.value}"
            )

    @classmethod
    def build(cls, value: int, factors: dict[int, int], cofactor: int):
        """Normalize and classify the cofactor, then construct."""
        if value < 1:
            raise DomainError("value must be positive")
        factors = dict(factors)
        if cofactor == 1:
            status = COFACTOR_ONE
        elif is_prime(cofactor):
            factors[cofactor] = factors.get(cofactor, 0) + 1
            cofactor = 1
            status = COFACTOR_ONE
        else:
            status = COFACTOR_COMPOSITE
        return cls(
            value=value,
            factors=tuple(sorted(factors.items())),
            cofactor=cofactor,
            cofactor_status=status,
        )

    @property
    def complete(self) -> bool:
        return self.cofactor_status == COFACTOR_ONE

    def factor_map(self) -> dict[int, int]:
        return dict(self.factors)

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def totient_from_complete(fz: PartialFactorization) -> int:
    """Euler's totient of fz.value via multiplicativity; requires complete()."""
    if not fz.complete:
        raise DomainError(f"cofactor {fz.cofactor} is unfactored")
    phi = 1
    for p, e in fz.factors:
        phi *= p ** (e - 1) * (p - 1)
    return phi


@dataclass(frozen=True)
class FactorTable:
    """Known factorizations of Fibonacci numbers, keyed by index.

    Each entry lists prime factors with multiplicity plus an optional
    composite cofactor; the product is validated against the exact F_n on
    load.
    """

    entries: dict[int, tuple[tuple[int, ...], int]]

    def __contains__(self, n: int) -> bool:
        return n in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, n: int):
        return self.entries.get(n)


def load_factor_table(
    source: Union[IO, Iterable[Union[str, bytes]]],
    validate_primality: bool = True,
) -> FactorTable:
    """Parse and validate a factor table.

    Format, one entry per line: ``index: p1 p2 ... [Ccofactor]`` where the
    primes repeat per multiplicity and the optional trailing C-token is a
    composite unfactored cofactor.  ``#`` starts a comment, blank lines are
    ignored.  Every entry is validated: the token product must equal F_index
    exactly, and (optionally) every non-C token must be prime.
    """
    entries: dict[int, tuple[tuple[int, ...], int]] = {}
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise TableError(line_no, "missing ':' separator")
        try:
            index = int(head.strip())
        except ValueError:
            raise TableError(line_no, f"bad index {head.strip()!r}") from None
        if index < 1:
            raise TableError(line_no, f"index {index} out of range")
        if index in entries:
            raise TableError(line_no, f"duplicate entry for index {index}")
        tokens = tail.split()
        if not tokens:
            raise TableError(line_no, "entry lists no factors")
        primes: list[int] = []
        cofactor = 1
        for pos, tok in enumerate(tokens):
            if tok.startswith("C"):
                if pos != len(tokens) - 1:
                    raise TableError(line_no, "C-token must come last")
                try:
                    cofactor = int(tok[1:])
                except ValueError:
                    raise TableError(line_no, f"bad cofactor token {tok!r}") from None
                if cofactor < 2:
                    raise TableError(line_no, f"cofactor {cofactor} out of range")
            else:
                try:
                    primes.append(int(tok))
                except ValueError:
                    raise TableError(line_no, f"bad factor token {tok!r}") from None
        expected = lucas_u_exact(FIBONACCI, index)
        product = cofactor
        for p in primes:
            product *= p
        if product != expected:
            raise TableError(
                line_no,
                f"index {index}: token product {product} != F_{index} = {expected}",
            )
        if validate_primality:
            for p in primes:
                if not is_prime(p):
                    raise TableError(line_no, f"index {index}: {p} is not prime")
            if cofactor > 1 and is_prime(cofactor):
                raise TableError(
                    line_no, f"index {index}: cofactor {cofactor} is prime, list it"
                )
        entries[index] = (tuple(primes), cofactor)
    return FactorTable(entries=entries)


def load_factor_table_path(path, validate_primality: bool = True) -> FactorTable:
    with open(path, "r", encoding="utf-8") as fh:
        return load_factor_table(fh, validate_primality=validate_primality)


_trial_primes_cache: tuple[int, ...] | None = None


def _trial_primes() -> tuple[int, ...]:
    global _trial_primes_cache
    if _trial_primes_cache is None:
        _trial_primes_cache = sieve_primes(_FACTOR_TRIAL_BOUND).primes
    return _trial_primes_cache


FactorCache = dict  # (P, Q, n) -> PartialFactorization


def factor_lucas_index(
    params: LucasParams,
    n: int,
    table: FactorTable | None = None,
    budget: int = DEFAULT_RHO_BUDGET,
    cache: FactorCache | None = None,
    rho_seed: int = 0,
) -> PartialFactorization:
    """Factor U_n as far as the table, algebraic descent and rho allow.

    Sources, in order: a table entry (Fibonacci only); prime factors of U_d
    for proper divisors d of n, which divide U_n because U is a divisibility
    sequence; trial division; Brent rho within the per-composite budget.
    Whatever survives becomes the composite cofactor.
    """
    if n < 1:
        raise DomainError("index must be >= 1")
    if n > MAX_EXACT_INDEX:
        raise CapacityError(f"index {n} above exact-value cap {MAX_EXACT_INDEX}")
    key = (params.P, params.Q, n)
    if cache is not None and key in cache:
        return cache[key]

    value = lucas_u_exact(params, n)
    if value <= 0:
        raise DomainError(f"U_{n} = {value} is not a positive integer")

    result: PartialFactorization | None = None
    if table is not None and params == FIBONACCI and n in table:
        primes, cofactor = table.get(n)
        factors: dict[int, int] = {}
        for p in primes:
            factors[p] = factors.get(p, 0) + 1
        result = PartialFactorization.build(value, factors, cofactor)
    else:
        factors = {}
        rem = value
        if n > 2:
            # Maximal proper divisors n/ell cover every proper divisor of n.
            for ell in sorted(set(_prime_divisors(n))):
                d = n // ell
                if d < 2:
                    continue
                sub = factor_lucas_index(
                    params, d, table=table, budget=budget, cache=cache,
                    rho_seed=rho_seed,
                )
                for p in sub.primes():
                    while rem % p == 0:
                        rem //= p
                        factors[p] = factors.get(p, 0) + 1
        for p in _trial_primes():
            if p * p > rem:
                break
            while rem % p == 0:
                rem //= p
                factors[p] = factors.get(p, 0) + 1
        # Split what is left with rho, each composite getting its own budget.
        pending = [rem] if rem > 1 else []
        unfactored = 1
        while pending:
            m = pending.pop()
            if m == 1:
                continue
            if is_prime(m):
                factors[m] = factors.get(m, 0) + 1
                continue
            root = math.isqrt(m)
            if root * root == m:
                pending += [root, root]
                continue
            f, _ = brent_rho(m, budget=budget, c0=1 + rho_seed)
            if f is None:
                unfactored *= m
                continue
            pending += [f, m // f]
        result = PartialFactorization.build(value, factors, unfactored)

    if cache is not None:
        cache[key] = result
    return result


def _prime_divisors(n: int) -> list[int]:
    out = []
    m = n
    for p in _trial_primes():
        if p * p > m:
            break
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
    if m > 1:
        out.append(m)
    return out


VERDICT_YES = "yes"
VERDICT_NO = "no"
VERDICT_UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer with a checkable witness or the blocking cofactor."""

    value: str
    witness: int | None = None
    reason: str = ""

    @property
    def yes(self) -> bool:
        return self.value == VERDICT_YES

    @property
    def no(self) -> bool:
        return self.value == VERDICT_NO

    @property
    def unknown(self) -> bool:
        return self.value == VERDICT_UNKNOWN


def totient_divisibility(
    q: int, fz: PartialFactorization, params: LucasParams, m: int
) -> Verdict:
    """Does q divide phi(U_m), judged from a partial factorization of U_m?

    Yes when some known prime factor is 1 mod q, or when q**2 divides U_m
    (then q itself contributes through the prime-power part of the totient).
    No requires a complete factorization with neither route available.
    Anything blocked by an unfactored cofactor is unknown.
    """
    fmap = fz.factor_map()
    for p in fz.primes():
        if p != q and p % q == 1:
            return Verdict(VERDICT_YES, witness=p, reason=f"{p} = 1 mod {q}")
    if fmap.get(q, 0) >= 2:
        return Verdict(VERDICT_YES, witness=q, reason=f"{q}**2 divides the term")
    if not fz.complete and divides_index(params, q * q, m):
        # Copies of q can hide in the unfactored cofactor; the direct index
        # test mod q**2 is exact either way.
        return Verdict(VERDICT_YES, witness=q, reason=f"{q}**2 divides the term")
    if fz.complete:
        return Verdict(VERDICT_NO, reason="complete factorization, no witness")
    return Verdict(
        VERDICT_UNKNOWN,
        witness=fz.cofactor,
        reason=f"unfactored cofactor with {len(str(fz.cofactor))} digits",
    )
