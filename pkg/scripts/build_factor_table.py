#!/usr/bin/env python3
"""Offline generator for the bundled Fibonacci factor table.

Factors F_n for every index the uniqueness scan can consult at k <= 31
(divisors of k and of k**2 - 4 for even k up to 30) plus all n <= 240 for
faster empirical probes.  Descent and Pollard rho handle almost everything;
the few stubborn composites get elliptic-curve treatment, which only this
script uses: the shipped library never needs more than the table plus rho.

Run from the repository root:

    python scripts/build_factor_table.py src/fibtotient/data/fib_factors.txt
"""

import sys
import time

from sympy.ntheory import ecm

from fibtotient.arith import brent_rho, is_prime, sieve_primes
from fibtotient.factoring import load_factor_table_path
from fibtotient.lucas import FIBONACCI, lucas_u_exact

EXTRA_RANGE = 240
K_MAX = 30
RHO_BUDGET = 3_000_000
ECM_PLANS = (
    (2_000, 200_000, 60),
    (11_000, 1_100_000, 100),
    (50_000, 5_000_000, 200),
    (250_000, 25_000_000, 300),
)


def target_indices() -> list[int]:
    need = set(range(3, EXTRA_RANGE + 1))
    for k in range(4, K_MAX + 1, 2):
        for m in (k, k * k - 4):
            for d in range(3, m + 1):
                if m % d == 0:
                    need.add(d)
    return sorted(need)


def split(m: int) -> list[int]:
    """Fully factor m, escalating from rho to ECM.  Returns prime factors."""
    if m == 1:
        return []
    if is_prime(m):
        return [m]
    f, _ = brent_rho(m, budget=RHO_BUDGET)
    if f is None:
        for b1, b2, curves in ECM_PLANS:
            print(f"    ecm B1={b1} on {len(str(m))} digits", flush=True)
            try:
                found = ecm(m, B1=b1, B2=b2, max_curve=curves)
            except Exception as exc:  # sympy raises on full failure
                print(f"    ecm pass failed: {exc}", flush=True)
                continue
            found = [int(x) for x in found if 1 < int(x) < m]
            if found:
                f = found[0]
                break
        else:
            raise RuntimeError(f"could not split {m}")
    return split(f) + split(m // f)


def main(out_path: str) -> None:
    trial = sieve_primes(100_000).primes
    known: dict[int, list[int]] = {}
    t0 = time.time()
    for n in target_indices():
        value = lucas_u_exact(FIBONACCI, n)
        rem = value
        primes: list[int] = []
        for d, ps in known.items():
            if n % d == 0:
                for p in ps:
                    while rem % p == 0:
                        rem //= p
                        primes.append(p)
        for p in trial:
            if p * p > rem:
                break
            while rem % p == 0:
                rem //= p
                primes.append(p)
        if rem > 1:
            print(f"n={n}: splitting {len(str(rem))} digits", flush=True)
            primes.extend(split(rem))
        primes.sort()
        prod = 1
        for p in primes:
            prod *= p
        assert prod == value, n
        known[n] = primes
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("# Complete factorizations of Fibonacci numbers F_n.\n")
        fh.write("# Format: n: p1 p2 ... (primes repeated per multiplicity).\n")
        for n in sorted(known):
            fh.write(f"{n}: {' '.join(str(p) for p in known[n])}\n")
    table = load_factor_table_path(out_path)
    print(f"wrote {len(table)} entries in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/fibtotient/data/fib_factors.txt")
