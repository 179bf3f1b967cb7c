"""Enumeration showing the witness prime is unique: p = 2q+1.

If a prime p = kq+1 (k >= 4 even, q an odd prime, q != 5) had
z(p) | pi(q), then z(p) would divide q**2 - 1, which traps p among the
prime factors of F_d for d | k when (5|p) = +1 (case 1) or d | k**2 - 4
when (5|p) = -1 (case 2).  Scanning those factorizations candidate by
candidate either refutes every k deterministically (all consulted
factorizations complete) or leaves an evidential verdict listing the
indices whose cofactors stayed unfactored.  A brute scan over (k, q)
boxes cross-checks the whole pipeline and rediscovers the single known
exception (k, q, p) = (8, 5, 41).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .arith import is_prime, kronecker, sieve_primes
from .errors import DomainError
from .factoring import (
    DEFAULT_RHO_BUDGET,
    FactorTable,
    factor_lucas_index,
)
from .lucas import FIBONACCI, divides_index, lucas_u_exact, period_mod_prime

K_CAP = 100
TRACE_BOUND_CAP = 2000

VERDICT_DETERMINISTIC = "no-candidate-deterministic"
VERDICT_EVIDENTIAL = "no-candidate-evidential"
VERDICT_CANDIDATE = "candidate"


@dataclass(frozen=True)
class Candidate:
    k: int
    q: int
    p: int
    case: int


@dataclass(frozen=True)
class Rejection:
    k: int
    p: int
    q: int | None
    case: int
    reason: str


@dataclass
class CaseScan:
    case: int
    consulted: list[tuple[int, bool]] = field(default_factory=list)  # (d, complete)
    candidates: list[Candidate] = field(default_factory=list)
    rejections: list[Rejection] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return all(done for _, done in self.consulted)

    @property
    def blocking(self) -> tuple[int, ...]:
        return tuple(d for d, done in self.consulted if not done)


@dataclass
class KReport:
    k: int
    case1: CaseScan
    case2: CaseScan
    verdict: str
    blocking: tuple[int, ...]
    candidates: tuple[Candidate, ...]


def _divisors(n: int) -> list[int]:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


def _examine(k: int, p: int, case: int, want_kron: int, scan: CaseScan, periods: dict):
    """Candidate test for one prime factor p; records the outcome."""
    if p % k != 1:
        return  # not of the form kq+1; not worth tracing
    q, rem = divmod(p - 1, k)
    assert rem == 0
    if q < 2:
        scan.rejections.append(
            Rejection(k=k, p=p, q=None, case=case, reason=f"(p-1)/{k} = {q} too small")
        )
        return
    if q % 2 == 0 or not is_prime(q):
        scan.rejections.append(
            Rejection(k=k, p=p, q=q, case=case, reason=f"q = {q} composite or even")
        )
        return
    kron = kronecker(5, p)
    if kron != want_kron:
        scan.rejections.append(
            Rejection(
                k=k, p=p, q=q, case=case,
                reason=f"(5|{p}) = {kron:+d}, case {case} needs {want_kron:+d}",
            )
        )
        return
    if q not in periods:
        periods[q] = period_mod_prime(FIBONACCI, q).period
    if divides_index(FIBONACCI, p, periods[q]):
        scan.candidates.append(Candidate(k=k, q=q, p=p, case=case))
    else:
        scan.rejections.append(
            Rejection(
                k=k, p=p, q=q, case=case,
                reason=f"rank of {p} does not divide pi({q}) = {periods[q]}",
            )
        )


def _scan_case(
    k: int,
    case: int,
    indices: list[int],
    want_kron: int,
    table: FactorTable | None,
    budget: int,
    cache: dict | None,
    rho_seed: int = 0,
) -> CaseScan:
    scan = CaseScan(case=case)
    periods: dict[int, int] = {}
    seen: set[int] = set()
    for d in indices:
        fz = factor_lucas_index(
            FIBONACCI, d, table=table, budget=budget, cache=cache, rho_seed=rho_seed
        )
        scan.consulted.append((d, fz.complete))
        for p in fz.primes():
            if p in seen:
                continue
            seen.add(p)
            _examine(k, p, case, want_kron, scan, periods)
    return scan


def case1_scan(
    k: int,
    table: FactorTable | None = None,
    budget: int = DEFAULT_RHO_BUDGET,
    cache: dict | None = None,
    trace_bound_cap: int = TRACE_BOUND_CAP,
    rho_seed: int = 0,
) -> CaseScan:
    """Case (5|p) = +1: z(p) | k, so p must divide F_d for some d | k.

    Besides the factor-driven search, small k admit the direct size bound
    p = kq+1 <= F_k; every prime in that box is tested too, so the trace
    shows classically rejected candidates (such as p = 61 for k = 12) that
    never show up as factors.
    """
    if k % 2 != 0 or k < 4 or k > K_CAP:
        raise DomainError(f"k = {k} out of range (even, 4..{K_CAP})")
    indices = [d for d in _divisors(k) if d >= 3]
    scan = _scan_case(k, 1, indices, +1, table, budget, cache, rho_seed)
    q_bound = (lucas_u_exact(FIBONACCI, k) - 1) // k
    if 0 < q_bound <= trace_bound_cap:
        periods: dict[int, int] = {}
        traced = {r.p for r in scan.rejections} | {c.p for c in scan.candidates}
        for q in sieve_primes(q_bound).primes:
            if q == 2:
                continue
            p = k * q + 1
            if p in traced or not is_prime(p):
                continue
            # No Legendre pre-filter here: a (5|p) = -1 prime in the box is
            # worth a trace line saying it fails this case.
            _examine(k, p, 1, +1, scan, periods)
    return scan


def case2_scan(
    k: int,
    table: FactorTable | None = None,
    budget: int = DEFAULT_RHO_BUDGET,
    cache: dict | None = None,
    rho_seed: int = 0,
) -> CaseScan:
    """Case (5|p) = -1: z(p) | k**2 - 4, so p divides F_d for d | k**2 - 4."""
    if k % 2 != 0 or k < 4 or k > K_CAP:
        raise DomainError(f"k = {k} out of range (even, 4..{K_CAP})")
    indices = [d for d in _divisors(k * k - 4) if d >= 3]
    return _scan_case(k, 2, indices, -1, table, budget, cache, rho_seed)


def unique_scan(
    k_min: int,
    k_max: int,
    table: FactorTable | None = None,
    budget: int = DEFAULT_RHO_BUDGET,
    cache: dict | None = None,
    rho_seed: int = 0,
) -> list[KReport]:
    """Run both cases for every even k in [k_min, k_max] and classify.

    A k is refuted deterministically only when every consulted F_d was
    completely factored; otherwise the report lists the blocking indices.
    """
    if not (4 <= k_min <= k_max <= K_CAP):
        raise DomainError(f"k range {k_min}..{k_max} outside 4..{K_CAP}")
    if cache is None:
        cache = {}
    reports = []
    for k in range(k_min + (k_min % 2), k_max + 1, 2):
        c1 = case1_scan(k, table=table, budget=budget, cache=cache, rho_seed=rho_seed)
        c2 = case2_scan(k, table=table, budget=budget, cache=cache, rho_seed=rho_seed)
        candidates = tuple(c1.candidates + c2.candidates)
        blocking = tuple(sorted(set(c1.blocking + c2.blocking)))
        if candidates:
            verdict = VERDICT_CANDIDATE
        elif not blocking:
            verdict = VERDICT_DETERMINISTIC
        else:
            verdict = VERDICT_EVIDENTIAL
        reports.append(
            KReport(
                k=k, case1=c1, case2=c2, verdict=verdict,
                blocking=blocking, candidates=candidates,
            )
        )
    return reports


def direct_exception_scan(k_max: int, q_max: int) -> list[tuple[int, int, int]]:
    """Brute search of the whole (k, q) box, no factoring involved.

    Returns every (k, q, p) with k even >= 4, q odd prime, p = kq+1 prime
    and p | F_{pi(q)}.  Expected output: [(8, 5, 41)] and nothing else.
    """
    out = []
    for q in sieve_primes(q_max).primes:
        if q == 2:
            continue
        period = period_mod_prime(FIBONACCI, q).period
        for k in range(4, k_max + 1, 2):
            p = k * q + 1
            if is_prime(p) and divides_index(FIBONACCI, p, period):
                out.append((k, q, p))
    return sorted(out)


def reports_json(reports: list[KReport]) -> str:
    payload = []
    for r in reports:
        payload.append(
            {
                "k": r.k,
                "verdict": r.verdict,
                "blocking": list(r.blocking),
                "candidates": [
                    {"k": c.k, "q": c.q, "p": c.p, "case": c.case}
                    for c in r.candidates
                ],
                "case1": _case_json(r.case1),
                "case2": _case_json(r.case2),
            }
        )
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _case_json(scan: CaseScan) -> dict:
    return {
        "consulted": [{"d": d, "complete": done} for d, done in scan.consulted],
        "complete": scan.complete,
        "rejections": [
            {"p": r.p, "q": r.q, "reason": r.reason} for r in scan.rejections
        ],
    }
