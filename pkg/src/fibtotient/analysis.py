"""Totient-divisibility residue sets of the Fibonacci sequence.

For an odd prime q, the object of interest is the set of residues r modulo
the Pisano period pi(q) such that q divides phi(F_m) for every m in the
class r.  A Sophie Germain prime q whose safe prime p = 2q+1 satisfies
z(p) | pi(q) guarantees the set is a nonempty arithmetic progression
{0, z(p), ..., } mod pi(q); this module predicts that set, probes it
empirically through partial factorizations, audits the theorems constraining
witnesses (Legendre symbols, parity, 2-adic valuations, q mod 15), runs the
census over all Sophie Germain primes up to a bound, and checks the converse
direction (no progression without a witness prime) on desk-scale ranges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .arith import is_prime, kronecker, sieve_primes, v2
from .errors import BudgetError, CapacityError
from .factoring import (
    FactorTable,
    Verdict,
    VERDICT_NO,
    VERDICT_UNKNOWN,
    VERDICT_YES,
    DEFAULT_RHO_BUDGET,
    factor_lucas_index,
    totient_divisibility,
)
from .lucas import (
    DEFAULT_BRUTE_CAP,
    FIBONACCI,
    divides_index,
    period_mod_prime,
    rank_of_apparition,
)

CENSUS_CAP = 100_000
DEFAULT_SEARCH_K_MAX = 100
DEFAULT_SAMPLES_PER_CLASS = 2
DEFAULT_M_CAP = 100_000
DEFAULT_WORK_CAP = 20_000


@dataclass(frozen=True)
class SqSet:
    """Residue set mod the period: empty, or the arithmetic progression
    {0, z, 2z, ..., (R-1)z} with difference z and length R = period/z."""

    period: int
    difference: int | None = None
    length: int | None = None

    def __post_init__(self):
        if self.difference is not None:
            if self.period % self.difference != 0:
                raise ValueError("difference must divide the period")
            if self.length != self.period // self.difference:
                raise ValueError("length must equal period/difference")

    @property
    def empty(self) -> bool:
        return self.difference is None

    def members(self) -> tuple[int, ...]:
        if self.empty:
            return ()
        return tuple(range(0, self.period, self.difference))


@dataclass(frozen=True)
class QAnalysis:
    """Everything the witness test at p = 2q+1 produces for one prime q."""

    q: int
    p: int
    p_prime: bool
    period: int
    witness: bool
    rank_p: int | None = None
    ratio: int | None = None
    leg5_p: int = 0
    leg5_q: int = 0
    q_mod15: int = 0
    q_mod60: int = 0


def witness_2q1(q: int, brute_cap: int = DEFAULT_BRUTE_CAP) -> QAnalysis:
    """Witness test for q: is 2q+1 prime and does it divide F_{pi(q)}?

    The divisibility (2q+1) | F_{pi(q)} is exactly z(2q+1) | pi(q), decided
    by one modular evaluation; the rank and ratio are then filled in.
    """
    p = 2 * q + 1
    record = period_mod_prime(FIBONACCI, q, brute_cap=brute_cap)
    period = record.period
    p_prime = is_prime(p)
    witness = p_prime and divides_index(FIBONACCI, p, period)
    rank_p = ratio = None
    if witness:
        rank_p = rank_of_apparition(FIBONACCI, p)
        ratio = period // rank_p
    return QAnalysis(
        q=q,
        p=p,
        p_prime=p_prime,
        period=period,
        witness=witness,
        rank_p=rank_p,
        ratio=ratio,
        leg5_p=kronecker(5, p),
        leg5_q=kronecker(5, q),
        q_mod15=q % 15,
        q_mod60=q % 60,
    )


def sq_predicted(q: int, analysis: QAnalysis | None = None) -> SqSet:
    """Predicted residue set: the progression of rank multiples if the
    witness holds, empty otherwise."""
    a = analysis if analysis is not None else witness_2q1(q)
    if not a.witness:
        return SqSet(period=a.period)
    return SqSet(period=a.period, difference=a.rank_p, length=a.ratio)


def witness_search(
    q: int, k_max: int = DEFAULT_SEARCH_K_MAX, period: int | None = None
) -> list[tuple[int, int]]:
    """All primes p = kq+1 (k even, k <= k_max) with p | F_{pi(q)}."""
    if period is None:
        period = period_mod_prime(FIBONACCI, q).period
    hits = []
    for k in range(2, k_max + 1, 2):
        p = k * q + 1
        if is_prime(p) and divides_index(FIBONACCI, p, period):
            hits.append((k, p))
    return hits


PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"

AUDIT_CLAIMS = (
    "legendre_at_p",  # (5|2q+1) = -1
    "legendre_at_q",  # (5|q) = -1
    "period_divides_2q2",  # pi(q) | 2(q+1)
    "ratio_odd",  # pi(q)/z(p) odd
    "two_adic_rank",  # v2(z(p)) = v2(p+1)
    "congruence_mod15",  # q = 8 mod 15
)


def audit_theorems(a: QAnalysis) -> list[tuple[str, str]]:
    """Evaluate each structural claim about a witness prime under its own
    hypotheses (witness true and q > 5); q in {3, 5} is exempt throughout."""
    if not a.witness or a.q <= 5:
        return [(claim, NOT_APPLICABLE) for claim in AUDIT_CLAIMS]
    checks = {
        "legendre_at_p": a.leg5_p == -1,
        "legendre_at_q": a.leg5_q == -1,
        "period_divides_2q2": 2 * (a.q + 1) % a.period == 0,
        "ratio_odd": a.ratio % 2 == 1,
        "two_adic_rank": v2(a.rank_p) == v2(a.p + 1),
        "congruence_mod15": a.q % 15 == 8,
    }
    return [(claim, PASS if checks[claim] else FAIL) for claim in AUDIT_CLAIMS]


def _probe_class(
    q: int,
    r: int,
    period: int,
    samples_min: int,
    samples_max: int,
    m_cap: int,
    table: FactorTable | None,
    budget: int,
    cache: dict,
    rho_seed: int = 0,
) -> Verdict:
    """Sample one residue class, smallest representatives m >= 3 first.

    The class verdict is no as soon as any sample is no, yes while every
    sample says yes, unknown once a sample is blocked.  While the samples
    keep saying yes the probe extends past samples_min (up to samples_max):
    a run of coincidental witnesses should be refuted, not reported.
    """
    m = r
    while m < 3:
        m += period
    taken = 0
    while m <= m_cap and taken < samples_max:
        fz = factor_lucas_index(
            FIBONACCI, m, table=table, budget=budget, cache=cache, rho_seed=rho_seed
        )
        s = totient_divisibility(q, fz, FIBONACCI, m)
        if s.no:
            return Verdict(VERDICT_NO, witness=m, reason=f"m = {m} fails")
        if s.unknown:
            return Verdict(
                VERDICT_UNKNOWN,
                witness=s.witness,
                reason=f"m = {m} blocked by an unfactored cofactor",
            )
        taken += 1
        m += period
    if taken >= samples_min:
        return Verdict(VERDICT_YES, reason=f"{taken} samples agree")
    return Verdict(VERDICT_UNKNOWN, reason="no admissible samples below caps")


def sq_empirical(
    q: int,
    samples_per_class: int = DEFAULT_SAMPLES_PER_CLASS,
    m_cap: int = DEFAULT_M_CAP,
    table: FactorTable | None = None,
    budget: int = DEFAULT_RHO_BUDGET,
    cache: dict | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
    rho_seed: int = 0,
) -> dict[int, Verdict]:
    """Probe every residue class mod pi(q) with small sampled indices.

    Each class r takes its smallest representatives m >= 3 (the totient of
    F_1 = F_2 = 1 carries no information); the class verdict is no if any
    sample is no, yes if all samples are yes, unknown otherwise.
    """
    period = period_mod_prime(FIBONACCI, q).period
    if period * samples_per_class > work_cap:
        raise BudgetError(
            f"period {period} x {samples_per_class} samples exceeds work cap {work_cap}"
        )
    if cache is None:
        cache = {}
    return {
        r: _probe_class(
            q, r, period,
            samples_min=samples_per_class,
            samples_max=samples_per_class,
            m_cap=m_cap,
            table=table,
            budget=budget,
            cache=cache,
            rho_seed=rho_seed,
        )
        for r in range(period)
    }


@dataclass(frozen=True)
class CensusRow:
    q: int
    p: int
    pi_q: int
    z_p: int
    ratio: int
    leg5_p: int
    q_mod15: int
    q_mod60: int
    audits: tuple[tuple[str, str], ...]


@dataclass
class CensusReport:
    q_max: int
    sg_count: int = 0
    hit_count: int = 0
    hits_gt5: int = 0
    rows: list[CensusRow] = field(default_factory=list)
    ratio_counts: dict[int, int] = field(default_factory=dict)
    mod15_counts: dict[int, int] = field(default_factory=dict)
    mod60_counts: dict[int, int] = field(default_factory=dict)
    rogue_witnesses: list[tuple[int, int, int]] = field(default_factory=list)
    audit_failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def counts_consistent(self) -> bool:
        small = sum(1 for row in self.rows if row.q in (3, 5))
        return self.hits_gt5 == self.hit_count - small


def _census_one(q: int, k_max: int) -> tuple:
    """Per-prime census work; pure, safe for process pools."""
    a = witness_2q1(q)
    searched = witness_search(q, k_max=k_max, period=a.period)
    return q, a, searched


def census(
    q_max: int,
    k_max: int = DEFAULT_SEARCH_K_MAX,
    cap: int = CENSUS_CAP,
    workers: int = 1,
) -> CensusReport:
    """Sweep all odd primes q <= q_max.

    Collects Sophie Germain counts, witness rows in Table-1 shape, ratio and
    congruence tallies for the q > 5 hits, theorem audits, and any prime
    whose witness search finds a p = kq+1 even though q is not Sophie
    Germain (none are expected).
    """
    if q_max > cap:
        raise CapacityError(f"census bound {q_max} above cap {cap}")
    qs = [q for q in sieve_primes(q_max).primes if q % 2 == 1]
    report = CensusReport(q_max=q_max)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(partial(_census_one, k_max=k_max), qs, chunksize=64))
        results.sort(key=lambda t: t[0])
    else:
        results = [_census_one(q, k_max) for q in qs]

    for q, a, searched in results:
        sg = a.p_prime
        if sg:
            report.sg_count += 1
        else:
            for k, p in searched:
                report.rogue_witnesses.append((q, k, p))
        if not a.witness:
            continue
        report.hit_count += 1
        audits = tuple(audit_theorems(a))
        report.rows.append(
            CensusRow(
                q=q,
                p=a.p,
                pi_q=a.period,
                z_p=a.rank_p,
                ratio=a.ratio,
                leg5_p=a.leg5_p,
                q_mod15=a.q_mod15,
                q_mod60=a.q_mod60,
                audits=audits,
            )
        )
        report.ratio_counts[a.ratio] = report.ratio_counts.get(a.ratio, 0) + 1
        for claim, status in audits:
            if status == FAIL:
                report.audit_failures.append((q, claim))
        if q > 5:
            report.hits_gt5 += 1
            report.mod15_counts[a.q_mod15] = report.mod15_counts.get(a.q_mod15, 0) + 1
            report.mod60_counts[a.q_mod60] = report.mod60_counts.get(a.q_mod60, 0) + 1
    return report


CENSUS_CSV_COLUMNS = ("q", "p", "pi_q", "z_p", "ratio", "leg5_p", "q_mod15", "q_mod60")
TABLE_CSV_COLUMNS = ("q", "p", "pi_q", "z_p", "ratio", "leg5_p")


def census_csv(report: CensusReport, columns=CENSUS_CSV_COLUMNS) -> str:
    """Hit rows as CSV, byte-stable, ascending q."""
    lines = [",".join(columns)]
    for row in report.rows:
        lines.append(",".join(str(getattr(row, col)) for col in columns))
    return "\n".join(lines) + "\n"


def census_json(report: CensusReport) -> str:
    payload = {
        "q_max": report.q_max,
        "sophie_germain_count": report.sg_count,
        "hit_count": report.hit_count,
        "hits_gt5": report.hits_gt5,
        "counts_consistent": report.counts_consistent,
        "ratio_counts": {str(k): v for k, v in sorted(report.ratio_counts.items())},
        "mod15_counts": {str(k): v for k, v in sorted(report.mod15_counts.items())},
        "mod60_counts": {str(k): v for k, v in sorted(report.mod60_counts.items())},
        "rogue_witnesses": report.rogue_witnesses,
        "audit_failures": report.audit_failures,
        "rows": [
            {
                **{col: getattr(row, col) for col in CENSUS_CSV_COLUMNS},
                "audits": {claim: status for claim, status in row.audits},
            }
            for row in report.rows
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


@dataclass
class ConverseReport:
    q_max: int
    probed: list[int] = field(default_factory=list)
    exceptions: list[tuple[int, int]] = field(default_factory=list)  # (q, class)
    classes_total: int = 0
    classes_yes: int = 0
    classes_no: int = 0
    classes_unknown: int = 0

    @property
    def unknown_rate(self) -> float:
        if self.classes_total == 0:
            return 0.0
        return self.classes_unknown / self.classes_total


def verify_converse(
    q_max: int,
    k_max: int = DEFAULT_SEARCH_K_MAX,
    samples_per_class: int = DEFAULT_SAMPLES_PER_CLASS,
    samples_extend: int = 24,
    empirical_budget: int = 10_000,
    m_cap: int = DEFAULT_M_CAP,
    table: FactorTable | None = None,
    cache: dict | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
    rho_seed: int = 0,
) -> ConverseReport:
    """Probe every odd prime q <= q_max without a witness prime.

    An exception would be a residue class all of whose samples say yes even
    though no prime p = kq+1 with p | F_{pi(q)} exists; none are expected.
    A few small indices can say yes by coincidence (each happens to pick up
    some factor that is 1 mod q), so a class that keeps agreeing is probed
    deeper, up to samples_extend samples, before it may be called an
    exception.  Classes blocked by unfactored samples are tallied as
    unknown, not treated as exceptions.
    """
    report = ConverseReport(q_max=q_max)
    if cache is None:
        cache = {}
    for q in sieve_primes(q_max).primes:
        if q == 2:
            continue
        period = period_mod_prime(FIBONACCI, q).period
        if witness_search(q, k_max=k_max, period=period):
            continue
        if period * samples_per_class > work_cap:
            raise BudgetError(
                f"period {period} x {samples_per_class} samples "
                f"exceeds work cap {work_cap}"
            )
        report.probed.append(q)
        for r in range(period):
            verdict = _probe_class(
                q, r, period,
                samples_min=samples_per_class,
                samples_max=max(samples_per_class, samples_extend),
                m_cap=m_cap,
                table=table,
                budget=empirical_budget,
                cache=cache,
                rho_seed=rho_seed,
            )
            report.classes_total += 1
            if verdict.yes:
                report.classes_yes += 1
                report.exceptions.append((q, r))
            elif verdict.no:
                report.classes_no += 1
            else:
                report.classes_unknown += 1
    return report
