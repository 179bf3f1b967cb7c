"""Witness analysis for arbitrary Lucas sequences U_n(P, Q).

Everything the Fibonacci analysis does carries over once the discriminant
D = P**2 - 4Q (non-square) replaces 5: the witness condition becomes
alpha(2q+1) | omega(q), the Kronecker character (D|.) drives the congruence
constraints, and the admissible primes fall into residue classes modulo
lcm(3, f) where f is the conductor of that character.  This module derives
those classes, evaluates witnesses for general (P, Q), scans Sophie Germain
ranges, and checks that two sequences sharing a discriminant produce the
same hit set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .arith import factor_word, is_prime, kronecker, sieve_primes
from .errors import DomainError
from .lucas import (
    DEFAULT_BRUTE_CAP,
    LucasParams,
    brute_rank,
    divides_index,
    period_mod_prime,
    rank_of_apparition,
)


def squarefree_kernel(d: int) -> int:
    """The squarefree part of d, sign preserved."""
    sign = -1 if d < 0 else 1
    kernel = 1
    for p, e in factor_word(abs(d)).items():
        if e % 2 == 1:
            kernel *= p
    return sign * kernel


def fundamental_discriminant(d: int) -> int:
    """Fundamental discriminant attached to d: the squarefree kernel d0 when
    d0 = 1 mod 4, else 4*d0.  Its absolute value is the conductor of the
    Kronecker character (d|.)."""
    d0 = squarefree_kernel(d)
    return d0 if d0 % 4 == 1 else 4 * d0


@dataclass(frozen=True)
class CongruenceClassSet:
    """Residue classes mod lcm(3, conductor) that admissible primes q must
    occupy: q = 2 mod 3 with (D|q) = (D|2q+1) = -1."""

    modulus: int
    residues: tuple[int, ...]
    conductor: int


def congruence_classes(params: LucasParams) -> CongruenceClassSet:
    """Enumerate the admissible residue classes for the discriminant of
    params.

    The Kronecker character is evaluated through the fundamental
    discriminant so that square factors of D cannot zero it out, and it is
    periodic mod the conductor, which divides the modulus."""
    disc = fundamental_discriminant(params.D)
    conductor = abs(disc)
    modulus = 3 * conductor // math.gcd(3, conductor)
    residues = tuple(
        r
        for r in range(modulus)
        if r % 3 == 2
        and kronecker(disc, r) == -1
        and kronecker(disc, 2 * r + 1) == -1
    )
    return CongruenceClassSet(modulus=modulus, residues=residues, conductor=conductor)


def classes_via_4d(params: LucasParams) -> tuple[int, tuple[int, ...]]:
    """Same enumeration over the conservative modulus lcm(3, 4|D|); reducing
    it mod the conductor-based modulus must reproduce congruence_classes."""
    disc = fundamental_discriminant(params.D)
    big = 4 * abs(params.D)
    modulus = 3 * big // math.gcd(3, big)
    residues = tuple(
        r
        for r in range(modulus)
        if r % 3 == 2
        and kronecker(disc, r) == -1
        and kronecker(disc, 2 * r + 1) == -1
    )
    return modulus, residues


def classes_cross_check(params: LucasParams) -> bool:
    """True when the 4|D| enumeration collapses onto the conductor classes."""
    small = congruence_classes(params)
    big_mod, big_res = classes_via_4d(params)
    if big_mod % small.modulus != 0:
        return False
    reduced = sorted({r % small.modulus for r in big_res})
    return tuple(reduced) == small.residues


@dataclass(frozen=True)
class GeneralAnalysis:
    """Witness record for one prime q under a general (P, Q)."""

    q: int
    p: int
    p_prime: bool
    period: int
    witness: bool
    rank_p: int | None = None
    ratio: int | None = None
    kron_p: int = 0
    kron_q: int = 0


def lucas_witness(
    params: LucasParams, q: int, brute_cap: int = DEFAULT_BRUTE_CAP
) -> GeneralAnalysis:
    """Witness test at p = 2q+1 for the sequence U(P, Q).

    Requires gcd(q, 2*Q*D) = 1; the witness is decided by the single
    evaluation U_{omega(q)} mod p."""
    D = params.D
    if math.gcd(q, 2 * params.Q * D) != 1:
        raise DomainError(f"gcd({q}, 2*Q*D) != 1")
    p = 2 * q + 1
    record = period_mod_prime(params, q, brute_cap=brute_cap)
    period = record.period
    p_prime = is_prime(p)
    witness = p_prime and divides_index(params, p, period)
    rank_p = ratio = None
    if witness:
        if math.gcd(p, 2 * params.Q * D) == 1:
            rank_p = rank_of_apparition(params, p)
        else:
            rank_p = brute_rank(params, p, cap=brute_cap)
        ratio = period // rank_p
    return GeneralAnalysis(
        q=q,
        p=p,
        p_prime=p_prime,
        period=period,
        witness=witness,
        rank_p=rank_p,
        ratio=ratio,
        kron_p=kronecker(D, p),
        kron_q=kronecker(D, q),
    )


@dataclass
class LucasScanReport:
    params: LucasParams
    q_max: int
    classes: CongruenceClassSet
    sg_total: int = 0
    hits: list[GeneralAnalysis] = field(default_factory=list)
    class_failures: list[int] = field(default_factory=list)
    parity_failures: list[int] = field(default_factory=list)
    small_hits: list[int] = field(default_factory=list)

    @property
    def audit_ok(self) -> bool:
        return not self.class_failures and not self.parity_failures


def lucas_scan(
    params: LucasParams, q_max: int, brute_cap: int = DEFAULT_BRUTE_CAP
) -> LucasScanReport:
    """All Sophie Germain primes q <= q_max (coprime to 2*Q*D) whose safe
    prime is a witness for U(P, Q).

    Hits above the small-prime threshold max(5, (|P|-1)/2) are audited
    against the congruence classes; the parity of omega(q)/alpha(2q+1) is
    asserted odd only for Q = -1, where the argument generalizes.
    """
    classes = congruence_classes(params)
    report = LucasScanReport(params=params, q_max=q_max, classes=classes)
    threshold = max(5, (abs(params.P) - 1) // 2)
    coprime_to = 2 * params.Q * params.D
    for q in sieve_primes(q_max).primes:
        if q == 2 or math.gcd(q, coprime_to) != 1:
            continue
        p = 2 * q + 1
        if not is_prime(p):
            continue
        report.sg_total += 1
        a = lucas_witness(params, q, brute_cap=brute_cap)
        if not a.witness:
            continue
        report.hits.append(a)
        if q <= threshold:
            report.small_hits.append(q)
            continue
        if q % classes.modulus not in classes.residues:
            report.class_failures.append(q)
        if params.Q == -1 and a.ratio % 2 == 0:
            report.parity_failures.append(q)
    return report


def same_d_equivalence(
    params_a: LucasParams,
    params_b: LucasParams,
    q_max: int,
    brute_cap: int = DEFAULT_BRUTE_CAP,
) -> tuple[bool, list[int]]:
    """Do two sequences with one discriminant share a hit set up to q_max?

    Compares witness outcomes over the Sophie Germain primes coprime to both
    2*Qa*D and 2*Qb*D; returns the differing primes when they disagree.
    """
    if params_a.D != params_b.D:
        raise DomainError(f"discriminants differ: {params_a.D} vs {params_b.D}")
    differ = []
    coprime_to = 2 * params_a.Q * params_b.Q * params_a.D
    for q in sieve_primes(q_max).primes:
        if q == 2 or math.gcd(q, coprime_to) != 1:
            continue
        if not is_prime(2 * q + 1):
            continue
        wa = lucas_witness(params_a, q, brute_cap=brute_cap).witness
        wb = lucas_witness(params_b, q, brute_cap=brute_cap).witness
        if wa != wb:
            differ.append(q)
    return (not differ, differ)


def scan_csv(report: LucasScanReport) -> str:
    """Hit rows in the census CSV shape, with a (P, Q, D) header block."""
    lines = [
        f"# P={report.params.P} Q={report.params.Q} D={report.params.D}",
        f"# modulus={report.classes.modulus} residues={list(report.classes.residues)}",
        "q,p,omega_q,alpha_p,ratio,kron_p,q_mod_m",
    ]
    for a in report.hits:
        lines.append(
            f"{a.q},{a.p},{a.period},{a.rank_p},{a.ratio},{a.kron_p},"
            f"{a.q % report.classes.modulus}"
        )
    return "\n".join(lines) + "\n"


def scan_json(report: LucasScanReport) -> str:
    payload = {
        "P": report.params.P,
        "Q": report.params.Q,
        "D": report.params.D,
        "q_max": report.q_max,
        "modulus": report.classes.modulus,
        "residues": list(report.classes.residues),
        "sophie_germain_total": report.sg_total,
        "hit_count": len(report.hits),
        "small_hits": report.small_hits,
        "class_failures": report.class_failures,
        "parity_failures": report.parity_failures,
        "hits": [
            {
                "q": a.q,
                "p": a.p,
                "omega_q": a.period,
                "alpha_p": a.rank_p,
                "ratio": a.ratio,
                "kron_p": a.kron_p,
                "q_mod_m": a.q % report.classes.modulus,
            }
            for a in report.hits
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
