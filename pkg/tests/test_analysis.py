"""Witness tests, predicted and empirical residue sets, audits, census."""

import pytest

from fibtotient.analysis import (
    FAIL,
    NOT_APPLICABLE,
    PASS,
    audit_theorems,
    census,
    census_csv,
    census_json,
    sq_empirical,
    sq_predicted,
    verify_converse,
    witness_2q1,
    witness_search,
)
from fibtotient.errors import BudgetError, CapacityError


def test_witness_examples():
    a = witness_2q1(53)
    assert (a.witness, a.period, a.rank_p, a.ratio, a.leg5_p) == (True, 108, 36, 3, -1)
    a = witness_2q1(5)
    assert (a.witness, a.period, a.rank_p, a.ratio, a.leg5_p) == (True, 20, 10, 2, 1)
    a = witness_2q1(11)  # 23 is prime but z(23) does not divide pi(11)
    assert a.p_prime and not a.witness
    a = witness_2q1(1583)
    assert a.witness and a.ratio == 33


def test_witness_ratio_times_rank_is_period():
    for q in (3, 5, 23, 53, 83, 173, 1103, 1583):
        a = witness_2q1(q)
        assert a.witness and a.ratio * a.rank_p == a.period


def test_sq_predicted():
    s = sq_predicted(53)
    assert s.members() == (0, 36, 72) and s.period == 108
    s = sq_predicted(3)
    assert s.members() == (0,) and s.period == 8
    s = sq_predicted(7)
    assert s.empty and s.members() == ()


def test_zero_in_every_predicted_set():
    for q in (3, 5, 23, 53, 83, 173, 293, 1103, 1583):
        s = sq_predicted(q)
        assert not s.empty and 0 in s.members()


def test_witness_search():
    assert witness_search(53, 100) == [(2, 107)]
    assert witness_search(5, 100) == [(2, 11), (8, 41)]
    assert witness_search(7, 100) == []


def test_witness_search_only_finds_safe_primes():
    # apart from q = 5, every pair found has k = 2, i.e. p = 2q+1
    from fibtotient.arith import sieve_primes

    for q in sieve_primes(300).primes:
        if q == 2:
            continue
        for k, p in witness_search(q, 100):
            if q != 5:
                assert k == 2 and p == 2 * q + 1, (q, k, p)


def test_audits_pass_for_53():
    results = dict(audit_theorems(witness_2q1(53)))
    assert all(status == PASS for status in results.values())


def test_audits_exempt_small_primes():
    a5 = witness_2q1(5)
    assert all(status == NOT_APPLICABLE for _, status in audit_theorems(a5))
    assert a5.ratio == 2  # the one even ratio in the whole census
    a3 = witness_2q1(3)
    assert all(status == NOT_APPLICABLE for _, status in audit_theorems(a3))


def test_audits_pass_for_83():
    a = witness_2q1(83)
    assert a.ratio == 1
    assert all(status == PASS for _, status in audit_theorems(a))


def test_audits_not_applicable_without_witness():
    a = witness_2q1(11)
    assert all(status == NOT_APPLICABLE for _, status in audit_theorems(a))


def test_empirical_q3(table):
    verdicts = sq_empirical(3, table=table)
    assert verdicts[0].yes  # F_8 = 21 has the factor 7 = 1 mod 3
    assert verdicts[4].no  # F_4 = 3, phi = 2


def test_empirical_q7_class0_refuted(table):
    verdicts = sq_empirical(7, table=table)
    assert verdicts[0].no  # F_16 = 987 = 3 * 7 * 47, phi = 2 * 6 * 46


def test_empirical_never_contradicts_prediction(table):
    for q in (3, 5, 23, 53):
        predicted = set(sq_predicted(q).members())
        verdicts = sq_empirical(q, table=table, budget=10_000)
        for r in predicted:
            assert verdicts[r].yes, (q, r)
        assert not any(verdicts[r].no for r in predicted)


def test_empirical_work_cap():
    with pytest.raises(BudgetError):
        sq_empirical(53, work_cap=10)


def test_census_small():
    rep = census(10)
    assert [row.q for row in rep.rows] == [3, 5]
    assert rep.sg_count == 2  # of the odd primes 3, 5, 7 only 3 and 5 qualify
    # row contents for q = 3
    row = rep.rows[0]
    assert (row.p, row.pi_q, row.z_p, row.ratio, row.leg5_p) == (7, 8, 8, 1, -1)


def test_census_monotone_prefix():
    small = census(1000)
    large = census(2000)
    assert [r.q for r in small.rows] == [r.q for r in large.rows][: len(small.rows)]
    for a, b in zip(small.rows, large.rows):
        assert a == b


def test_census_workers_merge_deterministically():
    seq = census(800)
    par = census(800, workers=2)
    assert seq.rows == par.rows
    assert seq.sg_count == par.sg_count
    assert seq.hit_count == par.hit_count


def test_census_cap():
    with pytest.raises(CapacityError):
        census(200_000)


def test_census_serialization():
    rep = census(200)
    text = census_csv(rep)
    lines = text.strip().split("\n")
    assert lines[0] == "q,p,pi_q,z_p,ratio,leg5_p,q_mod15,q_mod60"
    assert lines[1] == "3,7,8,8,1,-1,3,3"
    assert census_csv(rep) == census_csv(census(200))  # byte-stable
    payload = census_json(rep)
    assert '"sophie_germain_count"' in payload


def test_verify_converse_small(table):
    rep = verify_converse(50, samples_per_class=1, table=table)
    assert rep.exceptions == []
    assert rep.classes_total > 0
    assert 0.0 <= rep.unknown_rate < 1.0
    assert 7 in rep.probed and 53 not in rep.probed


def test_verify_converse_q7_alone(table):
    rep = verify_converse(7, table=table)
    assert rep.probed == [7]
    assert rep.exceptions == []
