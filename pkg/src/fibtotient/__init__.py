"""Rank of apparition, Pisano periods, Sophie Germain witnesses and
totient-divisibility residue sets of Fibonacci and general Lucas sequences."""

from .arith import (
    PrimeList,
    factor_word,
    is_prime,
    is_sophie_germain,
    kronecker,
    sieve_primes,
    v2,
)
from .errors import BudgetError, CapacityError, DomainError, TableError
from .lucas import (
    FIBONACCI,
    LucasParams,
    PeriodRecord,
    brute_rank,
    divides_index,
    lucas_pair_mod,
    lucas_u_exact,
    period_mod_prime,
    rank_at_square,
    rank_of_apparition,
)
from .factoring import (
    FactorTable,
    PartialFactorization,
    Verdict,
    factor_lucas_index,
    load_factor_table,
    load_factor_table_path,
    totient_divisibility,
    totient_from_complete,
)
from .analysis import (
    CensusReport,
    QAnalysis,
    SqSet,
    audit_theorems,
    census,
    sq_empirical,
    sq_predicted,
    verify_converse,
    witness_2q1,
    witness_search,
)
from .uniqueness import (
    KReport,
    case1_scan,
    case2_scan,
    direct_exception_scan,
    unique_scan,
)
from .general import (
    CongruenceClassSet,
    congruence_classes,
    lucas_scan,
    lucas_witness,
    same_d_equivalence,
)

__version__ = "0.1.0"
