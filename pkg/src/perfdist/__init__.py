"""perfdist: can a given odd integer be the distance between two perfect numbers?

The decision procedure reduces the question for triangular delta = 3 mod 4
to finitely many equations d*x**2 + c = 2**n, closes each by table lookup,
an exact adjacent-powers rule, or modular sieving, and verifies whatever
exponents survive against actual perfect numbers.  Every verdict ships
with re-checkable certificates.
"""

from .arith import (
    BudgetConfig,
    DEFAULT_BUDGET,
    FactorBudgetError,
    Factorization,
    euler_form_filter,
    factorize,
    integer_sqrt,
    is_perfect,
    is_prime,
    is_square,
    sigma,
    squarefree_divisors,
    triangular_index,
    v2,
)
from .decider import (
    Branch,
    CandidateCheck,
    CaseAnalysis,
    DecisionReport,
    DeciderConfig,
    DEFAULT_CONFIG,
    case_analysis,
    check_candidate,
    decide,
    generate_branches,
    verify_pair,
)
from .mersenne import KNOWN_MERSENNE_EXPONENTS, MersenneCandidate, even_perfect, lucas_lehmer
from .rn import (
    BUILTIN_TABLE,
    BranchStatus,
    CompletenessTable,
    DEFAULT_MODULI,
    DEFAULT_N_MAX,
    RNEquation,
    RNSolution,
    SieveReport,
    TableEntry,
    adjacent_powers,
    analyze,
    direct_search,
    load_table,
    sieve,
)

__version__ = "0.1.0"
