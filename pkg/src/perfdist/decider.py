"""The full decision procedure for one odd delta.

Pipeline: the mod-12 congruence filter (delta = +-1 mod 12 can never be a
distance between perfect numbers), scope check (the method needs delta
triangular and 3 mod 4), the delta+6 perfectness check, branch generation
over squarefree divisors with 2-adic parity pruning, equation analysis
with n restricted to primes, and verification of every candidate exponent
through the Lucas-Lehmer / divisor-sum pipeline.  The report carries
enough certificates to re-check the verdict independently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

from . import mersenne
from .arith import (
    BudgetConfig,
    DEFAULT_BUDGET,
    DETERMINISTIC_PRIMALITY_BOUND,
    FactorBudgetError,
    euler_form_filter,
    factorize,
    is_perfect,
    is_prime,
    squarefree_divisors,
    triangular_index,
    v2,
)
from .rn import (
    BUILTIN_TABLE,
    BranchStatus,
    CompletenessTable,
    DEFAULT_MODULI,
    DEFAULT_N_MAX,
    RNEquation,
    analyze,
    solution_at,
)


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, compact separators, ASCII only."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


@dataclass(frozen=True)
class DeciderConfig:
    """Everything decide() depends on besides delta; hashed into a fingerprint."""

    moduli: tuple[int, ...] = DEFAULT_MODULI
    n_max: int = DEFAULT_N_MAX
    budget: BudgetConfig = DEFAULT_BUDGET
    exponent_cap: int = mersenne.DEFAULT_EXPONENT_CAP
    table: CompletenessTable = BUILTIN_TABLE

    def to_dict(self) -> dict:
        return {
            "moduli": list(self.moduli),
            "n_max": self.n_max,
            "budget": self.budget.to_dict(),
            "exponent_cap": self.exponent_cap,
            "table": self.table.to_dict(),
        }

    def fingerprint(self) -> str:
        digest = hashlib.sha256(canonical_json(self.to_dict()).encode("ascii"))
        return digest.hexdigest()[:16]

    @staticmethod
    def from_dict(obj: dict) -> "DeciderConfig":
        from .rn import RNSolution, TableEntry

        entries = tuple(
            TableEntry(e["d"], e["c"],
                       tuple(RNSolution(x, n) for x, n in e["solutions"]),
                       e["source"])
            for e in obj["table"]
        )
        return DeciderConfig(
            moduli=tuple(obj["moduli"]),
            n_max=obj["n_max"],
            budget=BudgetConfig(**obj["budget"]),
            exponent_cap=obj["exponent_cap"],
            table=CompletenessTable(entries),
        )


DEFAULT_CONFIG = DeciderConfig()


@dataclass(frozen=True)
class CaseAnalysis:
    """Congruence and triangularity facts that route delta through the procedure."""

    delta: int
    touchard_blocked: bool
    mod4_class: int
    b: int | None
    in_scope: bool

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "touchard_blocked": self.touchard_blocked,
            "mod4_class": self.mod4_class,
            "b": self.b,
            "in_scope": self.in_scope,
        }


def case_analysis(delta: int) -> CaseAnalysis:
    """Classify an odd delta: mod-12 blocking, mod-4 class, triangular index, scope."""
    if delta < 1 or delta % 2 == 0:
        raise ValueError("delta must be a positive odd integer")
    blocked = delta % 12 in (1, 11)
    mod4 = delta % 4
    b = triangular_index(delta)
    in_scope = blocked or (mod4 == 3 and b is not None)
    return CaseAnalysis(delta, blocked, mod4, b, in_scope)


@dataclass(frozen=True)
class Branch:
    """One (side, d) pair: side A encodes 2**p = d*x**2 - b + 1, side B 2**p = d*x**2 + b."""

    side: str  # "A" | "B"
    d: int
    c: int
    status: BranchStatus | None = None

    @property
    def equation(self) -> RNEquation:
        return RNEquation(self.d, self.c)

    def to_dict(self) -> dict:
        out = {"side": self.side, "d": self.d, "c": self.c}
        if self.status is not None:
            out["status"] = self.status.status
            out["solutions"] = [s.as_pair() for s in self.status.solutions]
            out["rule_trace"] = list(self.status.rule_trace)
        return out


@dataclass(frozen=True)
class BranchGeneration:
    """Surviving branches plus certificates for every pruned (side, d) pair."""

    branches: tuple[Branch, ...]
    pruned: tuple[dict, ...]
    forced_candidate_primes: tuple[int, ...]


def generate_branches(b: int, cfg: DeciderConfig = DEFAULT_CONFIG) -> BranchGeneration:
    """Enumerate squarefree divisors of 2*(2b-1) per side and prune by 2-adic parity.

    Side A's value 2**p - 1 + b and side B's 2**p - b have a fixed 2-adic
    valuation v once p exceeds v, so v2(d) must match v mod 2 (x**2
    contributes an even valuation); primes p <= v escape the argument and
    are checked directly, with any hit recorded as a forced candidate.
    """
    if b < 3:
        raise ValueError("triangular index must be >= 3")
    divisors = squarefree_divisors(2 * (2 * b - 1), cfg.budget)
    branches = []
    pruned = []
    forced = set()
    for side in ("A", "B"):
        c = 1 - b if side == "A" else b
        # side value is 2**p + (b - 1) on A and 2**p - b on B
        const = b - 1 if side == "A" else b
        v = v2(const) if const % 2 == 0 else 0
        want_even_d = v % 2 == 1
        for d in divisors:
            if (d % 2 == 0) == want_even_d:
                branches.append(Branch(side, d, c))
                continue
            checks = []
            for p in range(2, v + 1):
                if is_prime(p) != "prime":
                    continue
                s = solution_at(RNEquation(d, c), p)
                checks.append({"p": p, "solution": s.as_pair() if s else None})
                if s is not None:
                    forced.add(p)
            pruned.append({
                "side": side,
                "d": d,
                "c": c,
                "side_value_v2": v,
                "valid_for_exponents_above": v,
                "reason": (f"v2(2^p {'+' if side == 'A' else '-'} {const}) = {v} for p > {v}, "
                           f"while v2(d*x^2) = {v2(d)} mod 2 != {v} mod 2"),
                "small_prime_checks": checks,
            })
    branches.sort(key=lambda br: (br.side, br.d))
    return BranchGeneration(tuple(branches), tuple(pruned), tuple(sorted(forced)))


@dataclass(frozen=True)
class CandidateCheck:
    """Verification record for one exponent p that survived branch analysis."""

    p: int
    mersenne_status: str  # "prime" | "composite" | "untested"
    m: int | None = None
    n_candidate: int | None = None
    euler_filter: str | None = None
    perfect_status: str | None = None
    factorization: dict | None = None
    probable_prime_factors: tuple[int, ...] = ()

    @property
    def outcome(self) -> str:
        if self.mersenne_status == "composite":
            return "eliminated"
        if self.mersenne_status == "untested":
            return "unresolved"
        if self.perfect_status == "perfect":
            return "solution"
        if self.perfect_status == "not_perfect" or self.euler_filter == "impossible":
            return "eliminated"
        return "unresolved"

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "mersenne_status": self.mersenne_status,
            "m": self.m,
            "n_candidate": self.n_candidate,
            "euler_filter": self.euler_filter,
            "perfect_status": self.perfect_status,
            "factorization": self.factorization,
            "probable_prime_factors": list(self.probable_prime_factors),
            "outcome": self.outcome,
        }


def check_candidate(p: int, delta: int, cfg: DeciderConfig = DEFAULT_CONFIG) -> CandidateCheck:
    """Test whether exponent p yields the pair (2**(p-1)*(2**p - 1), that minus delta)."""
    cand = mersenne.classify(p, cfg.exponent_cap)
    if cand.status != "prime":
        return CandidateCheck(p, cand.status)
    m = mersenne.even_perfect(p)
    n_cand = m - delta
    if n_cand < 1:
        return CandidateCheck(p, "prime", m, n_cand)
    euler = euler_form_filter(n_cand, cfg.budget)
    perfect = is_perfect(n_cand, cfg.budget)
    f = factorize(n_cand, cfg.budget)
    probable = tuple(q for q, _ in f.factors
                     if q >= DETERMINISTIC_PRIMALITY_BOUND
                     and is_prime(q, cfg.budget) == "probably_prime")
    return CandidateCheck(p, "prime", m, n_cand, euler, perfect, f.to_dict(), probable)


@dataclass(frozen=True)
class PairCheck:
    """Perfectness of two integers and their distance."""

    x: int
    y: int
    x_status: str
    y_status: str
    both_perfect: bool
    distance: int

    def to_dict(self) -> dict:
        return {
            "x": self.x, "y": self.y,
            "x_status": self.x_status, "y_status": self.y_status,
            "both_perfect": self.both_perfect, "distance": self.distance,
        }


def verify_pair(x: int, y: int, cfg: DeciderConfig = DEFAULT_CONFIG) -> PairCheck:
    """Report whether x and y are both perfect, and |x - y|."""
    if x < 1 or y < 1:
        raise ValueError("verify_pair requires positive integers")
    xs = is_perfect(x, cfg.budget)
    ys = is_perfect(y, cfg.budget)
    return PairCheck(x, y, xs, ys, xs == "perfect" and ys == "perfect", abs(x - y))


@dataclass(frozen=True)
class DecisionReport:
    """Verdict for one delta plus every certificate used to reach it."""

    delta: int
    case_analysis: CaseAnalysis
    delta_plus_6_check: dict | None
    branches: tuple[Branch, ...]
    candidates: tuple[CandidateCheck, ...]
    verdict: str  # "eliminated" | "inconclusive" | "solution_found" | "out_of_scope"
    certificates: dict
    obstructions: tuple[str, ...]
    config: DeciderConfig

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "verdict": self.verdict,
            "case_analysis": self.case_analysis.to_dict(),
            "delta_plus_6": self.delta_plus_6_check,
            "branches": [br.to_dict() for br in self.branches],
            "candidates": [c.to_dict() for c in self.candidates],
            "certificates": self.certificates,
            "obstructions": list(self.obstructions),
            "config": self.config.to_dict(),
            "config_fingerprint": self.config.fingerprint(),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def _ep_value(p: int) -> int:
    # candidate even-perfect value at exponent p, no primality assumed
    return (1 << (p - 1)) * ((1 << p) - 1)


def _min_exponent(delta: int) -> int:
    p = 2
    while _ep_value(p) <= delta:
        p += 1
        while is_prime(p) != "prime":
            p += 1
    return p


def decide(delta: int, cfg: DeciderConfig = DEFAULT_CONFIG) -> DecisionReport:
    """Run the whole procedure on one odd delta and assemble the verdict.

    eliminated: delta provably cannot be the distance between two perfect
    numbers (every branch closed, every candidate refuted, delta+6 not
    perfect -- or the mod-12 filter already blocks it).  inconclusive: an
    open branch or an exhausted budget stands in the way; the obstruction
    is named.  solution_found: an actual pair was exhibited.
    out_of_scope: the method does not cover this delta.
    """
    ca = case_analysis(delta)
    certificates: dict = {
        "touchard": {"residue_mod_12": delta % 12, "blocked": ca.touchard_blocked},
    }

    def report(verdict, d6=None, branches=(), candidates=(), obstructions=()):
        return DecisionReport(delta, ca, d6, tuple(branches), tuple(candidates),
                              verdict, certificates, tuple(obstructions), cfg)

    if ca.touchard_blocked:
        certificates["touchard"]["conclusion"] = (
            "delta = +-1 mod 12 can never be a distance between two perfect numbers")
        d6_value = delta + 6
        d6_status = is_perfect(d6_value, cfg.budget)
        d6 = {"value": d6_value, "perfect_status": d6_status}
        if d6_status == "perfect":  # unreachable if the mod-12 theorem holds
            return report("solution_found", d6)
        return report("eliminated", d6)

    if not ca.in_scope:
        reason = ("delta = 1 mod 4 would require an odd perfect number exceeding an even one; "
                  "the factorization step needs delta = 3 mod 4"
                  if ca.mod4_class == 1 else
                  "delta is not a triangular number, so 2n = (2^p - 1 + b)(2^p - b) is unavailable")
        certificates["scope"] = {"mod4_class": ca.mod4_class, "b": ca.b, "reason": reason}
        return report("out_of_scope")

    obstructions: list[str] = []

    d6_value = delta + 6
    d6_status = is_perfect(d6_value, cfg.budget)
    d6 = {"value": d6_value, "perfect_status": d6_status}
    if d6_status == "perfect":
        certificates["exhibited_pair"] = [d6_value, 6]
        return report("solution_found", d6)
    if d6_status == "unknown":
        obstructions.append(f"perfectness of delta + 6 = {d6_value} unknown within factor budget")

    assert ca.b is not None
    try:
        gen = generate_branches(ca.b, cfg)
    except FactorBudgetError:
        obstructions.append(
            f"cannot enumerate squarefree divisors of 2*(2b-1) = {2 * (2 * ca.b - 1)} "
            "within factor budget")
        return report("inconclusive", d6, obstructions=obstructions)
    certificates["parity_pruning"] = list(gen.pruned)

    p_min = _min_exponent(delta)
    n_parity = "odd" if p_min > 2 else "any"
    certificates["exponent_floor"] = {
        "p_min": p_min,
        "n_parity": n_parity,
        "reason": "least prime p with 2^(p-1)*(2^p - 1) > delta; smaller p cannot give m - delta >= 1",
    }

    branches = []
    for br in gen.branches:
        status = analyze(br.equation, n_min=p_min, n_parity=n_parity,
                         moduli=cfg.moduli, n_max=cfg.n_max, table=cfg.table,
                         primes_only=True)
        branches.append(replace(br, status=status))
        if status.status == "open":
            open_classes = [t for t in status.rule_trace if t["rule"] == "prime_class_closure"]
            detail = f" (classes {open_classes[0]['open_classes']})" if open_classes else ""
            obstructions.append(f"branch {br.side} d={br.d} open{detail}")

    candidate_ps = {s.n for br in branches for s in br.status.solutions
                    if is_prime(s.n) == "prime"}
    candidate_ps.update(p for p in gen.forced_candidate_primes if p >= p_min)
    candidates = [check_candidate(p, delta, cfg) for p in sorted(candidate_ps)]

    for cand in candidates:
        if cand.outcome == "solution":
            certificates["exhibited_pair"] = [cand.m, cand.n_candidate]
            return report("solution_found", d6, branches, candidates, obstructions)
        if cand.outcome == "unresolved":
            why = ("Mersenne test skipped: exponent above cap"
                   if cand.mersenne_status == "untested"
                   else "perfectness unknown within factor budget")
            obstructions.append(f"candidate p={cand.p} unresolved ({why})")

    if obstructions:
        return report("inconclusive", d6, branches, candidates, obstructions)
    return report("eliminated", d6, branches, candidates)
