"""Analysis of equations d*x**2 + c = 2**n in unknowns x >= 1, n >= 0.

Three closure mechanisms, applied in order: a curated completeness table
(entries carry citations and are re-verified by substitution), an exact
rule for the x**2 +- 1 = 2**m patterns, and modular sieving of the
residue classes of n, combined across moduli and optionally closed by the
"n must be prime" side condition.  Whatever survives is reported open,
with a bounded direct search attached.  Every applied rule leaves a
certificate in the branch's rule trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd, isqrt, lcm

from .arith import is_prime, is_squarefree, v2

DEFAULT_MODULI = (3, 4, 5, 7, 8, 9, 11, 13, 16, 32, 64)
DEFAULT_N_MAX = 2000


@dataclass(frozen=True)
class RNEquation:
    """The pair (d, c) of d*x**2 + c = 2**n; d squarefree positive, c nonzero."""

    d: int
    c: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("d must be a positive integer")
        if self.c == 0:
            raise ValueError("c must be nonzero")
        if not is_squarefree(self.d):
            raise ValueError(f"d = {self.d} is not squarefree")

    def __str__(self) -> str:
        sign = "+" if self.c >= 0 else "-"
        return f"{self.d}*x^2 {sign} {abs(self.c)} = 2^n"

    def to_dict(self) -> dict:
        return {"d": self.d, "c": self.c}


@dataclass(frozen=True, order=True)
class RNSolution:
    """A pair (x, n); holders guarantee d*x**2 + c == 2**n exactly."""

    x: int
    n: int

    def as_pair(self) -> list[int]:
        return [self.x, self.n]


def solution_at(eq: RNEquation, n: int) -> RNSolution | None:
    """The unique solution with this n, if 2**n - c is d times a positive square."""
    t = (1 << n) - eq.c
    if t <= 0 or t % eq.d != 0:
        return None
    q = t // eq.d
    r = isqrt(q)
    if r * r != q:
        return None
    return RNSolution(r, n)


def direct_search(eq: RNEquation, n_min: int, n_max: int) -> list[RNSolution]:
    """Exactly all solutions with n in [n_min, n_max], by testing each exponent."""
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    out = []
    for n in range(max(n_min, 0), n_max + 1):
        s = solution_at(eq, n)
        if s is not None:
            out.append(s)
    return out


def adjacent_powers(eq: RNEquation) -> list[RNSolution] | None:
    """Complete solution set when the equation reduces to x**2 +- 1 = 2**m.

    Applies exactly when d = 2**v and |c| = 2**v (v in {0, 1}, d squarefree).
    x**2 + 1 = 2**m: an odd x forces 2**m == 2 mod 4, so (1, 1) only.
    x**2 - 1 = 2**m: (x-1)(x+1) are powers of two differing by 2, so (3, 3) only.
    Returns None when the pattern does not apply.
    """
    v = v2(eq.d)
    if eq.d != 1 << v or abs(eq.c) != 1 << v:
        return None
    if eq.c > 0:
        return [RNSolution(1, 1 + v)]
    return [RNSolution(3, 3 + v)]


@dataclass(frozen=True)
class SieveReport:
    """Which residue classes of n (mod period) can carry solutions, modulo `modulus`.

    The sequence 2**n mod modulus is eventually periodic: constant on
    n mod period once n >= n_threshold.  A class survives iff some x mod
    modulus satisfies d*x**2 + c == 2**n there.  Any true solution with
    n >= max(n_min, n_threshold) lies in a surviving class; exponents in
    [n_min, n_threshold) are listed in small_n_to_check for direct testing.
    """

    equation: RNEquation
    modulus: int
    n_min: int
    n_parity: str  # "any" | "odd"
    n_threshold: int
    period: int
    surviving_classes: tuple[int, ...]
    small_n_to_check: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "rule": "sieve",
            "equation": self.equation.to_dict(),
            "modulus": self.modulus,
            "n_min": self.n_min,
            "n_parity": self.n_parity,
            "n_threshold": self.n_threshold,
            "period": self.period,
            "surviving_classes": list(self.surviving_classes),
            "small_n_to_check": list(self.small_n_to_check),
        }


def _parity_ok(n: int, parity: str) -> bool:
    return parity != "odd" or n % 2 == 1


def power_cycle(modulus: int) -> tuple[int, int]:
    """(n_threshold, period) of 2**n mod modulus, detected by direct iteration."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    seen: dict[int, int] = {}
    v = 1 % modulus
    i = 0
    while v not in seen:
        seen[v] = i
        v = v * 2 % modulus
        i += 1
    start = seen[v]
    return start, i - start


def sieve(eq: RNEquation, modulus: int, n_min: int = 0, n_parity: str = "any") -> SieveReport:
    """Sieve the residue classes of n modulo the eventual period of 2**n mod modulus.

    Sound, never complete: a surviving class may still hold no solution.
    When the period is even, classes fix the parity of n and the parity
    constraint removes mismatched classes; an odd period carries both
    parities, so the constraint cannot exclude anything at this modulus.
    """
    if n_parity not in ("any", "odd"):
        raise ValueError("n_parity must be 'any' or 'odd'")
    threshold, period = power_cycle(modulus)
    reachable = {(eq.d * (x * x) + eq.c) % modulus for x in range(modulus)}
    base = max(n_min, threshold)
    surviving = []
    for r in range(period):
        if n_parity == "odd" and period % 2 == 0 and r % 2 == 0:
            continue
        n0 = base + (r - base) % period
        if pow(2, n0, modulus) in reachable:
            surviving.append(r)
    small = tuple(n for n in range(n_min, threshold) if _parity_ok(n, n_parity))
    return SieveReport(eq, modulus, n_min, n_parity, threshold, period,
                       tuple(surviving), small)


@dataclass(frozen=True)
class TableEntry:
    """A complete solution set for one equation, with a citation for the claim."""

    d: int
    c: int
    solutions: tuple[RNSolution, ...]
    source: str

    def verify(self) -> None:
        eq = RNEquation(self.d, self.c)
        for s in self.solutions:
            if s.x < 1 or s.n < 0 or eq.d * s.x * s.x + eq.c != 1 << s.n:
                raise ValueError(f"table entry for {eq} lists a non-solution {s}")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "c": self.c,
            "solutions": [s.as_pair() for s in sorted(self.solutions)],
            "source": self.source,
        }


@dataclass(frozen=True)
class CompletenessTable:
    """Curated equations whose full solution sets are known from the literature."""

    entries: tuple[TableEntry, ...]

    def __post_init__(self) -> None:
        for entry in self.entries:
            entry.verify()

    def lookup(self, d: int, c: int) -> TableEntry | None:
        for entry in self.entries:
            if entry.d == d and entry.c == c:
                return entry
        return None

    def merged_with(self, entries: tuple[TableEntry, ...]) -> "CompletenessTable":
        """New table where `entries` override same-(d, c) rows of this one."""
        keep = [e for e in self.entries if not any(x.d == e.d and x.c == e.c for x in entries)]
        return CompletenessTable(tuple(keep) + entries)

    def to_dict(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]


BUILTIN_TABLE = CompletenessTable((
    TableEntry(5, 3, (RNSolution(1, 3), RNSolution(5, 7)),
               "Ramanujan-Nagell literature: 5x^2 + 3 = 2^n has exactly (x,n) = (1,3), (5,7) "
               "in positive integers"),
    TableEntry(2, 6, (RNSolution(1, 3),),
               "elementary 2-adic descent: 2x^2 + 6 = 2^n forces x^2 + 3 = 2^(n-1), and "
               "x^2 + 3 = 2^m has only (x,m) = (1,2) since x^2 = -3 mod 8 is impossible"),
))


def load_table(path: str, base: CompletenessTable = BUILTIN_TABLE) -> CompletenessTable:
    """Read table entries from a JSON-lines file and merge them over `base`.

    One object per line: {"d": int, "c": int, "solutions": [[x, n], ...],
    "source": str}.  Blank lines and lines starting with # are skipped.
    Every entry is re-verified by substitution on load.
    """
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
                entry = TableEntry(
                    int(obj["d"]), int(obj["c"]),
                    tuple(RNSolution(int(x), int(n)) for x, n in obj["solutions"]),
                    str(obj["source"]),
                )
                entry.verify()
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad table entry: {exc}") from exc
            entries.append(entry)
    return base.merged_with(tuple(entries))


@dataclass(frozen=True)
class BranchStatus:
    """Outcome of analysing one equation under the stated n-constraints.

    closed_complete: `solutions` is provably the complete set.
    closed_finite_n: everything outside a finite, explicitly-checked set of
    exponents is excluded by the certificates in `rule_trace`.
    open: at least one residue class with infinitely many admissible n survived.
    """

    equation: RNEquation
    status: str  # "closed_complete" | "closed_finite_n" | "open"
    solutions: tuple[RNSolution, ...]
    rule_trace: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "equation": self.equation.to_dict(),
            "status": self.status,
            "solutions": [s.as_pair() for s in self.solutions],
            "rule_trace": list(self.rule_trace),
        }


def analyze(eq: RNEquation,
            n_min: int = 0,
            n_parity: str = "any",
            moduli: tuple[int, ...] = DEFAULT_MODULI,
            n_max: int = DEFAULT_N_MAX,
            table: CompletenessTable = BUILTIN_TABLE,
            primes_only: bool = False) -> BranchStatus:
    """Run the closure pipeline on one equation.

    Order: completeness table, adjacent-powers rule, then sieving over
    every modulus with surviving classes intersected at the lcm of the
    periods (parity folded in).  An empty intersection closes the branch
    up to finitely many small exponents, each tested directly.  When the
    caller declares n restricted to primes, a surviving class r mod k
    with g = gcd(r, k) > 1 contains at most the single prime g and closes
    too.  Anything else is reported open with a bounded search attached.
    """
    if not moduli:
        raise ValueError("moduli must be nonempty")
    if n_max < n_min:
        raise ValueError("n_max must be >= n_min")

    def keep(sols: list[RNSolution]) -> tuple[RNSolution, ...]:
        return tuple(sorted(s for s in sols if s.n >= n_min and _parity_ok(s.n, n_parity)))

    trace: list[dict] = []

    entry = table.lookup(eq.d, eq.c)
    if entry is not None:
        kept = keep(list(entry.solutions))
        trace.append({
            "rule": "completeness_table",
            "source": entry.source,
            "complete_solutions": [s.as_pair() for s in sorted(entry.solutions)],
            "kept": [s.as_pair() for s in kept],
        })
        return BranchStatus(eq, "closed_complete", kept, tuple(trace))

    exact = adjacent_powers(eq)
    if exact is not None:
        kept = keep(exact)
        shift = v2(eq.d)
        pattern = f"x^2 {'+' if eq.c > 0 else '-'} 1 = 2^m"
        trace.append({
            "rule": "adjacent_powers",
            "pattern": pattern,
            "power_shift": shift,
            "complete_solutions": [s.as_pair() for s in sorted(exact)],
            "kept": [s.as_pair() for s in kept],
        })
        return BranchStatus(eq, "closed_complete", kept, tuple(trace))

    reports = [sieve(eq, m, n_min, n_parity) for m in moduli]
    trace.extend(r.to_dict() for r in reports)

    valid_from = max([n_min] + [r.n_threshold for r in reports])
    combined_period = lcm(*[r.period for r in reports])
    if n_parity == "odd":
        combined_period = lcm(combined_period, 2)
    # parity folding made combined_period even whenever n_parity is "odd",
    # so a residue's parity is the parity of every n in its class
    surviving = [
        r for r in range(combined_period)
        if _parity_ok(r, n_parity)
        and all(r % rep.period in rep.surviving_classes for rep in reports)
    ]
    trace.append({
        "rule": "sieve_combination",
        "moduli": list(moduli),
        "combined_period": combined_period,
        "valid_from": valid_from,
        "surviving_classes": surviving,
    })

    leftover = [n for n in range(n_min, valid_from) if _parity_ok(n, n_parity)]

    def finite_close(checks: list[int]) -> BranchStatus:
        found = []
        for n in sorted(set(checks)):
            s = solution_at(eq, n)
            if s is not None:
                found.append(s)
        trace.append({
            "rule": "finite_checks",
            "n_values": sorted(set(checks)),
            "solutions": [s.as_pair() for s in sorted(found)],
        })
        return BranchStatus(eq, "closed_finite_n", tuple(sorted(found)), tuple(trace))

    if not surviving:
        return finite_close(leftover)

    if primes_only:
        closures = []
        open_classes = []
        for r in surviving:
            g = gcd(r, combined_period)  # gcd(0, k) == k
            if g == 1:
                open_classes.append(r)
                continue
            check = None
            if (is_prime(g) == "prime" and g % combined_period == r
                    and g >= valid_from and _parity_ok(g, n_parity)):
                check = g
            closures.append({"residue": r, "gcd": g, "prime_to_check": check})
        trace.append({
            "rule": "prime_class_closure",
            "n_restricted_to_primes": True,
            "closed_classes": closures,
            "open_classes": open_classes,
        })
        if not open_classes:
            extra = [c["prime_to_check"] for c in closures if c["prime_to_check"] is not None]
            return finite_close(leftover + extra)

    found = [s for s in direct_search(eq, n_min, n_max) if _parity_ok(s.n, n_parity)]
    trace.append({
        "rule": "direct_search",
        "n_min": n_min,
        "n_max": n_max,
        "solutions": [s.as_pair() for s in sorted(found)],
    })
    return BranchStatus(eq, "open", tuple(sorted(found)), tuple(trace))
