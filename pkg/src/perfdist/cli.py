"""Command-line front end.

Subcommands: `decide` for a single delta, `rn solve` / `rn sieve` for raw
equation tooling, `scan` for resumable batch surveys over triangular
indices, and `verify-pair`.  Exit codes: 0 eliminated / success, 1 usage
error, 2 inconclusive or out of scope (or a failed pair check), 3
solution found.  Flags mirror environment variables with the PERFDIST_
prefix; --json switches every command to the stable record format.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
import time

from .arith import BudgetConfig, FactorBudgetError
from .decider import DeciderConfig, canonical_json, decide, verify_pair
from .mersenne import DEFAULT_EXPONENT_CAP
from .rn import (
    BUILTIN_TABLE,
    DEFAULT_MODULI,
    DEFAULT_N_MAX,
    RNEquation,
    direct_search,
    load_table,
    sieve,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDECIDED = 2
EXIT_SOLUTION = 3

ENV_PREFIX = "PERFDIST_"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _env(name: str, fallback):
    return os.environ.get(ENV_PREFIX + name, fallback)


def _parse_moduli(text: str) -> tuple[int, ...]:
    try:
        moduli = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise _UsageError(f"bad moduli list: {text!r}")
    if not moduli or min(moduli) < 2:
        raise _UsageError("moduli must be integers >= 2")
    return moduli


def _config_from(args) -> DeciderConfig:
    table = BUILTIN_TABLE
    if args.table:
        table = load_table(args.table)
    return DeciderConfig(
        moduli=_parse_moduli(args.moduli),
        n_max=args.n_max,
        budget=BudgetConfig(rho_iteration_budget=args.factor_budget),
        exponent_cap=DEFAULT_EXPONENT_CAP,
        table=table,
    )


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-max", type=int, default=int(_env("N_MAX", DEFAULT_N_MAX)),
                   help="exponent bound for direct searches (default 2000)")
    p.add_argument("--moduli", default=_env("MODULI", ",".join(map(str, DEFAULT_MODULI))),
                   help="comma-separated sieve moduli")
    p.add_argument("--factor-budget", type=int,
                   default=int(_env("FACTOR_BUDGET", BudgetConfig().rho_iteration_budget)),
                   help="iteration budget for factorization beyond trial division")
    p.add_argument("--table", default=_env("TABLE", None),
                   help="path to a completeness-table file (JSON lines)")
    p.add_argument("--json", action="store_true",
                   default=os.environ.get(ENV_PREFIX + "JSON", "") not in ("", "0"),
                   help="emit the machine-readable record instead of text")


def _parse_delta(text: str) -> int:
    try:
        delta = int(text)
    except ValueError:
        raise _UsageError(f"delta must be an integer, got {text!r}")
    if delta < 1 or delta % 2 == 0:
        raise _UsageError(f"delta must be a positive odd integer, got {delta}")
    return delta


def _render_decision(report) -> str:
    lines = [f"delta = {report.delta}"]
    ca = report.case_analysis
    lines.append(f"  mod 12 = {report.delta % 12} ({'blocked' if ca.touchard_blocked else 'not blocked'}), "
                 f"mod 4 = {ca.mod4_class}, triangular index b = {ca.b}")
    if report.delta_plus_6_check:
        d6 = report.delta_plus_6_check
        lines.append(f"  delta + 6 = {d6['value']}: {d6['perfect_status']}")
    for br in report.branches:
        sols = ", ".join(f"(x={s.x}, n={s.n})" for s in br.status.solutions) or "none"
        if br.status.status == "closed_complete":
            via = br.status.rule_trace[0]["rule"]
        elif br.status.status == "closed_finite_n":
            via = "sieve + finite checks"
        else:
            via = "bounded search only"
        lines.append(f"  branch {br.side} d={br.d} c={br.c}: {br.status.status} "
                     f"[{via}]; solutions: {sols}")
    for cand in report.candidates:
        if cand.mersenne_status != "prime":
            lines.append(f"  candidate p={cand.p}: 2^p - 1 {cand.mersenne_status}")
        else:
            lines.append(f"  candidate p={cand.p}: m = {cand.m}, m - delta = {cand.n_candidate}: "
                         f"euler {cand.euler_filter}, {cand.perfect_status} -> {cand.outcome}")
    for obs in report.obstructions:
        lines.append(f"  obstruction: {obs}")
    lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines)


def _verdict_exit(verdict: str) -> int:
    if verdict == "eliminated":
        return EXIT_OK
    if verdict == "solution_found":
        return EXIT_SOLUTION
    return EXIT_UNDECIDED


def cmd_decide(args) -> int:
    delta = _parse_delta(args.delta)
    report = decide(delta, _config_from(args))
    print(report.to_json() if args.json else _render_decision(report))
    return _verdict_exit(report.verdict)


def _parse_equation(args) -> RNEquation:
    try:
        return RNEquation(args.d, args.c)
    except ValueError as exc:
        raise _UsageError(str(exc))


def cmd_rn_solve(args) -> int:
    eq = _parse_equation(args)
    solutions = direct_search(eq, 0, args.n_max)
    if args.json:
        print(canonical_json({
            "equation": eq.to_dict(),
            "n_max": args.n_max,
            "solutions": [s.as_pair() for s in solutions],
        }))
    else:
        print(f"{eq}, n <= {args.n_max}")
        if not solutions:
            print("no solutions")
        for s in solutions:
            print(f"x={s.x} n={s.n}")
    return EXIT_OK


def cmd_rn_sieve(args) -> int:
    eq = _parse_equation(args)
    report = sieve(eq, args.modulus, args.n_min, args.n_parity)
    if args.json:
        print(canonical_json(report.to_dict()))
    else:
        print(f"{eq} mod {report.modulus}: 2^n enters a cycle of length {report.period} "
              f"at n = {report.n_threshold}")
        if report.surviving_classes:
            classes = ", ".join(str(r) for r in report.surviving_classes)
            print(f"surviving classes mod {report.period}: {classes}")
        else:
            print("no surviving classes")
        if report.small_n_to_check:
            print("check directly: n in " + str(list(report.small_n_to_check)))
    return EXIT_OK


def _scan_worker(payload: tuple[int, int, dict]) -> tuple[int, int, dict, int]:
    b, delta, cfg_dict = payload
    cfg = DeciderConfig.from_dict(cfg_dict)
    t0 = time.perf_counter()
    report = decide(delta, cfg)
    elapsed_ms = int((time.perf_counter() - t0) * 1000)
    return b, delta, report.to_dict(), elapsed_ms


def _scan_record(b, delta, report_dict, elapsed_ms, fingerprint) -> dict:
    return {
        "b": b,
        "delta": delta,
        "verdict": report_dict["verdict"],
        "branches": [
            {"side": br["side"], "d": br["d"], "status": br.get("status")}
            for br in report_dict["branches"]
        ],
        "elapsed_ms": elapsed_ms,
        "config_fingerprint": fingerprint,
    }


def cmd_scan(args) -> int:
    if args.b_from < 3 or args.b_from > args.b_to:
        raise _UsageError("need 3 <= b-from <= b-to")
    cfg = _config_from(args)
    fingerprint = cfg.fingerprint()

    existing: dict[int, dict] = {}
    if os.path.exists(args.out):
        with open(args.out, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except ValueError:
                    print(f"error: {args.out} holds a non-record line", file=sys.stderr)
                    return EXIT_USAGE
                existing[rec["delta"]] = rec

    todo = []
    for b in range(args.b_from, args.b_to + 1):
        delta = b * (b - 1) // 2
        if delta % 4 != 3:
            continue
        prior = existing.get(delta)
        if prior is not None and prior.get("config_fingerprint") == fingerprint:
            continue
        todo.append((b, delta))

    try:
        out_fh = open(args.out, "a", encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    cfg_dict = cfg.to_dict()
    new_records = {}
    with out_fh:
        def emit(b, delta, report_dict, elapsed_ms):
            rec = _scan_record(b, delta, report_dict, elapsed_ms, fingerprint)
            new_records[delta] = rec
            out_fh.write(canonical_json(rec) + "\n")
            out_fh.flush()
            print(f"delta={delta} (b={b}): {rec['verdict']} [{elapsed_ms} ms]", file=sys.stderr)

        if args.jobs > 1 and len(todo) > 1:
            payloads = [(b, delta, cfg_dict) for b, delta in todo]
            with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for b, delta, rep, ms in pool.map(_scan_worker, payloads):
                    emit(b, delta, rep, ms)
        else:
            for b, delta in todo:
                b2, d2, rep, ms = _scan_worker((b, delta, cfg_dict))
                emit(b2, d2, rep, ms)

    # restore delta ordering: stale records are replaced, nothing is dropped
    merged = dict(existing)
    merged.update(new_records)
    with open(args.out, "w", encoding="utf-8") as fh:
        for delta in sorted(merged):
            fh.write(canonical_json(merged[delta]) + "\n")

    lo = args.b_from * (args.b_from - 1) // 2
    hi = args.b_to * (args.b_to - 1) // 2
    solved = [d for d, rec in merged.items()
              if lo <= d <= hi and rec["verdict"] == "solution_found"]
    return EXIT_SOLUTION if solved else EXIT_OK


def cmd_verify_pair(args) -> int:
    if args.x < 1 or args.y < 1:
        raise _UsageError("verify-pair requires positive integers")
    check = verify_pair(args.x, args.y, _config_from(args))
    if args.json:
        print(canonical_json(check.to_dict()))
    else:
        print(f"{check.x}: {check.x_status}")
        print(f"{check.y}: {check.y_status}")
        print(f"distance: {check.distance}")
        print("both perfect" if check.both_perfect else "not both perfect")
    return EXIT_OK if check.both_perfect else EXIT_UNDECIDED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="perfdist",
                     description="Decide whether an odd delta can be the distance "
                                 "between two perfect numbers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_decide = sub.add_parser("decide", help="run the decision procedure for one delta")
    p_decide.add_argument("delta", help="positive odd integer")
    _add_config_flags(p_decide)
    p_decide.set_defaults(func=cmd_decide)

    p_rn = sub.add_parser("rn", help="raw equation tooling for d*x^2 + c = 2^n")
    rn_sub = p_rn.add_subparsers(dest="rn_command", required=True)

    p_solve = rn_sub.add_parser("solve", help="list all solutions with n <= n-max")
    p_solve.add_argument("d", type=int)
    p_solve.add_argument("c", type=int)
    _add_config_flags(p_solve)
    p_solve.set_defaults(func=cmd_rn_solve)

    p_sieve = rn_sub.add_parser("sieve", help="residue-class analysis at one modulus")
    p_sieve.add_argument("d", type=int)
    p_sieve.add_argument("c", type=int)
    p_sieve.add_argument("--modulus", type=int, required=True)
    p_sieve.add_argument("--n-min", type=int, default=0)
    p_sieve.add_argument("--n-parity", choices=("any", "odd"), default="any")
    _add_config_flags(p_sieve)
    p_sieve.set_defaults(func=cmd_rn_sieve)

    p_scan = sub.add_parser("scan", help="decide every delta = b(b-1)/2 = 3 mod 4 in a range")
    p_scan.add_argument("--b-from", type=int, required=True)
    p_scan.add_argument("--b-to", type=int, required=True)
    p_scan.add_argument("--out", default=_env("SCAN_OUT", "scan.jsonl"),
                        help="record file, one JSON object per delta (default scan.jsonl)")
    p_scan.add_argument("--jobs", type=int, default=int(_env("JOBS", 1)),
                        help="concurrent decisions (default 1)")
    _add_config_flags(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    p_pair = sub.add_parser("verify-pair", help="check perfectness of two integers")
    p_pair.add_argument("x", type=int)
    p_pair.add_argument("y", type=int)
    _add_config_flags(p_pair)
    p_pair.set_defaults(func=cmd_verify_pair)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, FactorBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
