import json
import subprocess
import sys

from perfdist.cli import main
from perfdist.decider import canonical_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_decide_exit_codes(capsys):
    code, out, _ = run_cli(capsys, "decide", "15")
    assert code == 0 and "verdict: eliminated" in out

    code, out, _ = run_cli(capsys, "decide", "11")
    assert code == 0

    code, _, err = run_cli(capsys, "decide", "10")
    assert code == 1 and "odd" in err

    code, _, err = run_cli(capsys, "decide", "x")
    assert code == 1

    code, out, _ = run_cli(capsys, "decide", "9")
    assert code == 2 and "out_of_scope" in out

    code, out, _ = run_cli(capsys, "decide", "55")
    assert code == 2 and "inconclusive" in out


def test_decide_json_roundtrip(capsys):
    code, out, _ = run_cli(capsys, "decide", "15", "--json")
    assert code == 0
    parsed = json.loads(out)
    assert parsed["delta"] == 15 and parsed["verdict"] == "eliminated"
    assert {"delta", "verdict", "case_analysis", "delta_plus_6", "branches",
            "candidates", "certificates", "config", "config_fingerprint"} <= set(parsed)
    assert canonical_json(parsed) == out.strip()


def test_rn_solve(capsys):
    code, out, _ = run_cli(capsys, "rn", "solve", "5", "3", "--n-max", "200")
    assert code == 0
    assert out.splitlines()[1:] == ["x=1 n=3", "x=5 n=7"]

    code, out, _ = run_cli(capsys, "rn", "solve", "5", "3", "--n-max", "200", "--json")
    assert json.loads(out)["solutions"] == [[1, 3], [5, 7]]

    code, out, _ = run_cli(capsys, "rn", "solve", "2", "6", "--n-max", "100", "--json")
    assert json.loads(out)["solutions"] == [[1, 3]]

    code, _, err = run_cli(capsys, "rn", "solve", "4", "6")
    assert code == 1 and "squarefree" in err

    code, _, err = run_cli(capsys, "rn", "solve", "5", "0")
    assert code == 1


def test_rn_sieve(capsys):
    code, out, _ = run_cli(capsys, "rn", "sieve", "1", "6", "--modulus", "3",
                           "--n-parity", "odd")
    assert code == 0 and "no surviving classes" in out

    code, out, _ = run_cli(capsys, "rn", "sieve", "1", "6", "--modulus", "3", "--json")
    rec = json.loads(out)
    assert rec["surviving_classes"] == [0] and rec["period"] == 2

    code, out, _ = run_cli(capsys, "rn", "sieve", "11", "6", "--modulus", "4",
                           "--n-min", "2", "--json")
    assert json.loads(out)["surviving_classes"] == []


def test_verify_pair(capsys):
    code, out, _ = run_cli(capsys, "verify-pair", "28", "6")
    assert code == 0 and "both perfect" in out and "distance: 22" in out

    code, out, _ = run_cli(capsys, "verify-pair", "28", "27")
    assert code == 2 and "not both perfect" in out

    code, out, _ = run_cli(capsys, "verify-pair", "8128", "28", "--json")
    rec = json.loads(out)
    assert code == 0 and rec["both_perfect"] and rec["distance"] == 8100

    code, _, err = run_cli(capsys, "verify-pair", "0", "6")
    assert code == 1


def test_scan_basic(tmp_path, capsys):
    out_file = tmp_path / "scan.jsonl"
    code, _, err = run_cli(capsys, "scan", "--b-from", "3", "--b-to", "6",
                           "--out", str(out_file))
    assert code == 0
    records = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert [(r["b"], r["delta"], r["verdict"]) for r in records] == [
        (3, 3, "eliminated"), (6, 15, "eliminated"),
    ]
    for rec in records:
        assert {"b", "delta", "verdict", "branches", "elapsed_ms",
                "config_fingerprint"} <= set(rec)


def test_scan_resume_is_idempotent(tmp_path, capsys):
    out_file = tmp_path / "scan.jsonl"
    run_cli(capsys, "scan", "--b-from", "3", "--b-to", "11", "--out", str(out_file))
    first = out_file.read_bytes()
    run_cli(capsys, "scan", "--b-from", "3", "--b-to", "11", "--out", str(out_file))
    assert out_file.read_bytes() == first

    # config change refreshes the affected records without duplication
    code, _, _ = run_cli(capsys, "scan", "--b-from", "3", "--b-to", "11",
                         "--out", str(out_file), "--n-max", "500")
    records = [json.loads(line) for line in out_file.read_text().splitlines()]
    deltas = [r["delta"] for r in records]
    assert deltas == sorted(set(deltas)) == [3, 15, 55]


def test_scan_extends_previous_range_in_order(tmp_path, capsys):
    out_file = tmp_path / "scan.jsonl"
    run_cli(capsys, "scan", "--b-from", "6", "--b-to", "6", "--out", str(out_file))
    run_cli(capsys, "scan", "--b-from", "3", "--b-to", "3", "--out", str(out_file))
    records = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert [r["delta"] for r in records] == [3, 15]


def test_scan_parallel_worker_pool(tmp_path, capsys):
    serial = tmp_path / "serial.jsonl"
    parallel = tmp_path / "parallel.jsonl"
    assert run_cli(capsys, "scan", "--b-from", "3", "--b-to", "14",
                   "--out", str(serial))[0] == 0
    assert run_cli(capsys, "scan", "--b-from", "3", "--b-to", "14",
                   "--out", str(parallel), "--jobs", "3")[0] == 0

    def content(path):
        records = [json.loads(line) for line in path.read_text().splitlines()]
        for rec in records:
            rec.pop("elapsed_ms")
        return records

    assert [r["delta"] for r in content(serial)] == [3, 15, 55, 91]
    assert content(serial) == content(parallel)
    # each line is already in canonical form
    for line in parallel.read_text().splitlines():
        assert canonical_json(json.loads(line)) == line


def test_scan_bad_arguments(tmp_path, capsys):
    code, _, err = run_cli(capsys, "scan", "--b-from", "6", "--b-to", "3",
                           "--out", str(tmp_path / "x.jsonl"))
    assert code == 1

    code, _, err = run_cli(capsys, "scan", "--b-from", "3", "--b-to", "4",
                           "--out", str(tmp_path / "missing" / "x.jsonl"))
    assert code == 1 and "cannot write" in err


def test_env_mirrors_flags(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PERFDIST_N_MAX", "150")
    code, out, _ = run_cli(capsys, "rn", "solve", "5", "3", "--json")
    assert json.loads(out)["n_max"] == 150


def test_custom_table_flag(tmp_path, capsys):
    table = tmp_path / "table.jsonl"
    table.write_text('{"d": 3, "c": 5, "solutions": [[1, 3], [3, 5]], "source": "fixture"}\n')
    code, out, _ = run_cli(capsys, "decide", "15", "--table", str(table), "--json")
    assert code == 0
    default_fp = json.loads(run_cli(capsys, "decide", "15", "--json")[1])["config_fingerprint"]
    assert json.loads(out)["config_fingerprint"] != default_fp


def test_module_execution_entry():
    proc = subprocess.run([sys.executable, "-m", "perfdist", "decide", "15"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verdict: eliminated" in proc.stdout


def test_moduli_flag_accepts_comma_list(capsys):
    code, out, _ = run_cli(capsys, "decide", "15", "--moduli", "3,4,8", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "eliminated"

    code, _, err = run_cli(capsys, "decide", "15", "--moduli", "3,oops")
    assert code == 1
