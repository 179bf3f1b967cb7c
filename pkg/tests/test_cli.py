"""CLI surface: subcommands, formats, exit codes, determinism."""

import json

from click.testing import CliRunner

from fibtotient.cli import bundled_table_path, main

runner = CliRunner()


def invoke(*args):
    return runner.invoke(main, list(args))


def test_pisano():
    r = invoke("pisano", "53")
    assert r.exit_code == 0 and r.output == "108\n"
    r = invoke("--format", "csv", "pisano", "53")
    assert r.output == "q,pi_q,z_q\n53,108,27\n"


def test_rank():
    assert invoke("rank", "3167").output == "96\n"
    assert invoke("rank", "107").output == "36\n"
    # brute fallback for p dividing the discriminant
    assert invoke("rank", "5").output == "5\n"
    r = invoke("rank", "11", "--P", "2", "--Q", "-1")
    assert r.output == "12\n"  # Pell alpha(11)


def test_witness_json():
    r = invoke("--format", "json", "witness", "1583")
    payload = json.loads(r.output)
    assert payload["witness"] is True
    assert payload["ratio"] == 33
    assert payload["audits"]["congruence_mod15"] == "pass"
    assert r.exit_code == 0


def test_witness_pretty_no_witness():
    r = invoke("witness", "11")
    assert r.exit_code == 0
    assert "witness = False" in r.output


def test_sq():
    r = invoke("sq", "53")
    assert "{0, 36, 72} mod 108" in r.output
    r = invoke("sq", "7")
    assert "empty" in r.output


def test_table1_csv_shape():
    r = invoke("--format", "csv", "table1")
    lines = r.output.strip().split("\n")
    assert lines[0] == "q,p,pi_q,z_p,ratio,leg5_p"
    assert len(lines) == 34
    assert lines[1] == "3,7,8,8,1,-1"
    assert lines[-1] == "4943,9887,9888,9888,1,-1"
    assert r.exit_code == 0


def test_census_csv_deterministic():
    a = invoke("--format", "csv", "census", "600")
    b = invoke("--format", "csv", "census", "600")
    assert a.output == b.output and a.exit_code == 0


def test_census_workers_match():
    a = invoke("--format", "csv", "census", "600")
    b = invoke("--format", "csv", "--workers", "2", "census", "600")
    assert a.output == b.output


def test_census_json_fields():
    r = invoke("--format", "json", "census", "100")
    payload = json.loads(r.output)
    assert payload["sophie_germain_count"] == 9
    assert [row["q"] for row in payload["rows"]] == [3, 5, 23, 53, 83]


def test_empirical():
    r = invoke("--format", "json", "empirical", "3")
    payload = json.loads(r.output)
    assert payload["0"]["verdict"] == "yes"
    assert payload["4"]["verdict"] == "no"


def test_converse_cli():
    r = invoke("--format", "json", "converse", "50")
    payload = json.loads(r.output)
    assert payload["exceptions"] == []
    assert payload["classes_total"] > 0
    assert r.exit_code == 0


def test_unique_scan_cli():
    r = invoke("--format", "csv", "unique-scan", "4", "12")
    lines = r.output.strip().split("\n")
    assert lines[0] == "k,verdict,blocking,candidates"
    assert all("no-candidate-deterministic" in ln for ln in lines[1:])
    assert r.exit_code == 0


def test_exception_scan_cli():
    r = invoke("--format", "csv", "exception-scan", "100", "1000")
    assert r.output == "k,q,p\n8,5,41\n"
    assert r.exit_code == 0


def test_classes_cli():
    for args, mod, residues in [
        (("--P", "1", "--Q", "-1"), 15, [8]),
        (("--P", "2", "--Q", "-1"), 24, [5]),
        (("--P", "3", "--Q", "-1"), 39, [2, 5, 20]),
    ]:
        r = invoke("--format", "json", "classes", *args)
        payload = json.loads(r.output)
        assert payload["modulus"] == mod and payload["residues"] == residues
        assert payload["agrees_with_4d_enumeration"] is True
        assert r.exit_code == 0


def test_lucas_scan_cli():
    r = invoke("--format", "json", "lucas-scan", "--P", "2", "--Q", "-1", "3000")
    payload = json.loads(r.output)
    assert payload["hit_count"] == 15
    assert payload["sophie_germain_total"] == 82
    assert all(h["q_mod_m"] == 5 for h in payload["hits"])
    assert r.exit_code == 0


def test_same_d_cli():
    r = invoke("--format", "json", "same-d", "--a", "1,-1", "--b", "3,1", "3000")
    payload = json.loads(r.output)
    assert payload["equal"] is True
    assert r.exit_code == 0


def test_exit_code_usage_errors():
    assert invoke("no-such-command").exit_code == 2
    assert invoke("classes", "--P", "2", "--Q", "1").exit_code == 2  # D = 0
    assert invoke("same-d", "--a", "1,-1", "--b", "2,-1", "100").exit_code == 2


def test_exit_code_capacity():
    assert invoke("census", "300000").exit_code == 3
    assert invoke("--brute-cap", "3", "rank", "5").exit_code == 3


def test_table_flag_and_env(tmp_path, monkeypatch):
    custom = tmp_path / "tiny.txt"
    custom.write_text("12: 2 2 2 2 3 3\n")
    r = invoke("--table", str(custom), "--format", "json", "empirical", "3")
    assert r.exit_code == 0
    monkeypatch.setenv("FIBTOTIENT_FACTOR_TABLE", str(custom))
    r = invoke("--format", "json", "empirical", "3")
    assert r.exit_code == 0
    monkeypatch.setenv("FIBTOTIENT_FACTOR_TABLE", str(tmp_path / "missing.txt"))
    r = invoke("--format", "json", "empirical", "3")
    assert r.exit_code != 0


def test_no_table_flag():
    r = invoke("--no-table", "--format", "json", "empirical", "3")
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert payload["0"]["verdict"] == "yes"


def test_bundled_table_exists():
    import os

    assert os.path.exists(bundled_table_path())
