import json

import pytest

from templated_assembly import parse_plan, verify_plan
from templated_assembly.cli import EXIT_INPUT, EXIT_INVALID, EXIT_OK, EXIT_UNPROVED, main, read_fasta
from templated_assembly.reference_cases import SCAFFOLD, SCAFFOLD_TEMPLATED, SITES_EXTENDED


def test_asi_string(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["asi", "abab", "--json", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())[0]
    assert report["asi"] == 2 and report["asi_proved"]
    assert verify_plan(parse_plan(report["certificates"]["asi"])).cost == 2
    assert "abab" in capsys.readouterr().out


def test_asi_empty_is_input_error():
    assert main(["asi", ""]) == EXIT_INPUT


def test_asi_text_file(tmp_path):
    f = tmp_path / "targets.txt"
    f.write_text("abab\n# comment\naaaa\n\nabcd\n")
    out = tmp_path / "r.json"
    assert main(["asi", str(f), "--json", str(out)]) == EXIT_OK
    assert [r["asi"] for r in json.loads(out.read_text())] == [2, 2, 3]


def test_fasta_records(tmp_path):
    f = tmp_path / "t.fa"
    f.write_text(">one\naba\nb\n>two\naaaa\n")
    assert read_fasta(f.read_text()) == [("one", "abab"), ("two", "aaaa")]
    out = tmp_path / "r.json"
    assert main(["asi", "--fasta", str(f), "--json", str(out)]) == EXIT_OK
    assert [r["input"] for r in json.loads(out.read_text())] == ["one", "two"]


def test_fasta_rejects_wildcard(tmp_path):
    f = tmp_path / "bad.fa"
    f.write_text(">x\nab*b\n")
    assert main(["asi", "--fasta", str(f)]) == EXIT_INPUT


def test_tai_ab():
    assert main(["tai", "ab"]) == EXIT_OK


def test_tai_with_asi_gap(tmp_path):
    out = tmp_path / "r.json"
    assert main(["tai", "--with-asi", "cccabbb", "--json", str(out)]) == EXIT_OK
    r = json.loads(out.read_text())[0]
    assert (r["asi"], r["tai_upper"], r["gap"]) == (6, 5, 1)
    assert list(r)[:8] == ["input", "mode", "asi", "asi_proved", "tai_upper", "tai_proved", "gap", "certificates"]


def test_tai_heuristic_only(tmp_path):
    out = tmp_path / "r.json"
    plan = tmp_path / "plan.txt"
    assert main(["tai", "--heuristic-only", SITES_EXTENDED, "--json", str(out), "--emit-plan", str(plan)]) == EXIT_OK
    r = json.loads(out.read_text())[0]
    assert r["tai_upper"] == 13 and not r["tai_proved"]
    assert verify_plan(parse_plan(plan.read_text())).cost == 13


def test_require_proved(capsys):
    assert main(["tai", "--heuristic-only", "--require-proved", "abab"]) == EXIT_UNPROVED
    assert main(["asi", "--max-exact-length", "3", "--require-proved", "abab"]) == EXIT_UNPROVED
    assert "warning" in capsys.readouterr().err


def test_environment_and_flag_precedence(monkeypatch):
    monkeypatch.setenv("TASSEMBLY_MAX_EXACT_LENGTH", "3")
    monkeypatch.setenv("TASSEMBLY_REQUIRE_PROVED", "1")
    assert main(["asi", "abab"]) == EXIT_UNPROVED
    assert main(["asi", "abab", "--max-exact-length", "10"]) == EXIT_OK
    monkeypatch.setenv("TASSEMBLY_NODE_BUDGET", "lots")
    assert main(["asi", "abab"]) == EXIT_INPUT


def test_verify_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text(SCAFFOLD_TEMPLATED)
    assert main(["verify", str(good)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["cost"] == 11

    bad = tmp_path / "bad.txt"
    bad.write_text(SCAFFOLD_TEMPLATED.replace("c 14 12", "c 14 11"))
    assert main(["verify", str(bad)]) == EXIT_INVALID

    junk = tmp_path / "junk.txt"
    junk.write_text("hello world\n")
    assert main(["verify", str(junk)]) == EXIT_INPUT
    assert main(["verify", str(tmp_path / "missing.txt")]) == EXIT_INPUT


def test_verify_trace(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text(SCAFFOLD_TEMPLATED)
    assert main(["verify", "--trace", str(good)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["trace"][-1] == SCAFFOLD


def test_gain(capsys):
    assert main(["gain", "-T", "11*11*11", "-u", "22", "-u", "00", SCAFFOLD]) == EXIT_OK
    assert main(["gain", "-T", "1*11", "-u", "0", "-u", "2", SITES_EXTENDED]) == EXIT_OK
    assert capsys.readouterr().out.split() == ["7", "9"]
    assert main(["gain", "-T", "1*11", "-u", "9", SITES_EXTENDED]) == EXIT_INPUT


def test_mine(tmp_path):
    out = tmp_path / "m.json"
    assert main(["mine", "abcd", "--json", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())[0]["candidates"] == []
    assert main(["mine", SCAFFOLD, "--limit", "1", "--json", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text())[0]["candidates"]
    assert rows[0]["skeleton"] == "11*11*11"


def test_bench_quick_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["bench", "--quick", "--seed", "7", "--samples", "20", "--json", str(a)]) == EXIT_OK
    assert main(["bench", "--quick", "--seed", "7", "--samples", "20", "--json", str(b)]) == EXIT_OK
    strip = lambda p: [{k: v for k, v in r.items() if k != "elapsed_ms"} for r in json.loads(p.read_text())]
    assert strip(a) == strip(b)
    assert [r["criterion"] for r in strip(a)] == ["oracle"]


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["tai", "--with-asi", "abcabcab", "--json", str(a)])
    main(["tai", "--with-asi", "abcabcab", "--json", str(b)])
    drop = lambda p: [{k: v for k, v in r.items() if k != "elapsed_ms"} for r in json.loads(p.read_text())]
    assert drop(a) == drop(b)


def test_bad_usage():
    assert main(["nonsense"]) == EXIT_INPUT
    assert main(["asi"]) == EXIT_INPUT


@pytest.mark.parametrize("argv", [["--help"], ["asi", "--help"]])
def test_help(argv):
    assert main(argv) == EXIT_OK
