from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from iacsmell.cli import RunConfig, Style, cmd_history, cmd_lint, main
from iacsmell.rules import UnknownRuleError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_lint_fig3_text(fixtures, capsys):
    code, out, _ = run(["lint", "--jobs", "1", str(fixtures / "fig3_playbook.yml")], capsys)
    assert code == 1
    lines = out.splitlines()
    assert len(lines) == 10
    assert lines[0].endswith("dangerous setting 'PermitRootLogin yes' in a configuration target")
    assert ":8:16 [insecure-configuration-management/CWE-306]" in lines[0]


def test_lint_fixed_is_silent(fixtures, capsys):
    assert run(["lint", str(fixtures / "fig3_fixed.yml")], capsys) == (0, "", "")


@pytest.mark.parametrize("argv", [
    ["lint", "does/not/exist.yml"],
    ["lint", "--rules", "bogus", "tests/fixtures/fig3_playbook.yml"],
    ["lint", "--jobs", "0", "tests/fixtures/fig3_playbook.yml"],
    ["evaluate", "missing-manifest.jsonl"],
    ["history", "does/not/exist"],
    ["taxonomy", "--rule", "bogus"],
])
def test_error_exit_codes(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


def test_lint_zero_files(tmp_path, capsys):
    (tmp_path / "README.md").write_text("hi\n")
    code, _, err = run(["lint", str(tmp_path)], capsys)
    assert code == 2 and "no IaC files" in err


def test_unreadable_file_is_diagnostic(tmp_path, fixtures, capsys):
    (tmp_path / "data.yml").write_text("a: 1\n")
    code, out, err = run(["lint", str(tmp_path / "data.yml"), str(fixtures / "fig3_fixed.yml")], capsys)
    assert code == 0 and "--tool" in err


def test_fail_on_threshold(fixtures, capsys):
    path = str(fixtures / "fig3_playbook.yml")
    assert run(["lint", "--fail-on", "high", "--rules", "inadequate-naming-convention", path], capsys)[0] == 0
    assert run(["lint", "--fail-on", "low", "--rules", "inadequate-naming-convention", path], capsys)[0] == 1


def test_json_report_schema(fixtures, capsys):
    code, out, _ = run(["lint", "--format", "json", str(fixtures / "fig3_playbook.yml")], capsys)
    report = json.loads(out)
    assert report["schema_version"] == 1
    assert report["summary"]["findings"] == 10
    assert {"rule_id", "cwe", "span", "snippet", "fingerprint"} <= set(report["findings"][0])


def test_jobs_do_not_change_output(fixtures, capsys):
    base = ["lint", "--format", "json", str(fixtures), "src/iacsmell/data/corpus"]
    one = run(base + ["--jobs", "1"], capsys)[1]
    many = run(base + ["--jobs", "4"], capsys)[1]
    assert one == many


def test_tool_override(tmp_path, capsys):
    path = tmp_path / "data.yml"
    path.write_text('- command: "apt-get {{ action }}"\n')
    code, out, _ = run(["lint", "--tool", "ansible", str(path)], capsys)
    assert code == 1 and "command-injection" in out


def test_custom_lexicon(tmp_path, fixtures, capsys):
    lex = tmp_path / "lex.txt"
    lex.write_text("[vague_names]\n!replace\nzzz\n")
    code, out, _ = run(["lint", "--lexicons", str(lex), "--rules", "inadequate-naming-convention",
                        str(fixtures / "fig3_playbook.yml")], capsys)
    assert code == 0 and out == ""
    bad = tmp_path / "bad.txt"
    bad.write_text("[nope]\n")
    assert run(["lint", "--lexicons", str(bad), str(fixtures / "fig3_playbook.yml")], capsys)[0] == 2


def test_custom_advisories(tmp_path, fixtures, capsys):
    db = tmp_path / "adv.txt"
    db.write_text("apt|openssl|9.0|false|false|CVE-0000-0001|CWE-1\n")
    code, out, _ = run(["lint", "--advisories", str(db), "--rules", "outdated-dependencies",
                        str(fixtures / "fig3_playbook.yml")], capsys)
    assert code == 1 and "CVE-0000-0001" in out


def test_evaluate(capsys):
    code, out, _ = run(["evaluate"], capsys)
    assert code == 0 and out.startswith("Precision")
    assert run(["evaluate", "--threshold", "1.01"], capsys)[0] == 1


def test_history_fixture(fixtures, capsys):
    code, out, _ = run(["history", "--format", "json", str(fixtures / "history" / "lifespan")], capsys)
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines()]
    rec = lines[0]
    assert (rec["first_index"], rec["fixed_index"], rec["lifespan_commits"], rec["status"]) == (3, 7, 4, "fixed")
    assert lines[-1] == {"commits_to_fix": {"fixed": {"command-injection": [4]}, "persistent": {}}}


def test_history_parent_of_fixtures(fixtures, capsys):
    code, out, _ = run(["history", str(fixtures / "history")], capsys)
    assert code == 0 and out.count("[command-injection]") == 3


def test_history_clean(tmp_path):
    d = tmp_path / "clean"
    d.mkdir()
    (d / "001_a_10.snap").write_text("- debug:\n    msg: hi\n")
    out = io.StringIO()
    assert cmd_history(RunConfig(tool=None), str(d), [], out=out, err=io.StringIO()) == 0
    assert out.getvalue() == ""


def test_taxonomy(capsys):
    code, out, _ = run(["taxonomy"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 63
    assert sum(line.startswith("rule") for line in lines) == 10
    code, out, _ = run(["taxonomy", "--rule", "sensitive-information-exposure"], capsys)
    assert code == 0 and "CWE-256" in out


def test_figures(tmp_path, fixtures, capsys):
    assert main(["lint", "--figures", str(tmp_path), str(fixtures / "fig3_playbook.yml")]) == 1
    assert main(["evaluate", "--figures", str(tmp_path)]) == 0
    assert main(["history", "--figures", str(tmp_path), str(fixtures / "history" / "lifespan")]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["commits_to_fix.png", "evaluation.png", "findings_per_rule.png"]
    assert all((tmp_path / n).read_bytes()[:4] == b"\x89PNG" for n in names)


def test_no_color_env(monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True

    monkeypatch.delenv("IACSMELL_NO_COLOR", raising=False)
    assert Style(Tty()).enabled
    monkeypatch.setenv("IACSMELL_NO_COLOR", "1")
    assert not Style(Tty()).enabled


def test_run_config_validates_rules():
    with pytest.raises(UnknownRuleError):
        RunConfig(rules=frozenset({"nope"}))


def test_module_entry_point(fixtures):
    proc = subprocess.run([sys.executable, "-m", "iacsmell", "lint", str(fixtures / "fig3_fixed.yml")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""


def test_cmd_lint_direct(fixtures):
    out = io.StringIO()
    code = cmd_lint(RunConfig(inputs=[str(fixtures / "fig1_playbook.yml")]), out=out, err=io.StringIO())
    assert code == 1 and "NOPASSWD" in out.getvalue()
