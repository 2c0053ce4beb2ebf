"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed with
capture disabled) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import json
import os
import random
import shutil
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import lint_text  # noqa: E402
from iacsmell.cli import RunConfig, cmd_history, cmd_lint, cmd_taxonomy  # noqa: E402
from iacsmell.evalharness import default_manifest, evaluate_corpus  # noqa: E402
from iacsmell.taxonomy import TOP10_IDS, default_taxonomy  # noqa: E402
from oracle import generate_snippet, oracle_findings  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = default_manifest().parent

# (rule id, "#N" comment line, task start line, task end line)
FIG3_TASKS = [
    ("insecure-configuration-management", 8, 4, 8),
    ("insecure-dependency-management", 12, 10, 13),
    ("insecure-input-handling", 16, 15, 16),
    ("outdated-dependencies", 21, 18, 22),
    ("path-traversal", 26, 24, 27),
    ("command-injection", 30, 29, 30),
    ("code-injection", 36, 32, 36),
    ("outdated-software-version", 40, 38, 41),
    ("inadequate-naming-convention", 46, 43, 46),
    ("sensitive-information-exposure", 56, 48, 56),
]

TOP10_CWES = {
    "insecure-configuration-management": "CWE-306",
    "insecure-dependency-management": "CWE-1104",
    "insecure-input-handling": "CWE-20",
    "outdated-dependencies": "CWE-1104",
    "path-traversal": "CWE-22",
    "command-injection": "CWE-77",
    "code-injection": "CWE-94",
    "outdated-software-version": "CWE-1104",
    "inadequate-naming-convention": "CWE-710",
    "sensitive-information-exposure": "CWE-256",
}

ORACLE_SEED = 20240501
ORACLE_SNIPPETS = 200


def verdict(number: int, ok: bool, detail: str, capsys=None) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def _lint_json(paths, jobs: int) -> tuple[int, str]:
    out = io.StringIO()
    config = RunConfig(inputs=[str(p) for p in paths], format="json", jobs=jobs)
    code = cmd_lint(config, out=out, err=io.StringIO())
    return code, out.getvalue()


def check_1(capsys=None):
    start = time.perf_counter()
    code, raw = _lint_json([FIXTURES / "fig3_playbook.yml"], jobs=1)
    elapsed = time.perf_counter() - start
    findings = json.loads(raw)["findings"]
    by_rule = {}
    for f in findings:
        by_rule.setdefault(f["rule_id"], []).append(f["span"]["start_line"])
    located = all(
        len(by_rule.get(rule, [])) == 1 and task_start - 2 <= by_rule[rule][0] <= task_end + 2
        for rule, _comment, task_start, task_end in FIG3_TASKS
    )
    ok = len(findings) == 10 and set(by_rule) == set(TOP10_IDS) and located and elapsed < 1.0 and code == 1
    verdict(1, ok, f"{len(findings)} findings, rule set {'==' if set(by_rule) == set(TOP10_IDS) else '!='} "
                   f"Top-10, located={located}, {elapsed:.3f}s", capsys)


def check_2(capsys=None):
    text = (FIXTURES / "fig1_playbook.yml").read_text()
    lines = text.splitlines()
    icm = [f for f in lint_text(text, "ansible", "fig1.yml") if f.rule_id == "insecure-configuration-management"]
    anchored = [f for f in icm if "NOPASSWD:ALL" in lines[f.line - 1]]
    verdict(2, bool(anchored), f"{len(icm)} insecure-configuration-management finding(s), "
                               f"{len(anchored)} on the NOPASSWD:ALL line", capsys)


def check_3(capsys=None):
    text = (FIXTURES / "fig2_no_log.yml").read_text()
    findings = lint_text(text, "ansible", "fig2.yml")
    verdict(3, findings == [], f"{len(findings)} findings on a no_log-only file", capsys)


def check_4(capsys=None):
    start = time.perf_counter()
    report = evaluate_corpus()
    elapsed = time.perf_counter() - start
    packs = {t: report.pack(t) for t in ("ansible", "puppet", "saltstack")}
    precise = all(p.precision == 1.0 for p in packs.values())
    recall_ok = all(p.recall is not None and p.recall >= 0.9 for p in packs.values())
    overall = report.overall()
    recall_ok = recall_ok and overall.recall >= 0.9
    detail = ", ".join(f"{t} P={p.precision:.2f} R={p.recall:.2f}" for t, p in packs.items())
    verdict(4, precise and recall_ok and elapsed < 5.0,
            f"{len(report.entries)} entries; {detail}; overall R={overall.recall:.2f}; {elapsed:.2f}s", capsys)


def check_5(capsys=None):
    rng = random.Random(ORACLE_SEED)
    mismatches = 0
    fired = set()
    for _ in range(ORACLE_SNIPPETS):
        text = generate_snippet(rng)
        engine = {(f.rule_id, f.span.start_line, f.span.start_col) for f in lint_text(text)}
        fired |= {r for r, _, _ in engine}
        if engine != oracle_findings(text):
            mismatches += 1
    verdict(5, mismatches == 0 and fired == set(TOP10_IDS),
            f"{ORACLE_SNIPPETS} generated snippets, {mismatches} mismatches, "
            f"{len(fired)}/10 rules exercised", capsys)


def check_6(capsys=None):
    out = io.StringIO()
    code = cmd_taxonomy(RunConfig(), out=out, err=io.StringIO())
    rows = out.getvalue().splitlines()[:-1]
    bound = [r.split()[1] for r in rows if r.startswith("rule")]
    tax = default_taxonomy()
    cwes_ok = all(tax.get(cid).cwes == (cwe,) and tax.get(cid).rule_bound for cid, cwe in TOP10_CWES.items())
    ok = code == 0 and len(rows) == 62 and len(tax) == 62 and sorted(bound) == sorted(TOP10_IDS) and cwes_ok
    verdict(6, ok, f"{len(rows)} categories listed, {len(bound)} rule-bound, CWE table match={cwes_ok}", capsys)


def _history(name: str) -> list[dict]:
    out = io.StringIO()
    code = cmd_history(RunConfig(format="json"), str(FIXTURES / "history" / name), [], out=out, err=io.StringIO())
    assert code == 0
    return [json.loads(line) for line in out.getvalue().splitlines() if "fingerprint" in line]


def check_7(capsys=None):
    life = _history("lifespan")
    rename = _history("rename")
    rec = life[0] if len(life) == 1 else {}
    life_ok = (rec.get("first_index"), rec.get("fixed_index"), rec.get("lifespan_commits"), rec.get("status")) \
        == (3, 7, 4, "fixed")
    rename_ok = len(rename) == 2 and rename[0]["fingerprint"] != rename[1]["fingerprint"]
    verdict(7, life_ok and rename_ok,
            f"lifespan fixture first={rec.get('first_index')} fixed_at={rec.get('fixed_index')} "
            f"lifespan={rec.get('lifespan_commits')} status={rec.get('status')}; "
            f"rename fixture {len(rename)} records", capsys)


def check_8(capsys=None):
    inputs = [FIXTURES, CORPUS]
    code1, one = _lint_json(inputs, jobs=1)
    code8, eight = _lint_json(inputs, jobs=8)
    files = json.loads(one)["summary"]["files"]
    verdict(8, one == eight and code1 == code8, f"{files} files, --jobs 1 vs --jobs 8 identical={one == eight}",
            capsys)


def _make_small_files(root: Path, count: int) -> list[Path]:
    sources = sorted(p for p in CORPUS.rglob("*") if p.is_file() and p.name != "manifest.jsonl")
    sources += sorted(FIXTURES.glob("*.yml"))
    made = []
    for i in range(count):
        src = sources[i % len(sources)]
        target = root / f"d{i % 20:02d}" / f"{i:04d}_{src.name}"
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(src, target)
        made.append(target)
    return made


def check_9(tmp: Path, capsys=None):
    files = _make_small_files(tmp, 1000)
    small = all(f.stat().st_size <= 2048 for f in files)
    start = time.perf_counter()
    out = io.StringIO()
    config = RunConfig(inputs=[str(tmp)], format="json", jobs=os.cpu_count() or 1)
    cmd_lint(config, out=out, err=io.StringIO())
    elapsed = time.perf_counter() - start
    n = json.loads(out.getvalue())["summary"]["files"]
    verdict(9, small and n == 1000 and elapsed < 5.0,
            f"{n} files (all <= 2 KB: {small}) linted in {elapsed:.2f}s with {config.jobs} worker(s)", capsys)


def test_criterion_1_golden_top10(capsys):
    check_1(capsys)


def test_criterion_2_passwordless_sudo(capsys):
    check_2(capsys)


def test_criterion_3_out_of_scope_negative(capsys):
    check_3(capsys)


def test_criterion_4_corpus_precision(capsys):
    check_4(capsys)


def test_criterion_5_oracle_equivalence(capsys):
    check_5(capsys)


def test_criterion_6_taxonomy_integrity(capsys):
    check_6(capsys)


def test_criterion_7_persistence_lifespan(capsys):
    check_7(capsys)


def test_criterion_8_determinism(capsys):
    check_8(capsys)


def test_criterion_9_throughput(tmp_path, capsys):
    check_9(tmp_path, capsys)


if __name__ == "__main__":
    import tempfile

    failed = 0
    for check in (check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8):
        try:
            check()
        except AssertionError:
            failed += 1
    with tempfile.TemporaryDirectory() as tmp:
        try:
            check_9(Path(tmp))
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
