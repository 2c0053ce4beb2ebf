from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iacsmell.evalharness import (
    UNDEFINED,
    Cell,
    CorpusError,
    EvalReport,
    emit_report,
    evaluate_corpus,
    load_manifest,
    max_matching,
)

SMELLY = '- name: Update\n  command: "apt-get {{ action }}"\n'
CLEAN = '- name: Update\n  command: "apt-get {{ action | quote }}"\n'


def write_corpus(tmp_path, entries):
    lines = []
    for i, (text, expected) in enumerate(entries):
        name = f"e{i}.yml"
        (tmp_path / name).write_text(text)
        lines.append(json.dumps({"id": f"e{i}", "tool": "ansible", "snippet": name,
                                 "expected": [{"rule_id": r, "line": n} for r, n in expected]}))
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def test_bundled_corpus_is_exact():
    report = evaluate_corpus()
    for tool in ("ansible", "puppet", "saltstack", "terraform"):
        pack = report.pack(tool)
        assert pack.precision == 1.0 and pack.recall == 1.0
    ansible = [e for e in report.entries if e.tool == "ansible"]
    assert len(ansible) == 20 and sum(e.tp for e in ansible) == 10


def test_clean_snippet_wrongly_expected(tmp_path):
    manifest = write_corpus(tmp_path, [(SMELLY, [("command-injection", 2)]),
                                       (CLEAN, [("command-injection", 2)])])
    cell = evaluate_corpus(manifest).cell("ansible", "command-injection")
    assert (cell.tp, cell.fp, cell.fn) == (1, 0, 1)
    assert cell.recall == 0.5


def test_line_tolerance(tmp_path):
    manifest = write_corpus(tmp_path, [(SMELLY, [("command-injection", 4)]),
                                       (SMELLY, [("command-injection", 5)]),
                                       (SMELLY, [("command-injection", None)])])
    cell = evaluate_corpus(manifest).cell("ansible", "command-injection")
    assert (cell.tp, cell.fp, cell.fn) == (2, 1, 1)


def test_missing_snippet_names_entry(tmp_path):
    (tmp_path / "manifest.jsonl").write_text(json.dumps(
        {"id": "ghost", "tool": "ansible", "snippet": "nope.yml", "expected": []}) + "\n")
    with pytest.raises(CorpusError, match="ghost"):
        evaluate_corpus(tmp_path / "manifest.jsonl")


def test_unknown_rule_in_manifest(tmp_path):
    (tmp_path / "manifest.jsonl").write_text(json.dumps(
        {"id": "a", "tool": "ansible", "snippet": "a.yml", "expected": [{"rule_id": "bogus"}]}) + "\n")
    with pytest.raises(CorpusError, match="bogus"):
        load_manifest(tmp_path / "manifest.jsonl")


def _brute_matching(dets, exps, tol=2):
    """Best over every pairing of a detection order with an expectation order."""
    best = 0
    for order in itertools.permutations(dets):
        for perm in itertools.permutations(range(len(exps)), min(len(dets), len(exps))):
            count = sum(1 for d, j in zip(order, perm) if exps[j] is None or abs(d - exps[j]) <= tol)
            best = max(best, count)
    return best


@given(st.lists(st.integers(1, 12), max_size=4),
       st.lists(st.one_of(st.none(), st.integers(1, 12)), max_size=4))
def test_matching_is_maximum(dets, exps):
    assert max_matching(dets, exps) == _brute_matching(dets, exps)


def test_duplicate_detections_counted_once(tmp_path):
    twice = '- name: Update\n  command: "apt-get {{ action }} {{ action }}"\n'
    entries = [(SMELLY, [("command-injection", 2)]), (twice, [("command-injection", 2)]),
               (CLEAN, []), (CLEAN, []), (SMELLY, [("command-injection", 2)])]
    cell = evaluate_corpus(write_corpus(tmp_path, entries)).cell("ansible", "command-injection")
    assert (cell.tp, cell.fp, cell.fn) == (3, 0, 0)


def test_empty_report_is_header_only():
    lines = emit_report(EvalReport()).splitlines()
    assert lines[0] == "Precision"
    assert lines[1].split() == ["Rule", "Occurrences"]
    assert len(lines) == 3


def test_undefined_cell_rendered_as_marker():
    report = EvalReport({("ansible", "command-injection"): Cell(0, 0, 1)}, {"command-injection": 1})
    row = next(line for line in emit_report(report).splitlines() if line.startswith("command-injection"))
    assert row.split()[1] == UNDEFINED


def test_json_round_trip():
    report = evaluate_corpus()
    again = EvalReport.from_dict(json.loads(emit_report(report, "json")))
    assert again == report


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_rates_in_unit_interval(tp, fp, fn):
    cell = Cell(tp, fp, fn)
    for value in (cell.precision, cell.recall):
        assert value is None or 0.0 <= value <= 1.0
