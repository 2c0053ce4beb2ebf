from __future__ import annotations

import subprocess

import pytest

from iacsmell.evolution import (
    FIXED,
    PERSISTENT,
    REINTRODUCED,
    Snapshot,
    SnapshotSeries,
    classify_security_fix,
    commits_to_fix,
    track,
)
from iacsmell.history import HistoryError, git_files, git_series, read_fixture_dir

SMELLY = '- name: Update\n  command: "apt-get {{ action }}"\n'
CLEAN = '- name: Update\n  command: "apt-get {{ action | quote }}"\n'
BROKEN = '- name: Update\n  command: "apt-get {{ action }}\n  bad: [\n'


def series(*contents, path="deploy.yml"):
    snaps = [Snapshot(f"c{i}", 1000 + 60 * i, text) for i, text in enumerate(contents, start=1)]
    return SnapshotSeries("repo", path, snaps)


@pytest.mark.parametrize("message,expected,keyword", [
    ("Fix security issue in sudoers template", True, "fix security"),
    ("CVE-2021-34527 mitigation", True, "cve"),
    ("Refactor variable names", False, None),
    ("Bump recvec helper", False, None),
])
def test_classify_security_fix(message, expected, keyword):
    result = classify_security_fix(message)
    assert result.is_security_fix is expected
    if keyword:
        assert keyword in [k.lower() for k in result.keywords]


def test_tool_terms_are_context_only():
    result = classify_security_fix("Update ansible playbook")
    assert not result and result.tool_terms == ("ansible", "playbook")


def test_lifespan_fixture(fixtures):
    result = track(read_fixture_dir(fixtures / "history" / "lifespan"))
    [rec] = result.records
    assert (rec.rule_id, rec.first_index, rec.last_index, rec.fixed_index) == ("command-injection", 3, 6, 7)
    assert rec.lifespan_commits == 4 and rec.status == FIXED
    assert rec.lifespan_seconds == 4 * 86400


def test_rename_breaks_chain(fixtures):
    records = track(read_fixture_dir(fixtures / "history" / "rename")).records
    assert [(r.first_index, r.last_index, r.status) for r in records] == [(1, 2, FIXED), (3, 4, PERSISTENT)]
    assert records[0].fingerprint != records[1].fingerprint


def test_identical_file_is_persistent():
    [rec] = track(series(SMELLY, SMELLY, SMELLY)).records
    assert rec.status == PERSISTENT and rec.lifespan_commits == 3 and rec.fixed_at is None


def test_single_snapshot_persistent():
    [rec] = track(series(SMELLY)).records
    assert rec.status == PERSISTENT and rec.lifespan_commits == 1


def test_reintroduced():
    records = track(series(SMELLY, CLEAN, SMELLY)).records
    assert [r.status for r in records] == [REINTRODUCED, PERSISTENT]
    assert records[0].fixed_at == "c2"


def test_unparseable_gap_is_bridged():
    result = track(series(SMELLY, BROKEN, SMELLY, CLEAN))
    [rec] = result.records
    assert (rec.first_index, rec.last_index, rec.fixed_index) == (1, 3, 4)
    assert any("could not be parsed" in d.message for d in result.diagnostics)


def test_clean_history_has_no_records():
    assert track(series(CLEAN, CLEAN)).records == []


def test_series_validation():
    with pytest.raises(ValueError, match="duplicate"):
        SnapshotSeries("r", "p", [Snapshot("a", 1, ""), Snapshot("a", 2, "")])
    with pytest.raises(ValueError, match="decrease"):
        SnapshotSeries("r", "p", [Snapshot("a", 2, ""), Snapshot("b", 1, "")])
    with pytest.raises(ValueError, match="empty"):
        track(SnapshotSeries("r", "deploy.yml", []))


def test_same_content_same_fingerprints():
    a = track(series(SMELLY + CLEAN)).records
    b = track(series(SMELLY + CLEAN)).records
    assert {r.fingerprint for r in a} == {r.fingerprint for r in b}


def test_commits_to_fix():
    records = track(series(SMELLY, SMELLY, CLEAN)).records + track(series(SMELLY)).records
    hist = commits_to_fix(records)
    assert hist.fixed == {"command-injection": [2]}
    assert hist.persistent == {"command-injection": [1]}
    assert not commits_to_fix([])


def _git(repo, *args):
    subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True,
                   env={"GIT_AUTHOR_NAME": "t", "GIT_AUTHOR_EMAIL": "t@example.com",
                        "GIT_COMMITTER_NAME": "t", "GIT_COMMITTER_EMAIL": "t@example.com",
                        "GIT_AUTHOR_DATE": "2024-01-01T00:00:00Z", "GIT_COMMITTER_DATE": "2024-01-01T00:00:00Z",
                        "PATH": "/usr/bin:/bin", "HOME": str(repo)})


def test_git_adapter(tmp_path):
    repo = tmp_path / "repo"
    repo.mkdir()
    _git(repo, "init", "-q")
    for i, text in enumerate([CLEAN, SMELLY, SMELLY, CLEAN]):
        (repo / "deploy.yml").write_text(text + f"# rev {i}\n")
        _git(repo, "add", "deploy.yml")
        _git(repo, "commit", "-q", "-m", f"rev {i}")
    assert git_files(repo, ["*.yml"]) == ["deploy.yml"]
    s = git_series(repo, "deploy.yml")
    assert len(s) == 4
    [rec] = track(s).records
    assert (rec.first_index, rec.fixed_index, rec.status) == (2, 4, FIXED)
    with pytest.raises(HistoryError):
        git_series(repo, "missing.yml")
