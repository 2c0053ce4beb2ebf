"""Build snapshot series from fixture directories or a git repository.

Git adapter contract: for a path P, list the commits touching P oldest first
with ISO-8601 timestamps (``git log --reverse --format='%H %cI' -- P``), then
read the file content at each commit (``git show <sha>:P``).
"""

from __future__ import annotations

import fnmatch
import re
import subprocess
from datetime import datetime
from pathlib import Path

from .evolution import Snapshot, SnapshotSeries
from .frontends import decode

_FIXTURE = re.compile(r"^(\d+)_([^_]+)_(\d+)\.snap$")


class HistoryError(RuntimeError):
    pass


def is_fixture_dir(path: Path) -> bool:
    return path.is_dir() and any(_FIXTURE.match(p.name) for p in path.iterdir())


def read_fixture_dir(path: str | Path, file_path: str | None = None) -> SnapshotSeries:
    """Series from ``NNN_<commitid>_<epoch>.snap`` files, ordered by NNN."""
    path = Path(path)
    entries = []
    for p in path.iterdir():
        m = _FIXTURE.match(p.name)
        if m:
            entries.append((int(m.group(1)), m.group(2), int(m.group(3)), p))
    if not entries:
        raise HistoryError(f"no *.snap snapshots in {path}")
    entries.sort()
    snaps = [Snapshot(commit, epoch, decode(p.read_bytes())[0]) for _, commit, epoch, p in entries]
    name = file_path
    if name is None:
        marker = path / "PATH"
        name = marker.read_text(encoding="utf-8").strip() if marker.exists() else path.name
    return SnapshotSeries(str(path), name, snaps)


def _git(repo: Path, *args: str) -> str:
    try:
        proc = subprocess.run(["git", "-C", str(repo), *args], capture_output=True, check=True)
    except FileNotFoundError as exc:
        raise HistoryError("git executable not found") from exc
    except subprocess.CalledProcessError as exc:
        raise HistoryError(exc.stderr.decode("utf-8", "replace").strip() or f"git {args[0]} failed") from exc
    return proc.stdout.decode("utf-8", "replace")


def is_git_repo(path: Path) -> bool:
    return (path / ".git").exists()


def git_files(repo: str | Path, globs: list[str]) -> list[str]:
    """Paths ever touched in history that match any glob."""
    out = _git(Path(repo), "log", "--format=", "--name-only", "--all")
    names = sorted({line.strip() for line in out.splitlines() if line.strip()})
    if not globs:
        return names
    return [n for n in names if any(fnmatch.fnmatch(n, g) for g in globs)]


def git_series(repo: str | Path, file_path: str) -> SnapshotSeries:
    repo = Path(repo)
    log = _git(repo, "log", "--reverse", "--format=%H %cI", "--", file_path)
    snaps = []
    for line in log.splitlines():
        if not line.strip():
            continue
        sha, stamp = line.split(" ", 1)
        try:
            content = _git(repo, "show", f"{sha}:{file_path}")
        except HistoryError:
            continue  # file deleted in this commit
        epoch = int(datetime.fromisoformat(stamp.strip()).timestamp())
        if snaps and epoch < snaps[-1].timestamp:
            epoch = snaps[-1].timestamp  # committer clocks can go backwards
        snaps.append(Snapshot(sha[:12], epoch, content))
    if not snaps:
        raise HistoryError(f"no history for {file_path} in {repo}")
    return SnapshotSeries(str(repo), file_path, snaps)
