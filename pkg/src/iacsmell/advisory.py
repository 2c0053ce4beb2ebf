"""Offline advisory database for version, end-of-life and vulnerability queries."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path

ECOSYSTEMS = ("apt", "yum", "pip", "gem", "terraform", "box", "generic")

_SEGMENT = re.compile(r"(\d*)(.*)", re.S)
_EPOCH = re.compile(r"^\d+:")


class AdvisoryError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class VersionError(ValueError):
    pass


def version_key(version: str) -> tuple:
    """Sort key for a version string.

    Dot-separated segments compare numerically left to right. A segment with a
    non-numeric suffix sorts just below its bare number, so 1.0.1f < 1.0.1 < 1.0.2.
    Missing trailing segments count as zero.
    """
    text = version.strip()
    if text[:1] in ("v", "V"):
        text = text[1:]
    text = _EPOCH.sub("", text)
    if not text[:1].isdigit():
        raise VersionError(f"unparseable version {version!r}")
    key = []
    for segment in text.split("."):
        digits, suffix = _SEGMENT.match(segment).groups()
        key.append((int(digits) if digits else -1, 0 if suffix else 1, suffix))
    while len(key) > 1 and key[-1] == (0, 1, ""):
        key.pop()
    return tuple(key)


def _padded(a: tuple, b: tuple) -> tuple[tuple, tuple]:
    n = max(len(a), len(b))
    zero = (0, 1, "")
    return a + (zero,) * (n - len(a)), b + (zero,) * (n - len(b))


def compare_versions(a: str, b: str) -> int:
    """-1, 0 or 1. Raises VersionError if either side is unparseable."""
    ka, kb = _padded(version_key(a), version_key(b))
    return (ka > kb) - (ka < kb)


def is_parseable(version: str) -> bool:
    try:
        version_key(version)
    except VersionError:
        return False
    return True


@dataclass(frozen=True)
class AdvisoryRecord:
    ecosystem: str
    name: str
    safe_below: str | None = None
    eol: bool = False
    any_version: bool = False
    advisory_id: str | None = None
    cwe: str | None = None

    def __post_init__(self):
        if self.ecosystem not in ECOSYSTEMS:
            raise AdvisoryError(f"unknown ecosystem {self.ecosystem!r}")
        if not (self.safe_below or self.eol or self.any_version):
            raise AdvisoryError("record needs safe_below, eol or any_version")
        if self.safe_below is not None:
            version_key(self.safe_below)

    @property
    def is_vulnerability(self) -> bool:
        """A concrete vulnerability rather than a pure end-of-life listing."""
        return bool(self.advisory_id) and (self.safe_below is not None or self.any_version)

    def matches(self, version: str | None) -> bool:
        if self.eol or self.any_version:
            return True
        if version is None or self.safe_below is None or not is_parseable(version):
            return False
        return compare_versions(version, self.safe_below) < 0

    def to_row(self) -> str:
        return "|".join([
            self.ecosystem,
            self.name,
            self.safe_below or "",
            "true" if self.eol else "false",
            "true" if self.any_version else "false",
            self.advisory_id or "",
            self.cwe or "",
        ])

    def to_dict(self) -> dict:
        return {
            "ecosystem": self.ecosystem,
            "name": self.name,
            "safe_below": self.safe_below,
            "eol": self.eol,
            "any_version": self.any_version,
            "advisory_id": self.advisory_id,
            "cwe": self.cwe,
        }


def _order(record: AdvisoryRecord) -> tuple:
    return (record.advisory_id or "", record.ecosystem, record.name, record.safe_below or "")


def _merge(a: AdvisoryRecord, b: AdvisoryRecord) -> AdvisoryRecord:
    safe = a.safe_below
    if b.safe_below and (safe is None or compare_versions(b.safe_below, safe) > 0):
        safe = b.safe_below
    return replace(a, safe_below=safe, eol=a.eol or b.eol, any_version=a.any_version or b.any_version,
                   cwe=a.cwe or b.cwe)


class AdvisoryDB:
    """Records indexed by (ecosystem, lowercase name). Immutable after construction."""

    def __init__(self, records=()):
        merged: dict[tuple, AdvisoryRecord] = {}
        for record in records:
            key = (record.ecosystem, record.name.lower(), record.advisory_id or "")
            merged[key] = _merge(merged[key], record) if key in merged else record
        index: dict[tuple[str, str], list[AdvisoryRecord]] = {}
        for (eco, name, _), record in merged.items():
            index.setdefault((eco, name), []).append(record)
        self._index = {k: tuple(sorted(v, key=_order)) for k, v in index.items()}

    def __len__(self) -> int:
        return sum(len(v) for v in self._index.values())

    def __contains__(self, key: tuple[str, str]) -> bool:
        eco, name = key
        return (eco, name.lower()) in self._index

    def records(self) -> list[AdvisoryRecord]:
        return sorted((r for v in self._index.values() for r in v), key=_order)

    def query(self, ecosystem: str, name: str, version: str | None = None) -> list[AdvisoryRecord]:
        rows = self._index.get((ecosystem, name.lower()), ())
        return [r for r in rows if r.matches(version)]


def _flag(text: str, lineno: int) -> bool:
    value = text.strip().lower()
    if value in ("true", "yes", "1"):
        return True
    if value in ("false", "no", "0", ""):
        return False
    raise AdvisoryError(f"bad boolean {text!r}", lineno)


def parse_advisories(text: str) -> AdvisoryDB:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 7:
            raise AdvisoryError(f"expected 7 fields, got {len(fields)}", lineno)
        eco, name, safe, eol, anyv, adv, cwe = fields
        if not name:
            raise AdvisoryError("empty package name", lineno)
        try:
            records.append(AdvisoryRecord(eco, name, safe or None, _flag(eol, lineno),
                                          _flag(anyv, lineno), adv or None, cwe or None))
        except (AdvisoryError, VersionError) as exc:
            raise AdvisoryError(str(exc), lineno) from exc
    return AdvisoryDB(records)


def load_advisories(path: str | Path | None = None) -> AdvisoryDB:
    if path is None:
        return default_advisories()
    return parse_advisories(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_advisories() -> AdvisoryDB:
    text = (resources.files("iacsmell") / "data" / "advisories.txt").read_text(encoding="utf-8")
    return parse_advisories(text)
