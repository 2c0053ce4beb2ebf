"""Security-fix commit classification and smell persistence over file histories."""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from .frontends import UnknownToolError, detect_tool, parse
from .frontends.model import Diagnostic, ToolKind
from .lexicons import Lexicons, default_lexicons
from .predicates import PredicateContext
from .rules import Finding, evaluate

# Tool and script-type names; reported alongside keyword hits as search context.
TOOL_TERMS = (
    "ansible", "playbook", "terraform", "chef", "cookbook", "recipe", "puppet", "manifest",
    "pulumi", "saltstack", "salt", "vagrant", "vagrantfile",
)
SHORT_TOKEN = 5

PERSISTENT = "persistent"
FIXED = "fixed"
REINTRODUCED = "reintroduced"


@dataclass(frozen=True)
class FixClassification:
    is_security_fix: bool
    keywords: tuple[str, ...]
    tool_terms: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.is_security_fix


def _term_pattern(term: str) -> re.Pattern:
    body = r"\s+".join(re.escape(w) for w in term.split())
    if len(term) <= SHORT_TOKEN:
        return re.compile(rf"(?<![A-Za-z0-9]){body}(?![A-Za-z0-9])", re.I)
    return re.compile(body, re.I)


def classify_security_fix(message: str, lexicons: Lexicons | None = None) -> FixClassification:
    lexicons = lexicons or default_lexicons()
    hits = tuple(k for k in lexicons.security_keywords if _term_pattern(k).search(message))
    tools = tuple(t for t in TOOL_TERMS if re.search(rf"\b{t}\b", message, re.I))
    return FixClassification(bool(hits), hits, tools)


@dataclass(frozen=True)
class Snapshot:
    commit: str
    timestamp: int
    content: str


@dataclass
class SnapshotSeries:
    repo: str
    path: str
    snapshots: list[Snapshot]
    tool: ToolKind | None = None

    def __post_init__(self):
        seen = set()
        last = None
        for snap in self.snapshots:
            if snap.commit in seen:
                raise ValueError(f"duplicate commit id {snap.commit!r} in series {self.path}")
            seen.add(snap.commit)
            if last is not None and snap.timestamp < last:
                raise ValueError(f"timestamps decrease at commit {snap.commit!r}")
            last = snap.timestamp

    def __len__(self) -> int:
        return len(self.snapshots)


@dataclass(frozen=True)
class PersistenceRecord:
    fingerprint: str
    rule_id: str
    path: str
    snippet: str
    first_seen: str
    last_seen: str
    fixed_at: str | None
    first_index: int  # 1-based snapshot positions
    last_index: int
    fixed_index: int | None
    lifespan_commits: int
    lifespan_seconds: int
    status: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrackResult:
    records: list[PersistenceRecord]
    diagnostics: list[Diagnostic] = field(default_factory=list)


@dataclass
class _Chain:
    key: tuple[str, int]
    finding: Finding
    first: int
    last: int
    fixed: int | None = None


def _snapshot_findings(series: SnapshotSeries, snap: Snapshot, tool: ToolKind,
                       make_ctx: Callable) -> tuple[list[Finding] | None, list[Diagnostic]]:
    parsed = parse(snap.content, tool, series.path)
    if tool.structured and parsed.parse_mode != "structured":
        return None, [Diagnostic(f"snapshot {snap.commit} could not be parsed; contributes no findings")]
    ctx = make_ctx(parsed)
    return evaluate(parsed, ctx), list(ctx.diagnostics)


def _keys(findings: Iterable[Finding]) -> dict[tuple[str, int], Finding]:
    """Occurrence-indexed fingerprints so repeated identical snippets stay distinct."""
    counts: Counter[str] = Counter()
    out = {}
    for f in findings:
        out[(f.fingerprint, counts[f.fingerprint])] = f
        counts[f.fingerprint] += 1
    return out


def track(series: SnapshotSeries, ctx_factory: Callable | None = None) -> TrackResult:
    """Chain identical findings across consecutive snapshots of one file."""
    if not series.snapshots:
        raise ValueError("empty snapshot series")
    make_ctx = ctx_factory or PredicateContext
    tool = series.tool
    diagnostics: list[Diagnostic] = []
    if tool is None:
        try:
            tool = detect_tool(series.path, series.snapshots[-1].content)
        except UnknownToolError as exc:
            raise ValueError(str(exc)) from exc

    active: dict[tuple[str, int], _Chain] = {}
    done: list[_Chain] = []
    for i, snap in enumerate(series.snapshots):
        findings, diags = _snapshot_findings(series, snap, tool, make_ctx)
        diagnostics.extend(diags)
        if findings is None:
            continue
        present = _keys(findings)
        for key, chain in list(active.items()):
            if key not in present:
                # absent from a parsed snapshot; unparseable snapshots in between are bridged
                chain.fixed = i
                done.append(active.pop(key))
        for key, finding in present.items():
            if key in active:
                active[key].last = i
            else:
                active[key] = _Chain(key, finding, i, i)
    final = len(series.snapshots) - 1
    done.extend(active.values())

    per_key: dict[tuple[str, int], list[_Chain]] = defaultdict(list)
    for chain in done:
        per_key[chain.key].append(chain)
    snaps = series.snapshots
    records = []
    for key, chains in per_key.items():
        chains.sort(key=lambda c: c.first)
        for n, chain in enumerate(chains):
            if n < len(chains) - 1:
                status = REINTRODUCED
            elif chain.fixed is None and chain.last == final:
                status = PERSISTENT
            else:
                status = FIXED
            end = chain.fixed if chain.fixed is not None else chain.last
            records.append(PersistenceRecord(
                fingerprint=chain.finding.fingerprint,
                rule_id=chain.finding.rule_id,
                path=series.path,
                snippet=chain.finding.snippet,
                first_seen=snaps[chain.first].commit,
                last_seen=snaps[chain.last].commit,
                fixed_at=snaps[chain.fixed].commit if chain.fixed is not None else None,
                first_index=chain.first + 1,
                last_index=chain.last + 1,
                fixed_index=chain.fixed + 1 if chain.fixed is not None else None,
                lifespan_commits=chain.last - chain.first + 1,
                lifespan_seconds=snaps[end].timestamp - snaps[chain.first].timestamp,
                status=status,
            ))
    records.sort(key=lambda r: (r.path, r.first_index, r.rule_id, r.fingerprint, r.last_index))
    return TrackResult(records, diagnostics)


@dataclass
class FixHistogram:
    fixed: dict[str, list[int]]
    persistent: dict[str, list[int]]

    def to_dict(self) -> dict:
        return {"fixed": self.fixed, "persistent": self.persistent}

    def __bool__(self) -> bool:
        return bool(self.fixed or self.persistent)


def commits_to_fix(records: Iterable[PersistenceRecord]) -> FixHistogram:
    """Lifespans per rule; persistent (censored) chains are kept apart."""
    fixed: dict[str, list[int]] = defaultdict(list)
    persistent: dict[str, list[int]] = defaultdict(list)
    for r in records:
        (persistent if r.status == PERSISTENT else fixed)[r.rule_id].append(r.lifespan_commits)
    return FixHistogram({k: sorted(v) for k, v in sorted(fixed.items())},
                        {k: sorted(v) for k, v in sorted(persistent.items())})
