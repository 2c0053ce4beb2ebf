"""Labelled-corpus evaluation: precision and recall per tool and rule."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from .frontends import parse
from .frontends.model import ToolKind
from .predicates import PredicateContext
from .rules import RULES, evaluate
from .taxonomy import TOP10_IDS

LINE_TOLERANCE = 2
UNDEFINED = "--"
TOOL_ORDER = [t.value for t in ToolKind]


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Expectation:
    rule_id: str
    line: int | None = None


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    tool: ToolKind
    snippet: str
    expected: tuple[Expectation, ...]
    provenance: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "tool": self.tool.value,
            "snippet": self.snippet,
            "expected": [{"rule_id": e.rule_id, "line": e.line} for e in self.expected],
            "provenance": self.provenance,
        }


def default_manifest() -> Path:
    return Path(str(resources.files("iacsmell") / "data" / "corpus" / "manifest.jsonl"))


def load_manifest(path: str | Path) -> list[CorpusEntry]:
    path = Path(path)
    entries = []
    seen = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            raw = json.loads(line)
            entry = CorpusEntry(
                id=str(raw["id"]),
                tool=ToolKind(raw["tool"]),
                snippet=str(raw["snippet"]),
                expected=tuple(Expectation(e["rule_id"], e.get("line")) for e in raw.get("expected", [])),
                provenance=str(raw.get("provenance", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"{path}:{lineno}: bad manifest entry: {exc}") from exc
        for e in entry.expected:
            if e.rule_id not in RULES:
                raise CorpusError(f"{path}:{lineno}: entry {entry.id}: unknown rule id {e.rule_id!r}")
        if entry.id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate entry id {entry.id!r}")
        seen.add(entry.id)
        entries.append(entry)
    return entries


def max_matching(detections: list[int], expected: list[int | None], tolerance: int = LINE_TOLERANCE) -> int:
    """Size of a maximum one-to-one matching between detection and expectation lines."""
    adj = [[j for j, exp in enumerate(expected) if exp is None or abs(det - exp) <= tolerance]
           for det in detections]
    owner: list[int | None] = [None] * len(expected)

    def augment(i: int, seen: set[int]) -> bool:
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if owner[j] is None or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    return sum(1 for i in range(len(detections)) if augment(i, set()))


@dataclass
class Cell:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    def add(self, other: "Cell") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall}


@dataclass
class EntryResult:
    id: str
    tool: str
    tp: int
    fp: int
    fn: int
    detections: list[tuple[str, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"id": self.id, "tool": self.tool, "tp": self.tp, "fp": self.fp, "fn": self.fn,
                "detections": [list(d) for d in self.detections]}


@dataclass
class EvalReport:
    cells: dict[tuple[str, str], Cell] = field(default_factory=dict)
    occurrences: dict[str, int] = field(default_factory=dict)
    entries: list[EntryResult] = field(default_factory=list)

    @property
    def tools(self) -> list[str]:
        present = {tool for tool, _ in self.cells}
        return [t for t in TOOL_ORDER if t in present]

    def cell(self, tool: str, rule_id: str) -> Cell:
        return self.cells.get((tool, rule_id), Cell())

    def pack(self, tool: str) -> Cell:
        total = Cell()
        for (t, _), c in self.cells.items():
            if t == tool:
                total.add(c)
        return total

    def overall(self) -> Cell:
        total = Cell()
        for c in self.cells.values():
            total.add(c)
        return total

    def average_precision(self, tool: str) -> float | None:
        values = [c.precision for (t, _), c in self.cells.items() if t == tool and c.precision is not None]
        return sum(values) / len(values) if values else None

    def defined_precisions(self) -> list[float]:
        return [c.precision for c in self.cells.values() if c.precision is not None]

    def to_dict(self) -> dict:
        return {
            "cells": [
                {"tool": tool, "rule_id": rule, **cell.to_dict()}
                for (tool, rule), cell in sorted(self.cells.items(), key=_cell_order)
            ],
            "occurrences": dict(sorted(self.occurrences.items())),
            "packs": {
                tool: {**self.pack(tool).to_dict(), "average_precision": self.average_precision(tool)}
                for tool in self.tools
            },
            "overall": self.overall().to_dict(),
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        cells = {(c["tool"], c["rule_id"]): Cell(c["tp"], c["fp"], c["fn"]) for c in data.get("cells", [])}
        entries = [EntryResult(e["id"], e["tool"], e["tp"], e["fp"], e["fn"],
                               [tuple(d) for d in e.get("detections", [])]) for e in data.get("entries", [])]
        return cls(cells, dict(data.get("occurrences", {})), entries)


def _cell_order(item) -> tuple:
    (tool, rule), _ = item
    return (TOOL_ORDER.index(tool) if tool in TOOL_ORDER else 99,
            TOP10_IDS.index(rule) if rule in TOP10_IDS else 99, rule)


def evaluate_entry(entry: CorpusEntry, base: Path, make_ctx: Callable = PredicateContext):
    """Per-rule (tp, fp, fn) for one corpus entry."""
    path = base / entry.snippet
    try:
        text = path.read_bytes().decode("utf-8", errors="replace")
    except OSError as exc:
        raise CorpusError(f"entry {entry.id}: cannot read snippet {entry.snippet}: {exc.strerror}") from exc
    parsed = parse(text, entry.tool, entry.snippet)
    findings = evaluate(parsed, make_ctx(parsed))
    detections = sorted({(f.rule_id, f.line) for f in findings})
    per_rule: dict[str, Cell] = {}
    rules = {r for r, _ in detections} | {e.rule_id for e in entry.expected}
    for rule in sorted(rules):
        dets = [line for r, line in detections if r == rule]
        exps = [e.line for e in entry.expected if e.rule_id == rule]
        tp = max_matching(dets, exps)
        per_rule[rule] = Cell(tp, len(dets) - tp, len(exps) - tp)
    return per_rule, detections


def evaluate_corpus(manifest: str | Path | None = None, make_ctx: Callable = PredicateContext) -> EvalReport:
    manifest = Path(manifest) if manifest is not None else default_manifest()
    entries = load_manifest(manifest)
    base = manifest.parent
    report = EvalReport()
    occurrences: dict[str, int] = defaultdict(int)
    for entry in entries:
        per_rule, detections = evaluate_entry(entry, base, make_ctx)
        totals = Cell()
        for rule, cell in per_rule.items():
            report.cells.setdefault((entry.tool.value, rule), Cell()).add(cell)
            totals.add(cell)
        for e in entry.expected:
            occurrences[e.rule_id] += 1
        report.entries.append(EntryResult(entry.id, entry.tool.value, totals.tp, totals.fp, totals.fn,
                                          detections))
    report.occurrences = dict(occurrences)
    return report


def _fmt(value: float | None) -> str:
    return UNDEFINED if value is None else f"{value:.2f}"


def _table(report: EvalReport, metric: str) -> list[str]:
    tools = report.tools
    header = ["Rule"] + tools + ["Occurrences"]
    rows = []
    if report.cells:
        for rule in TOP10_IDS:
            row = [rule]
            for tool in tools:
                cell = report.cells.get((tool, rule))
                row.append(_fmt(getattr(cell, metric)) if cell is not None else UNDEFINED)
            occ = report.occurrences.get(rule, 0)
            row.append(str(occ) if occ else UNDEFINED)
            rows.append(row)
        total = ["Total and AVG " + metric.capitalize()]
        for tool in tools:
            value = report.average_precision(tool) if metric == "precision" else report.pack(tool).recall
            total.append(_fmt(value))
        total.append(str(sum(report.occurrences.values())))
        rows.append(total)
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return lines


def emit_report(report: EvalReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = ["Precision"] + _table(report, "precision")
    if report.cells:
        lines += ["", "Recall"] + _table(report, "recall")
        lines.append("")
        for tool in report.tools:
            pack = report.pack(tool)
            lines.append(f"{tool}: tp={pack.tp} fp={pack.fp} fn={pack.fn} "
                         f"precision={_fmt(pack.precision)} recall={_fmt(pack.recall)}")
    return "\n".join(lines) + "\n"
