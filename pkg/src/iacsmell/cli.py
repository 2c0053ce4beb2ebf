"""Command-line entry point: lint, evaluate, history and taxonomy subcommands."""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .advisory import AdvisoryDB, AdvisoryError, default_advisories, load_advisories
from .evalharness import CorpusError, default_manifest, emit_report, evaluate_corpus
from .evolution import commits_to_fix, track
from .frontends import UnknownToolError, parse_file
from .frontends.model import ToolKind
from .history import HistoryError, git_files, git_series, is_fixture_dir, is_git_repo, read_fixture_dir
from .lexicons import LexiconError, Lexicons, default_lexicons, load_lexicons
from .predicates import PredicateContext
from .rules import RULES, Finding, UnknownRuleError, evaluate, explain
from .taxonomy import TaxonomyError, default_taxonomy, load_taxonomy

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2
SCHEMA_VERSION = 1
SEVERITIES = ("low", "medium", "high")
IAC_SUFFIXES = {".yml", ".yaml", ".sls", ".pp", ".tf", ".tfvars", ".hcl", ".rb", ".ts", ".js"}
IAC_NAMES = {"Vagrantfile"}
HISTORY_GLOBS = ["*.yml", "*.yaml", "*.sls", "*.pp", "*.tf", "*.rb", "Vagrantfile", "*/Vagrantfile"]
SKIP_DIRS = {".git", ".hg", ".svn", "node_modules", ".terraform", "__pycache__"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    tool: ToolKind | None = None
    rules: frozenset[str] = frozenset(RULES)
    lexicons: str | None = None
    advisories: str | None = None
    format: str = "text"
    fail_on: str = "low"
    jobs: int = 1

    def __post_init__(self):
        unknown = sorted(set(self.rules) - {c.id for c in default_taxonomy().rule_bound})
        if unknown:
            raise UnknownRuleError(unknown[0])
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")


class Style:
    def __init__(self, stream):
        self.enabled = (not os.environ.get("IACSMELL_NO_COLOR")
                        and hasattr(stream, "isatty") and stream.isatty())

    def __call__(self, text: str, code: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.enabled else text


# -- shared context ----------------------------------------------------------------

def _load_sources(config: RunConfig) -> tuple[Lexicons, AdvisoryDB]:
    lexicons = load_lexicons(config.lexicons) if config.lexicons else default_lexicons()
    advisories = load_advisories(config.advisories) if config.advisories else default_advisories()
    return lexicons, advisories


class _ContextFactory:
    def __init__(self, lexicons: Lexicons, advisories: AdvisoryDB):
        self.lexicons = lexicons
        self.advisories = advisories

    def __call__(self, parsed) -> PredicateContext:
        return PredicateContext(parsed, self.advisories, self.lexicons)


# -- lint ----------------------------------------------------------------------------

def _is_candidate(path: Path) -> bool:
    return path.suffix.lower() in IAC_SUFFIXES or path.name in IAC_NAMES


def collect_files(inputs: list[str]) -> tuple[list[str], list[str]]:
    """Resolve paths, directories and globs to a sorted file list plus missing inputs."""
    files: set[str] = set()
    missing: list[str] = []
    for item in inputs:
        matches = sorted(glob.glob(item, recursive=True)) if glob.has_magic(item) else [item]
        if not matches or not all(os.path.exists(m) for m in matches):
            missing.append(item)
            continue
        for match in matches:
            path = Path(match)
            if path.is_dir():
                for root, dirs, names in os.walk(path):
                    dirs[:] = sorted(d for d in dirs if d not in SKIP_DIRS)
                    for name in names:
                        child = Path(root) / name
                        if _is_candidate(child):
                            files.add(str(child))
            else:
                files.add(str(path))
    return sorted(files), missing


_WORKER: dict = {}


def _init_worker(tool, rules, lexicons_path, advisories_path) -> None:
    lexicons = load_lexicons(lexicons_path) if lexicons_path else default_lexicons()
    advisories = load_advisories(advisories_path) if advisories_path else default_advisories()
    _WORKER.update(tool=tool, rules=rules, factory=_ContextFactory(lexicons, advisories))


def _lint_one(path: str) -> tuple[list[Finding], list[dict]]:
    diagnostics: list[dict] = []
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        return [], [{"path": path, "line": None, "message": f"cannot read file: {exc.strerror}"}]
    try:
        parsed = parse_file(path, data, _WORKER["tool"])
    except UnknownToolError as exc:
        return [], [{"path": path, "line": None, "message": str(exc)}]
    ctx = _WORKER["factory"](parsed)
    findings = evaluate(parsed, ctx, _WORKER["rules"])
    for d in list(parsed.diagnostics) + list(ctx.diagnostics):
        diagnostics.append({"path": path, "line": d.line, "message": d.message})
    return findings, diagnostics


def lint_files(files: list[str], config: RunConfig) -> tuple[list[Finding], list[dict]]:
    init_args = (config.tool, frozenset(config.rules), config.lexicons, config.advisories)
    if config.jobs == 1 or len(files) < 2:
        _init_worker(*init_args)
        results = [_lint_one(f) for f in files]
    else:
        chunk = max(1, len(files) // (config.jobs * 4))
        with ProcessPoolExecutor(config.jobs, initializer=_init_worker, initargs=init_args) as pool:
            results = list(pool.map(_lint_one, files, chunksize=chunk))
    findings = sorted((f for fs, _ in results for f in fs), key=Finding.sort_key)
    diagnostics = sorted((d for _, ds in results for d in ds),
                         key=lambda d: (d["path"], d["line"] or 0, d["message"]))
    return findings, diagnostics


def lint_report(files: list[str], findings: list[Finding], diagnostics: list[dict]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "findings": [f.to_dict() for f in findings],
        "diagnostics": diagnostics,
        "summary": {
            "files": len(files),
            "findings": len(findings),
            "by_rule": dict(sorted(Counter(f.rule_id for f in findings).items())),
            "by_severity": dict(sorted(Counter(f.severity for f in findings).items())),
        },
    }


def cmd_lint(config: RunConfig, figures: str | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    files, missing = collect_files(config.inputs)
    for item in missing:
        print(f"iacsmell: error: no such file or directory: {item}", file=err)
    if missing:
        return EXIT_ERROR
    if not files:
        print("iacsmell: error: no IaC files matched the given inputs", file=err)
        return EXIT_ERROR
    findings, diagnostics = lint_files(files, config)
    if config.format == "json":
        out.write(json.dumps(lint_report(files, findings, diagnostics), indent=2, sort_keys=True) + "\n")
    else:
        style = Style(out)
        for f in findings:
            text = f.to_text()
            tag = f"[{f.rule_id}/{f.cwe}]"
            out.write(text.replace(tag, style(tag, "1;31" if f.severity == "high" else "1;33"), 1) + "\n")
        for d in diagnostics:
            where = f"{d['path']}:{d['line']}" if d["line"] else d["path"]
            print(f"{where}: warning: {d['message']}", file=err)
    if figures:
        from .plotting import plot_findings
        plot_findings(findings, figures)
    floor = SEVERITIES.index(config.fail_on)
    failing = [f for f in findings if SEVERITIES.index(f.severity) >= floor]
    return EXIT_FINDINGS if failing else EXIT_OK


# -- evaluate --------------------------------------------------------------------------

def cmd_evaluate(config: RunConfig, manifest: str | None, threshold: float = 0.9,
                 figures: str | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    path = Path(manifest) if manifest else default_manifest()
    if not path.is_file():
        print(f"iacsmell: error: manifest not found: {path}", file=err)
        return EXIT_ERROR
    lexicons, advisories = _load_sources(config)
    try:
        report = evaluate_corpus(path, _ContextFactory(lexicons, advisories))
    except CorpusError as exc:
        print(f"iacsmell: error: {exc}", file=err)
        return EXIT_ERROR
    out.write(emit_report(report, config.format))
    if figures:
        from .plotting import plot_evaluation
        plot_evaluation(report, figures)
    return EXIT_OK if all(p >= threshold for p in report.defined_precisions()) else EXIT_FINDINGS


# -- history ---------------------------------------------------------------------------

def _series_for(repo: Path, globs: list[str]) -> list:
    if is_fixture_dir(repo):
        return [read_fixture_dir(repo)]
    if repo.is_dir() and not is_git_repo(repo):
        subdirs = sorted(p for p in repo.iterdir() if is_fixture_dir(p))
        if subdirs:
            return [read_fixture_dir(p) for p in subdirs]
    if is_git_repo(repo):
        return [git_series(repo, name) for name in git_files(repo, globs or HISTORY_GLOBS)]
    raise HistoryError(f"{repo} is neither a git repository nor a snapshot fixture directory")


def cmd_history(config: RunConfig, repo: str, globs: list[str], figures: str | None = None,
                out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    path = Path(repo)
    try:
        if not path.exists():
            raise HistoryError(f"no such directory: {repo}")
        series_list = _series_for(path, globs)
        if not series_list:
            raise HistoryError(f"no history found for the requested files in {repo}")
    except HistoryError as exc:
        print(f"iacsmell: error: {exc}", file=err)
        return EXIT_ERROR
    lexicons, advisories = _load_sources(config)
    factory = _ContextFactory(lexicons, advisories)
    records = []
    for series in series_list:
        series.tool = config.tool or series.tool
        try:
            result = track(series, factory)
        except ValueError as exc:
            print(f"{series.path}: warning: {exc}", file=err)
            continue
        records.extend(r for r in result.records if r.rule_id in config.rules)
        for d in result.diagnostics:
            print(f"{series.path}: warning: {d}", file=err)
    records.sort(key=lambda r: (r.path, r.first_index, r.rule_id, r.fingerprint, r.last_index))
    histogram = commits_to_fix(records)
    if config.format == "json":
        for r in records:
            out.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
        out.write(json.dumps({"commits_to_fix": histogram.to_dict()}, sort_keys=True) + "\n")
    else:
        for r in records:
            fixed = f"fixed@{r.fixed_index} ({r.fixed_at})" if r.fixed_index else "unfixed"
            out.write(f"{r.path} [{r.rule_id}] {r.status}: first@{r.first_index} ({r.first_seen}) "
                      f"last@{r.last_index} {fixed} lifespan={r.lifespan_commits} commits "
                      f"/ {r.lifespan_seconds}s\n")
        for label, table in (("fixed", histogram.fixed), ("persistent", histogram.persistent)):
            for rule, values in table.items():
                out.write(f"commits-to-fix {label} {rule}: {' '.join(map(str, values))}\n")
    if figures:
        from .plotting import plot_lifespans
        plot_lifespans(histogram, figures)
    return EXIT_OK


# -- taxonomy --------------------------------------------------------------------------

def cmd_taxonomy(config: RunConfig, rule: str | None = None, taxonomy_file: str | None = None,
                 out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        taxonomy = load_taxonomy(taxonomy_file) if taxonomy_file else default_taxonomy()
    except (OSError, TaxonomyError) as exc:
        print(f"iacsmell: error: {exc}", file=err)
        return EXIT_ERROR
    if rule is not None:
        try:
            card = explain(rule, taxonomy)
        except UnknownRuleError as exc:
            print(f"iacsmell: error: {exc}", file=err)
            return EXIT_ERROR
        out.write((json.dumps(card.to_dict(), indent=2) if config.format == "json" else card.render()) + "\n")
        return EXIT_OK
    if config.format == "json":
        rows = [{"id": c.id, "name": c.name, "cwes": list(c.cwes), "rule_bound": c.rule_bound,
                 "provisional": c.provisional} for c in taxonomy]
        out.write(json.dumps(rows, indent=2) + "\n")
        return EXIT_OK
    width = max(len(c.id) for c in taxonomy)
    for c in taxonomy:
        flag = "rule" if c.rule_bound else ("prov" if c.provisional else "    ")
        out.write(f"{flag}  {c.id.ljust(width)}  {','.join(c.cwes)}".rstrip() + "\n")
    out.write(f"{len(taxonomy)} categories, {len(taxonomy.rule_bound)} rule-bound\n")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tool", choices=[t.value for t in ToolKind], help="skip tool detection")
    p.add_argument("--rules", help="comma-separated rule ids to enable (default: all ten)")
    p.add_argument("--lexicons", metavar="FILE", help="extra lexicon sections")
    p.add_argument("--advisories", metavar="FILE", help="replace the bundled advisory table")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iacsmell", description="Security smell linter for IaC scripts.")
    sub = parser.add_subparsers(dest="command", required=True)

    lint = sub.add_parser("lint", help="report security smells in files or directories")
    lint.add_argument("paths", nargs="+", help="files, directories or glob patterns")
    _common(lint)
    lint.add_argument("--fail-on", choices=SEVERITIES, default="low",
                      help="lowest severity that makes the exit code 1 (default: low)")
    lint.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    lint.add_argument("--figures", metavar="DIR", help="write a findings-per-rule chart here")

    ev = sub.add_parser("evaluate", help="precision and recall on a labelled corpus")
    ev.add_argument("manifest", nargs="?", help="corpus manifest (default: bundled corpus)")
    _common(ev)
    ev.add_argument("--threshold", type=float, default=0.9,
                    help="minimum precision for every defined cell (default: 0.9)")
    ev.add_argument("--figures", metavar="DIR", help="write a precision/recall chart here")

    hist = sub.add_parser("history", help="track smell lifespans over a file history")
    hist.add_argument("repo", help="git repository or snapshot fixture directory")
    hist.add_argument("globs", nargs="*", help="file globs inside the repository")
    _common(hist)
    hist.add_argument("--figures", metavar="DIR", help="write a commits-to-fix histogram here")

    tax = sub.add_parser("taxonomy", help="list smell categories or show a rule card")
    tax.add_argument("--rule", help="show the card for one rule id")
    tax.add_argument("--taxonomy-file", metavar="FILE", help="alternative taxonomy table")
    tax.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    rules = frozenset(RULES)
    if getattr(args, "rules", None):
        rules = frozenset(r.strip() for r in args.rules.split(",") if r.strip())
    return RunConfig(
        inputs=list(getattr(args, "paths", []) or []),
        tool=ToolKind(args.tool) if getattr(args, "tool", None) else None,
        rules=rules,
        lexicons=getattr(args, "lexicons", None),
        advisories=getattr(args, "advisories", None),
        format=args.format,
        fail_on=getattr(args, "fail_on", "low"),
        jobs=getattr(args, "jobs", 1),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        if config.lexicons:
            load_lexicons(config.lexicons)
        if config.advisories:
            load_advisories(config.advisories)
        if args.command == "lint":
            return cmd_lint(config, args.figures)
        if args.command == "evaluate":
            return cmd_evaluate(config, args.manifest, args.threshold, args.figures)
        if args.command == "history":
            return cmd_history(config, args.repo, args.globs, args.figures)
        return cmd_taxonomy(config, args.rule, args.taxonomy_file)
    except (UnknownRuleError, UsageError, LexiconError, AdvisoryError, OSError) as exc:
        print(f"iacsmell: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
