"""Figure rendering for reports (non-interactive Agg backend)."""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evalharness import EvalReport  # noqa: E402
from .evolution import FixHistogram  # noqa: E402
from .rules import Finding  # noqa: E402
from .taxonomy import TOP10_IDS  # noqa: E402


def _save(fig, directory: str | Path, name: str) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / name
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-stable
    fig.savefig(target, format="png", dpi=100, metadata={"Software": None})
    plt.close(fig)
    return target


def plot_findings(findings: Iterable[Finding], directory: str | Path) -> Path:
    counts = Counter(f.rule_id for f in findings)
    values = [counts.get(r, 0) for r in TOP10_IDS]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.barh(range(len(TOP10_IDS)), values, color="#4c72b0")
    ax.set_yticks(range(len(TOP10_IDS)))
    ax.set_yticklabels(TOP10_IDS, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("findings")
    ax.set_title("Findings per rule")
    return _save(fig, directory, "findings_per_rule.png")


def plot_evaluation(report: EvalReport, directory: str | Path) -> Path:
    tools = report.tools
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.38
    xs = range(len(tools))
    precision = [report.pack(t).precision or 0.0 for t in tools]
    recall = [report.pack(t).recall or 0.0 for t in tools]
    ax.bar([x - width / 2 for x in xs], precision, width, label="precision", color="#4c72b0")
    ax.bar([x + width / 2 for x in xs], recall, width, label="recall", color="#dd8452")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(tools)
    ax.set_ylim(0, 1.05)
    ax.set_title("Rule-pack precision and recall")
    ax.legend(loc="lower right")
    return _save(fig, directory, "evaluation.png")


def plot_lifespans(histogram: FixHistogram, directory: str | Path) -> Path:
    fixed = [n for values in histogram.fixed.values() for n in values]
    persistent = [n for values in histogram.persistent.values() for n in values]
    top = max(fixed + persistent + [1])
    bins = range(1, top + 2)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist([fixed, persistent], bins=bins, stacked=True, label=["fixed", "persistent"],
            color=["#55a868", "#c44e52"], align="left")
    ax.set_xlabel("commits the smell survived")
    ax.set_ylabel("smells")
    ax.set_title("Commits to fix")
    ax.legend()
    return _save(fig, directory, "commits_to_fix.png")
