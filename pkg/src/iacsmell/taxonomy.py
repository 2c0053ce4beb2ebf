"""Security-smell taxonomy: 62 categories, ten of them bound to detection rules."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

EXPECTED_CATEGORIES = 62
EXPECTED_RULE_BOUND = 10

TOP10_IDS = (
    "insecure-configuration-management",
    "insecure-dependency-management",
    "insecure-input-handling",
    "outdated-dependencies",
    "path-traversal",
    "command-injection",
    "code-injection",
    "outdated-software-version",
    "inadequate-naming-convention",
    "sensitive-information-exposure",
)

# Alternate labels seen in reports, mapped to the canonical id.
ALIASES = {
    "outdated software dependencies": "outdated-dependencies",
    "outdated dependencies": "outdated-dependencies",
    "inadequate naming conventions": "inadequate-naming-convention",
}

_ID_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")
_CWE_RE = re.compile(r"^CWE-\d+$")
_TRUE = {"true", "yes", "1"}
_FALSE = {"false", "no", "0"}


class TaxonomyError(ValueError):
    """Malformed taxonomy data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class TaxonomyCountWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SmellCategory:
    id: str
    name: str
    cwes: tuple[str, ...]
    rule_bound: bool
    description: str = ""
    provisional: bool = False


@dataclass(frozen=True)
class CweMapping:
    category_id: str
    cwe: str
    note: str = ""


@dataclass(frozen=True)
class Taxonomy:
    categories: tuple[SmellCategory, ...]
    _by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {c.id: c for c in self.categories})

    def __len__(self) -> int:
        return len(self.categories)

    def __iter__(self):
        return iter(self.categories)

    def get(self, category_id: str) -> SmellCategory | None:
        return self._by_id.get(resolve_id(category_id))

    @property
    def rule_bound(self) -> list[SmellCategory]:
        return [c for c in self.categories if c.rule_bound]

    def category_for_cwe(self, cwe: str) -> list[SmellCategory]:
        return [c for c in self.categories if cwe in c.cwes]

    def mappings(self) -> list[CweMapping]:
        out = []
        for c in self.categories:
            for cwe in c.cwes:
                out.append(CweMapping(c.id, cwe, "rule-bound" if c.rule_bound else ""))
        return out


def resolve_id(label: str) -> str:
    """Map a display name or alias onto the canonical kebab-case id."""
    key = label.strip().lower()
    if key in ALIASES:
        return ALIASES[key]
    return re.sub(r"[^a-z0-9]+", "-", key).strip("-")


def default_taxonomy_path() -> Path:
    return Path(str(resources.files("iacsmell") / "data" / "taxonomy.txt"))


def _parse_bool(text: str, line: int) -> bool:
    value = text.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise TaxonomyError(f"expected boolean, got {text!r}", line)


def parse_taxonomy(text: str, *, strict: bool = False) -> Taxonomy:
    categories: list[SmellCategory] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) not in (5, 6):
            raise TaxonomyError(f"expected 5 or 6 '|'-separated fields, got {len(parts)}", lineno)
        cid, name, cwes_field, bound, description = (p.strip() for p in parts[:5])
        provisional = len(parts) == 6 and parts[5].strip().lower() in ("provisional", "true")
        if not _ID_RE.match(cid):
            raise TaxonomyError(f"category id {cid!r} is not lowercase-kebab", lineno)
        if cid in seen:
            raise TaxonomyError(f"duplicate category id {cid!r}", lineno)
        seen.add(cid)
        cwes = tuple(c.strip() for c in cwes_field.split(",") if c.strip())
        for cwe in cwes:
            if not _CWE_RE.match(cwe):
                raise TaxonomyError(f"bad CWE identifier {cwe!r}", lineno)
        categories.append(
            SmellCategory(cid, name, cwes, _parse_bool(bound, lineno), description, provisional)
        )

    n_bound = sum(c.rule_bound for c in categories)
    if len(categories) != EXPECTED_CATEGORIES or n_bound != EXPECTED_RULE_BOUND:
        msg = (
            f"taxonomy has {len(categories)} categories ({n_bound} rule-bound); "
            f"expected {EXPECTED_CATEGORIES} ({EXPECTED_RULE_BOUND} rule-bound)"
        )
        if strict:
            raise TaxonomyError(msg)
        warnings.warn(msg, TaxonomyCountWarning, stacklevel=2)
    return Taxonomy(tuple(categories))


def load_taxonomy(source: str | Path | None = None, *, strict: bool = False) -> Taxonomy:
    path = Path(source) if source is not None else default_taxonomy_path()
    return parse_taxonomy(path.read_text(encoding="utf-8"), strict=strict)


def serialize_taxonomy(taxonomy: Taxonomy) -> str:
    lines = ["# id|name|cwes|rule_bound|description[|provisional]"]
    for c in taxonomy.categories:
        row = [c.id, c.name, ",".join(c.cwes), "true" if c.rule_bound else "false", c.description]
        if c.provisional:
            row.append("provisional")
        lines.append("|".join(row))
    return "\n".join(lines) + "\n"


_DEFAULT: Taxonomy | None = None


def default_taxonomy() -> Taxonomy:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_taxonomy(strict=True)
    return _DEFAULT


def category_for_cwe(cwe: str, taxonomy: Taxonomy | None = None) -> list[SmellCategory]:
    return (taxonomy or default_taxonomy()).category_for_cwe(cwe)
