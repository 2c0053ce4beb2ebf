"""Externally configurable keyword and pattern sets."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

REGEX_SECTIONS = (
    "sensitive_keys",
    "dangerous_settings",
    "code_sinks",
    "sanitizers",
    "data_contexts",
    "placeholders",
    "secret_refs",
    "config_paths",
)
WORD_SECTIONS = (
    "command_sinks",
    "vague_names",
    "path_keys",
    "config_modules",
    "trusted_registries",
    "security_keywords",
)
SECTIONS = REGEX_SECTIONS + WORD_SECTIONS

_HEADER = re.compile(r"^\[([a-z_]+)\]$")


class LexiconError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class PatternSet:
    """Case-insensitive regex set that remembers its source strings."""

    sources: tuple[str, ...]
    compiled: tuple[re.Pattern, ...] = field(compare=False, repr=False, default=())

    @classmethod
    def of(cls, sources) -> "PatternSet":
        sources = tuple(sources)
        return cls(sources, tuple(re.compile(s, re.I | re.M) for s in sources))

    def search(self, text: str) -> re.Match | None:
        """Earliest match across all patterns (ties broken by pattern order)."""
        best = None
        for pattern in self.compiled:
            m = pattern.search(text)
            if m and (best is None or m.start() < best.start()):
                best = m
        return best

    def finditer(self, text: str):
        for pattern in self.compiled:
            yield from pattern.finditer(text)

    def __bool__(self) -> bool:
        return bool(self.sources)

    def __len__(self) -> int:
        return len(self.sources)


@dataclass(frozen=True)
class Lexicons:
    sensitive_keys: PatternSet
    dangerous_settings: PatternSet
    code_sinks: PatternSet
    sanitizers: PatternSet
    data_contexts: PatternSet
    placeholders: PatternSet
    secret_refs: PatternSet
    config_paths: PatternSet
    command_sinks: frozenset[str]
    vague_names: frozenset[str]
    path_keys: frozenset[str]
    config_modules: frozenset[str]
    trusted_registries: frozenset[str]
    security_keywords: tuple[str, ...]

    def to_sections(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for name in REGEX_SECTIONS:
            out[name] = list(getattr(self, name).sources)
        for name in WORD_SECTIONS:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else sorted(value)
        return out

    def extended(self, **extra: list[str]) -> "Lexicons":
        """Copy with entries appended to the named sections."""
        sections = self.to_sections()
        for name, entries in extra.items():
            sections[name] = sections[name] + list(entries)
        return _build(sections)


def parse_sections(text: str) -> tuple[dict[str, list[str]], set[str]]:
    """Return (entries per section, sections carrying a replace directive)."""
    sections: dict[str, list[str]] = {}
    replaced: set[str] = set()
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER.match(line)
        if m:
            current = m.group(1)
            if current not in SECTIONS:
                raise LexiconError(f"unknown section [{current}]", lineno)
            sections.setdefault(current, [])
            continue
        if current is None:
            raise LexiconError("entry before any [section] header", lineno)
        if line == "!replace":
            replaced.add(current)
            sections[current] = []
            continue
        if current in REGEX_SECTIONS:
            try:
                re.compile(line)
            except re.error as exc:
                raise LexiconError(f"bad pattern {line!r}: {exc}", lineno) from exc
        sections[current].append(line)
    return sections, replaced


def _build(sections: dict[str, list[str]]) -> Lexicons:
    for name in SECTIONS:
        if not sections.get(name):
            raise LexiconError(f"section [{name}] is empty")
    kwargs = {name: PatternSet.of(dict.fromkeys(sections[name])) for name in REGEX_SECTIONS}
    for name in WORD_SECTIONS:
        words = [w.lower() for w in sections[name]]
        kwargs[name] = tuple(dict.fromkeys(words)) if name == "security_keywords" else frozenset(words)
    return Lexicons(**kwargs)


def _default_text() -> str:
    return (resources.files("iacsmell") / "data" / "lexicons.txt").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def default_lexicons() -> Lexicons:
    sections, _ = parse_sections(_default_text())
    return _build(sections)


def load_lexicons(path: str | Path | None = None) -> Lexicons:
    """Defaults merged with an optional user file."""
    if path is None:
        return default_lexicons()
    base, _ = parse_sections(_default_text())
    user, replaced = parse_sections(Path(path).read_text(encoding="utf-8"))
    for name, entries in user.items():
        base[name] = entries if name in replaced else base[name] + entries
    return _build(base)
