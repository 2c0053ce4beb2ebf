from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from typing import Iterator


class ToolKind(str, enum.Enum):
    ANSIBLE = "ansible"
    SALTSTACK = "saltstack"
    TERRAFORM = "terraform"
    CHEF = "chef"
    PUPPET = "puppet"
    VAGRANT = "vagrant"
    PULUMI = "pulumi"

    def __str__(self) -> str:
        return self.value

    @property
    def structured(self) -> bool:
        return self in STRUCTURED_TOOLS


STRUCTURED_TOOLS = frozenset({ToolKind.ANSIBLE, ToolKind.SALTSTACK, ToolKind.TERRAFORM})

MAPPING = "mapping"
SEQUENCE = "sequence"
SCALAR = "scalar"
RAW_SPAN = "raw-span"


@dataclass(frozen=True, order=True)
class Span:
    """Source region. Lines are 1-based, columns 0-based, end exclusive."""

    start: int
    end: int
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.start_line, self.start_col, self.end_line, self.end_col)

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def to_dict(self) -> dict:
        return {
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }


class LineIndex:
    """Offset <-> (line, column) conversion for one source text."""

    def __init__(self, text: str):
        self.text = text
        self.starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.starts.append(i + 1)

    def position(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.starts, offset) - 1
        return line + 1, offset - self.starts[line]

    def span(self, start: int, end: int) -> Span:
        sl, sc = self.position(start)
        el, ec = self.position(end)
        return Span(start, end, sl, sc, el, ec)

    def line_span(self, lineno: int) -> Span:
        start = self.starts[lineno - 1]
        end = self.starts[lineno] - 1 if lineno < len(self.starts) else len(self.text)
        return self.span(start, end)


@dataclass
class ConfigNode:
    kind: str
    key: str | None
    value: str | None
    span: Span
    origin: ToolKind
    children: list["ConfigNode"] = field(default_factory=list)
    # Extent of the value alone; ``span`` covers ``key: value`` for keyed entries.
    value_span: Span | None = None
    # Source text of ``value_span`` (quotes and escapes intact).
    raw: str = ""
    tag: str | None = None
    # Lexical mode: string argument pulled out of the statement, and block id.
    literal: str | None = None
    group: int | None = None

    def __post_init__(self):
        if self.value_span is None:
            self.value_span = self.span

    @property
    def is_leaf(self) -> bool:
        return self.kind in (SCALAR, RAW_SPAN)

    def walk(self) -> Iterator["ConfigNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def get(self, key: str) -> "ConfigNode | None":
        for child in self.children:
            if child.key == key:
                return child
        return None

    def shape(self) -> tuple:
        """Structural fingerprint used for determinism checks."""
        return (
            self.kind,
            self.key,
            self.value,
            self.span.as_tuple(),
            tuple(c.shape() for c in self.children),
        )


@dataclass
class Diagnostic:
    message: str
    line: int | None = None

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


@dataclass
class ParsedFile:
    path: str
    tool: ToolKind
    root: ConfigNode
    parse_mode: str
    text: str = ""
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def slice(self, span: Span) -> str:
        return self.text[span.start:span.end]
