"""YAML frontend (ansible, saltstack) producing span-accurate ConfigNode trees.

PyYAML's event stream supplies character offsets; the tree is composed here so
that alias expansions are re-anchored at the alias site and every child span
stays inside its parent.
"""

from __future__ import annotations

import copy
import re

import yaml

from .model import MAPPING, SCALAR, SEQUENCE, ConfigNode, LineIndex, Span, ToolKind

_Loader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)

_JINJA_BLOCK = re.compile(r"\{%.*?%\}|\{#.*?#\}", re.S)
_JINJA_EXPR = re.compile(r"\{\{.*?\}\}")


class YamlParseError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)


def _blank(match: re.Match) -> str:
    return re.sub(r"[^\n]", " ", match.group(0))


def _mask_expr(match: re.Match) -> str:
    return "J" * len(match.group(0))


class _Composer:
    def __init__(self, text: str, tool: ToolKind, masked: bool):
        self.text = text
        self.index = LineIndex(text)
        self.tool = tool
        self.masked = masked
        self.anchors: dict[str, ConfigNode] = {}

    def span(self, start: int, end: int) -> Span:
        return self.index.span(start, end)

    def trimmed(self, start: int, end: int) -> Span:
        end = max(start, start + len(self.text[start:end].rstrip()))
        return self.span(start, end)

    def compose(self, events) -> list[ConfigNode]:
        docs = []
        for event in events:
            if isinstance(event, yaml.DocumentStartEvent):
                docs.append(self.node(next(events), events))
                end = next(events)
                assert isinstance(end, yaml.DocumentEndEvent)
        return docs

    def node(self, event, events) -> ConfigNode:
        if isinstance(event, yaml.AliasEvent):
            target = self.anchors.get(event.anchor)
            span = self.span(event.start_mark.index, event.end_mark.index)
            if target is None:
                raise YamlParseError(f"unknown alias {event.anchor!r}", span.start_line)
            return self._respan(copy.deepcopy(target), span)
        if isinstance(event, yaml.ScalarEvent):
            node = self.scalar(event)
        elif isinstance(event, yaml.SequenceStartEvent):
            node = self.sequence(event, events)
        elif isinstance(event, yaml.MappingStartEvent):
            node = self.mapping(event, events)
        else:  # pragma: no cover - parser guarantees node events here
            raise YamlParseError(f"unexpected event {type(event).__name__}")
        if getattr(event, "anchor", None):
            self.anchors[event.anchor] = node
        return node

    def _respan(self, node: ConfigNode, span: Span) -> ConfigNode:
        for sub in node.walk():
            sub.span = span
            sub.value_span = span
            sub.raw = self.text[span.start:span.end]
        return node

    def scalar(self, event) -> ConfigNode:
        span = self.trimmed(event.start_mark.index, event.end_mark.index)
        raw = self.text[span.start:span.end]
        value = event.value
        if self.masked and "J" * 4 in value:
            value = raw
            if event.style in ("'", '"') and len(raw) >= 2:
                value = raw[1:-1]
        return ConfigNode(SCALAR, None, value, span, self.tool, raw=raw, tag=event.tag)

    def _collection_span(self, event, end_event, children) -> Span:
        start = event.start_mark.index
        if event.flow_style:
            end = end_event.end_mark.index
        elif children:
            end = max(c.span.end for c in children)
        else:
            end = end_event.end_mark.index
        return self.trimmed(start, end)

    def sequence(self, event, events) -> ConfigNode:
        children = []
        for item in events:
            if isinstance(item, yaml.SequenceEndEvent):
                end_event = item
                break
            children.append(self.node(item, events))
        span = self._collection_span(event, end_event, children)
        return ConfigNode(SEQUENCE, None, None, span, self.tool, children,
                          raw=self.text[span.start:span.end], tag=event.tag)

    def mapping(self, event, events) -> ConfigNode:
        children = []
        for key_event in events:
            if isinstance(key_event, yaml.MappingEndEvent):
                end_event = key_event
                break
            key_node = self.node(key_event, events)
            value_node = self.node(next(events), events)
            key = key_node.value if key_node.kind == SCALAR else key_node.raw
            value_node.key = key if key is not None else ""
            value_node.span = self.span(key_node.span.start, max(value_node.span.end, key_node.span.end))
            children.append(value_node)
        span = self._collection_span(event, end_event, children)
        return ConfigNode(MAPPING, None, None, span, self.tool, children,
                          raw=self.text[span.start:span.end], tag=event.tag)


def _empty_root(tool: ToolKind) -> ConfigNode:
    span = Span(0, 0, 1, 0, 1, 0)
    return ConfigNode(MAPPING, None, None, span, tool)


def _compose(text: str, source: str, tool: ToolKind, masked: bool) -> ConfigNode:
    composer = _Composer(text, tool, masked)
    docs = composer.compose(iter(yaml.parse(source, Loader=_Loader)))
    docs = [d for d in docs if not (d.kind == SCALAR and d.value == "" and d.tag is None)]
    if not docs:
        return _empty_root(tool)
    if len(docs) == 1:
        return docs[0]
    span = composer.span(docs[0].span.start, docs[-1].span.end)
    return ConfigNode(SEQUENCE, None, None, span, tool, docs, raw=text[span.start:span.end])


def parse_yaml(text: str, tool: ToolKind) -> tuple[ConfigNode, list[str]]:
    """Parse YAML text; Jinja statements are blanked in place so offsets hold."""
    notes: list[str] = []
    source = _JINJA_BLOCK.sub(_blank, text)
    if source != text:
        notes.append("template statements ({% %}/{# #}) ignored during structural parse")
    try:
        return _compose(text, source, tool, masked=False), notes
    except yaml.YAMLError as first:
        masked = _JINJA_EXPR.sub(_mask_expr, source)
        if masked != source:
            try:
                root = _compose(text, masked, tool, masked=True)
                notes.append("unquoted template expressions masked during structural parse")
                return root, notes
            except yaml.YAMLError:
                pass
        mark = getattr(first, "problem_mark", None)
        raise YamlParseError(str(first).replace("\n", " "), mark.line + 1 if mark else None) from first
