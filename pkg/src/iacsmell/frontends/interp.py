"""Template-interpolation discovery per tool syntax."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import ConfigNode, Diagnostic, Span, ToolKind

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_STRINGS = re.compile(r"""'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*\"""")
_KEYWORDS = {
    "and", "or", "not", "in", "is", "if", "else", "true", "false", "none",
    "True", "False", "None", "null", "nil", "do", "end",
}
_TF_REF = re.compile(r"\b(?:var|local|module|data|each|count|path|self)\.[A-Za-z_][\w-]*(?:\.[A-Za-z_][\w-]*)*")
_TF_BARE = re.compile(r"\bvar\.[A-Za-z_][\w-]*")
_RUBY_ENV = re.compile(r"""\bENV(?:\[\s*['"]([^'"]+)['"]\s*\]|\.fetch\(\s*['"]([^'"]+)['"][^)]*\))""")
_PUPPET_VAR = re.compile(r"\$(?:::)?([a-z_][\w]*(?:::[a-z_]\w*)*)")
_PULUMI = re.compile(
    r"""\bprocess\.env(?:\.([A-Za-z_]\w*)|\[\s*['"`]([^'"`]+)['"`]\s*\])"""
    r"""|\b\w*[cC]onfig\.(?:get|require)\w*\(\s*['"`]?([^'"`)]*)['"`]?\s*\)"""
)


@dataclass(frozen=True)
class Interpolation:
    span: Span
    variable: str
    text: str
    variables: tuple[str, ...] = field(default=())
    offset: int = 0  # start offset within the node's raw text


def sub_span(node: ConfigNode, start: int, end: int) -> Span:
    """Absolute span of ``node.raw[start:end]``."""
    base = node.value_span
    raw = node.raw

    def pos(k: int) -> tuple[int, int]:
        nl = raw.count("\n", 0, k)
        if nl == 0:
            return base.start_line, base.start_col + k
        return base.start_line + nl, k - (raw.rfind("\n", 0, k) + 1)

    sl, sc = pos(start)
    el, ec = pos(end)
    return Span(base.start + start, base.start + end, sl, sc, el, ec)


def expression_variables(expr: str) -> tuple[str, ...]:
    """Identifiers referenced by a template expression, functions and filters excluded."""
    cleaned = _STRINGS.sub(lambda m: " " * len(m.group(0)), expr)
    names: list[str] = []
    functions: list[str] = []
    for m in _IDENT.finditer(cleaned):
        word = m.group(0)
        before = cleaned[:m.start()].rstrip()
        after = cleaned[m.end():].lstrip()
        if word in _KEYWORDS or before.endswith(".") or word[0].isdigit():
            continue
        if before.endswith("|"):
            continue
        if after.startswith("("):
            functions.append(word)
            continue
        if word not in names:
            names.append(word)
    return tuple(names) if names else tuple(functions[:1])


def _balanced_end(raw: str, start: int, opener: str, closer: str) -> int:
    """Index just past the closer matching the opener at ``start``; -1 if unbalanced."""
    depth = 0
    i = start
    quote = None
    while i < len(raw):
        ch = raw[i]
        if quote:
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                quote = None
        elif ch in "'\"" and depth > 0:
            quote = ch
        elif ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return -1


def _jinja(raw: str, diags: list[str]) -> list[tuple[int, int, str, tuple[str, ...]]]:
    out = []
    i = 0
    while True:
        start = raw.find("{{", i)
        if start < 0:
            return out
        close = raw.find("}}", start + 2)
        nested = raw.find("{{", start + 2)
        if close < 0 or (0 <= nested < close):
            diags.append(f"unbalanced '{{{{' at offset {start}")
            i = start + 2
            continue
        end = close + 2
        inner = raw[start + 2:close]
        out.append((start, end, inner, expression_variables(inner)))
        i = end


def _delimited(raw: str, prefix: str, diags: list[str]) -> list[tuple[int, int, str, tuple[str, ...]]]:
    out = []
    i = 0
    while True:
        start = raw.find(prefix, i)
        if start < 0:
            return out
        end = _balanced_end(raw, start + len(prefix) - 1, "{", "}")
        if end < 0:
            diags.append(f"unbalanced '{prefix}' at offset {start}")
            i = start + len(prefix)
            continue
        inner = raw[start + len(prefix):end - 1]
        out.append((start, end, inner, ()))
        i = end


def _outside(spans, start: int, end: int) -> bool:
    return all(end <= s or start >= e for s, e, *_ in spans)


def _single_quoted_regions(raw: str) -> list[tuple[int, int]]:
    """Single-quoted literals that are not nested inside a double-quoted string."""
    regions = []
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch in "'\"":
            j = i + 1
            while j < n and raw[j] != ch:
                j += 2 if raw[j] == "\\" else 1
            if ch == "'":
                regions.append((i, min(j + 1, n)))
            i = j + 1
            continue
        i += 1
    return regions


def _scan(raw: str, tool: ToolKind, diags: list[str], quoted: bool):
    if tool in (ToolKind.ANSIBLE, ToolKind.SALTSTACK):
        return _jinja(raw, diags)
    if tool is ToolKind.TERRAFORM:
        found = []
        for s, e, inner, _ in _delimited(raw, "${", diags):
            refs = _TF_REF.findall(inner)
            names = tuple(refs) if refs else expression_variables(inner)
            found.append((s, e, inner, names))
        if not quoted:
            for m in _TF_BARE.finditer(raw):
                if _outside(found, m.start(), m.end()):
                    found.append((m.start(), m.end(), m.group(0), (m.group(0),)))
        return sorted(found)
    if tool in (ToolKind.CHEF, ToolKind.VAGRANT):
        found = []
        for s, e, inner, _ in _delimited(raw, "#{", diags):
            env = _RUBY_ENV.search(inner)
            names = ((env.group(1) or env.group(2)),) if env else expression_variables(inner)
            found.append((s, e, inner, names))
        for m in _RUBY_ENV.finditer(raw):
            if _outside(found, m.start(), m.end()):
                found.append((m.start(), m.end(), m.group(0), (m.group(1) or m.group(2),)))
        return sorted(found)
    if tool is ToolKind.PUPPET:
        found = []
        single = _single_quoted_regions(raw)
        for s, e, inner, _ in _delimited(raw, "${", diags):
            if _outside(single, s, e):
                m = _PUPPET_VAR.match("$" + inner.strip().lstrip("$"))
                found.append((s, e, inner, (m.group(1),) if m else expression_variables(inner)))
        for m in _PUPPET_VAR.finditer(raw):
            if not _outside(found, m.start(), m.end()) or not _outside(single, m.start(), m.end()):
                continue
            if re.match(r"\s*=(?![=~>])", raw[m.end():]):
                continue  # assignment target, not a use
            found.append((m.start(), m.end(), m.group(0), (m.group(1),)))
        return sorted(found)
    if tool is ToolKind.PULUMI:
        found = []
        for m in _PULUMI.finditer(raw):
            name = next((g for g in m.groups() if g), "config")
            found.append((m.start(), m.end(), m.group(0), (name,)))
        return found
    return []


def interpolation_spans(node: ConfigNode, tool: ToolKind | None = None,
                        diagnostics: list[Diagnostic] | None = None) -> list[Interpolation]:
    """Every template interpolation inside a scalar or raw-span node."""
    if not node.is_leaf:
        return []
    tool = tool or node.origin
    raw = node.raw
    diags: list[str] = []
    quoted = raw[:1] in ('"', "'") or raw.startswith("<<")
    result = []
    for start, end, text, names in _scan(raw, tool, diags, quoted):
        names = tuple(n for n in names if n)
        result.append(Interpolation(sub_span(node, start, end), names[0] if names else "",
                                    raw[start:end], names, start))
    if diagnostics is not None:
        for d in diags:
            diagnostics.append(Diagnostic(d, node.value_span.start_line))
    return result
