"""Line-oriented frontend for Ruby-like (chef, puppet, vagrant) and JS-like (pulumi) files.

Each statement-like line becomes a raw-span node keyed by its leading token.
Lines belonging to one resource block share a ``group`` id so rules can look
at a resource as a unit.
"""

from __future__ import annotations

import re

from .model import MAPPING, RAW_SPAN, ConfigNode, LineIndex, ToolKind

_KV = re.compile(
    r"""^(?:(?:export\s+)?(?:const|let|var)\s+)?
    (?P<key>[$@]?[A-Za-z_][\w.:\-]*(?:\[[^\]]*\])*)
    \s*(?P<op>=>|=(?![=~>])|:(?!:))\s*(?P<rest>.*)$""",
    re.X,
)
_CALL = re.compile(r"^(?P<key>[A-Za-z_][\w.:]*[!?]?)(?:\s*\(|\s*\{|\s+|$)(?P<rest>.*)$")
_STRING = re.compile(r"""'((?:[^'\\]|\\.)*)'|"((?:[^"\\]|\\.)*)"|`((?:[^`\\]|\\.)*)`""")
_BARE = re.compile(r"^[\w.\-/:+~]+$")
_CLOSER_ONLY = re.compile(r"^[\s\}\)\];,]*(?:end)?[\s\}\)\];,]*$")
_RUBY_HEREDOC = re.compile(r"<<([-~]?)(['\"]?)([A-Z_][A-Z0-9_]*)\2")

_TRANSPARENT = {
    ToolKind.CHEF: re.compile(r"^(?:if|unless|case|when|else|elsif|begin|def|module|class)\b"),
    ToolKind.VAGRANT: re.compile(r"^(?:Vagrant\.configure\b|\w+\.vm\.define\b|if\b|unless\b|else\b|elsif\b|begin\b|def\b)"),
    ToolKind.PUPPET: re.compile(r"^(?:class|node|define|if|unless|else|elsif|case)\b|^\}?\s*else\b"),
    ToolKind.PULUMI: re.compile(r"^(?:export\s+(?:=|default)|(?:async\s+)?function\b|if\b|else\b|for\b|while\b|try\b|catch\b|\}\s*else\b)"),
}
_RUBY_OPENER = re.compile(r"(?:\bdo(?:\s*\|[^|]*\|)?|^(?:if|unless|case|while|until|def|class|module|begin)\b.*)$")
_RUBY_END = re.compile(r"(?:^|[\s;])end\b")


def _strip_code(line: str, tool: ToolKind) -> str:
    """Remove string contents and trailing comments, keeping structure chars."""
    out = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in "'\"`":
            j = i + 1
            while j < n and line[j] != ch:
                j += 2 if line[j] == "\\" else 1
            out.append(ch + ch if j < n else ch)
            i = j + 1
            continue
        if tool is ToolKind.PULUMI:
            if line.startswith("//", i):
                break
        elif ch == "#" and not line.startswith("#{", i):
            break
        out.append(ch)
        i += 1
    return "".join(out)


def _literal(rest: str) -> tuple[str | None, str | None]:
    """Extract the statement argument: a leading string, a bare token, or an embedded string."""
    rest = rest.strip()
    m = _STRING.match(rest)
    if m:
        return next(g for g in m.groups() if g is not None), "string"
    token = re.sub(r"\s*(?:,|;|\bdo\b.*|\{.*)$", "", rest).strip()
    if token and _BARE.match(token):
        return token, "bare"
    m = _STRING.search(rest)
    if m:
        return next(g for g in m.groups() if g is not None), "embedded"
    return None, None


def split_statement(text: str) -> tuple[str, str | None, str | None]:
    """Return (key, literal, literal_kind) for one stripped statement line."""
    m = _KV.match(text)
    if m:
        key = m.group("key")
        literal, kind = _literal(m.group("rest"))
        return key, literal, kind
    m = _CALL.match(text)
    if m:
        literal, kind = _literal(m.group("rest"))
        return m.group("key"), literal, kind
    literal, kind = _literal(text)
    return "_", literal, kind


def _delta(code: str, tool: ToolKind) -> int:
    if tool in (ToolKind.CHEF, ToolKind.VAGRANT):
        stripped = code.strip()
        opens = 1 if _RUBY_OPENER.search(stripped) else 0
        closes = len(_RUBY_END.findall(stripped))
        if opens and closes and re.search(r"\bdo\b.*\bend\b", stripped):
            return 0
        return opens - closes + code.count("{") - code.count("}")
    opens = sum(code.count(c) for c in "{([")
    closes = sum(code.count(c) for c in "})]")
    return opens - closes


def parse_lexical(text: str, tool: ToolKind) -> tuple[ConfigNode, list[str]]:
    index = LineIndex(text)
    notes: list[str] = []
    children: list[ConfigNode] = []
    transparent = _TRANSPARENT.get(tool)

    depth = 0
    group_id = -1
    group_depth: int | None = None
    heredoc: str | None = None
    in_template = False
    in_block_comment = False

    lines = text.split("\n")
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        line_start = index.starts[lineno - 1]

        if heredoc is not None:
            if stripped == heredoc:
                heredoc = None
                if group_depth is not None and depth <= group_depth:
                    group_depth = None
                continue
            if stripped:
                children.append(_line_node(index, line_start, line, "heredoc", None, None,
                                           tool, group_id))
            continue
        if in_block_comment:
            if "*/" in stripped:
                in_block_comment = False
            continue
        if not stripped:
            continue
        if tool is ToolKind.PULUMI and stripped.startswith("/*"):
            in_block_comment = "*/" not in stripped
            continue
        if tool is ToolKind.PULUMI and stripped.startswith("//"):
            continue
        if tool is not ToolKind.PULUMI and stripped.startswith("#") and not stripped.startswith("#{"):
            continue

        code = _strip_code(stripped, tool)
        if in_template:
            key = "template"
            literal = kind = None
            if stripped.count("`") % 2 == 1:
                in_template = False
                code = _strip_code(stripped[stripped.index("`") + 1:], tool)
            else:
                code = ""
        else:
            key, literal, kind = split_statement(stripped)

        is_closer = _CLOSER_ONLY.match(code) is not None and not in_template
        delta = _delta(code, tool)
        if not is_closer and key != "template":
            if group_depth is None:
                if transparent and transparent.match(stripped) and delta > 0:
                    group_id += 1
                    children.append(_line_node(index, line_start, line, key, literal, kind, tool,
                                               group_id))
                    depth += delta
                    continue
                group_id += 1
                group_depth = depth
            children.append(_line_node(index, line_start, line, key, literal, kind, tool, group_id))
        elif key == "template":
            children.append(_line_node(index, line_start, line, key, None, None, tool, group_id))

        depth = max(0, depth + delta)
        if tool is ToolKind.PULUMI and not in_template and code.count("`") % 2 == 1:
            in_template = True
        if tool is not ToolKind.PULUMI:
            m = _RUBY_HEREDOC.search(stripped) if "<<" in code else None
            if m:
                heredoc = m.group(3)
        if heredoc is None and not in_template and group_depth is not None and depth <= group_depth:
            group_depth = None

    if heredoc is not None:
        notes.append(f"unterminated heredoc {heredoc}")
    span = index.span(0, len(text.rstrip()))
    root = ConfigNode(MAPPING, None, None, span, tool, children, raw=text[:span.end])
    return root, notes


def _line_node(index: LineIndex, line_start: int, line: str, key: str, literal, kind,
               tool: ToolKind, group: int) -> ConfigNode:
    lead = len(line) - len(line.lstrip())
    body = line.strip()
    start = line_start + lead
    span = index.span(start, start + len(body))
    return ConfigNode(RAW_SPAN, key, body, span, tool, raw=body, literal=literal, tag=kind,
                      group=group)
