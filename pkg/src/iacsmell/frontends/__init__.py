"""Parse IaC scripts of seven tools into a common ConfigNode tree."""

from __future__ import annotations

import re
from pathlib import PurePosixPath

from .hcl import HclParseError, parse_hcl
from .interp import Interpolation, expression_variables, interpolation_spans, sub_span
from .lexical import parse_lexical
from .model import (
    MAPPING,
    RAW_SPAN,
    SCALAR,
    SEQUENCE,
    STRUCTURED_TOOLS,
    ConfigNode,
    Diagnostic,
    LineIndex,
    ParsedFile,
    Span,
    ToolKind,
)
from .yamlfront import YamlParseError, parse_yaml

__all__ = [
    "MAPPING", "RAW_SPAN", "SCALAR", "SEQUENCE", "STRUCTURED_TOOLS",
    "ConfigNode", "Diagnostic", "Interpolation", "LineIndex", "ParsedFile", "Span", "ToolKind",
    "UnknownToolError", "decode", "detect_tool", "expression_variables", "interpolation_spans",
    "parse", "parse_file", "sub_span",
]


class UnknownToolError(ValueError):
    def __init__(self, path: str):
        super().__init__(f"cannot determine IaC tool for {path!r}; pass --tool explicitly")
        self.path = path


_ANSIBLE_HINT = re.compile(
    r"^\s*-?\s*(?:hosts|tasks|roles|handlers|gather_facts|become|pre_tasks|post_tasks|import_playbook)\s*:",
    re.M,
)
_ANSIBLE_TASK = re.compile(
    r"^\s*-\s+name\s*:.*\n\s+(?:[a-z_]+\.){0,2}"
    r"(?:apt|yum|dnf|pip|copy|template|file|lineinfile|blockinfile|shell|command|service|systemd|"
    r"user|group|debug|set_fact|get_url|git|unarchive|package|uri|raw|script|assert|include_tasks|"
    r"import_tasks)\s*:",
    re.M,
)
_SALT_STATE = re.compile(
    r"^\s+-?\s*(?:pkg|file|service|cmd|user|group|pip|gem|git|archive|cron|sysctl|test|module|"
    r"ssh_auth|mount|firewalld|iptables|network)\.[a-z_]+\s*:?\s*$",
    re.M,
)
_TF_HINT = re.compile(r'^\s*(?:resource|provider|module|variable|output|data|terraform|locals)\s*(?:"|\{)', re.M)
_PUPPET_HINT = re.compile(r"^\s*(?:class\s+[\w:]+|node\s+\S+|define\s+[\w:]+|[a-z_:]+\s*\{\s*['\"$])", re.M)
_CHEF_HINT = re.compile(r"^\s*(?:package|execute|template|service|cookbook_file|bash|directory|file|user|remote_file)\s+['\"].*\bdo\s*$", re.M)


def decode(data: bytes) -> tuple[str, list[Diagnostic]]:
    """UTF-8 decode with replacement; a diagnostic flags lossy input."""
    try:
        return data.decode("utf-8"), []
    except UnicodeDecodeError:
        return data.decode("utf-8", errors="replace"), [
            Diagnostic("invalid UTF-8 replaced with U+FFFD")
        ]


def detect_tool(path: str, content: str) -> ToolKind:
    p = PurePosixPath(path.replace("\\", "/"))
    name = p.name
    lower = name.lower()
    parts = {part.lower() for part in p.parts}
    if name == "Vagrantfile" or lower == "vagrantfile":
        return ToolKind.VAGRANT
    if lower.endswith((".tf", ".tfvars", ".hcl")):
        return ToolKind.TERRAFORM
    if lower.endswith(".pp"):
        return ToolKind.PUPPET
    if lower.endswith(".sls"):
        return ToolKind.SALTSTACK
    if lower.startswith("pulumi.") and lower.endswith((".yaml", ".yml")):
        return ToolKind.PULUMI
    if lower.endswith((".ts", ".js", ".mjs", ".cjs")):
        return ToolKind.PULUMI
    if lower.endswith(".rb"):
        if "Vagrant.configure" in content:
            return ToolKind.VAGRANT
        return ToolKind.CHEF
    if lower.endswith((".yml", ".yaml")):
        if _SALT_STATE.search(content):
            return ToolKind.SALTSTACK
        if (_ANSIBLE_HINT.search(content) or _ANSIBLE_TASK.search(content)
                or parts & {"playbooks", "roles", "tasks", "handlers", "group_vars", "host_vars"}):
            return ToolKind.ANSIBLE
        raise UnknownToolError(path)
    return _detect_by_content(path, content)


def _detect_by_content(path: str, content: str) -> ToolKind:
    if "Vagrant.configure" in content:
        return ToolKind.VAGRANT
    if "@pulumi/" in content or "pulumi.Config" in content:
        return ToolKind.PULUMI
    if _ANSIBLE_HINT.search(content) or _ANSIBLE_TASK.search(content):
        return ToolKind.ANSIBLE
    if _SALT_STATE.search(content):
        return ToolKind.SALTSTACK
    if _TF_HINT.search(content):
        return ToolKind.TERRAFORM
    if _CHEF_HINT.search(content):
        return ToolKind.CHEF
    if _PUPPET_HINT.search(content):
        return ToolKind.PUPPET
    raise UnknownToolError(path)


def parse(content: str, tool: ToolKind | str, path: str = "<memory>") -> ParsedFile:
    tool = ToolKind(tool)
    diagnostics: list[Diagnostic] = []
    if tool in STRUCTURED_TOOLS:
        try:
            if tool is ToolKind.TERRAFORM:
                root, notes = parse_hcl(content), []
            else:
                root, notes = parse_yaml(content, tool)
            diagnostics.extend(Diagnostic(n) for n in notes)
            return ParsedFile(path, tool, root, "structured", content, diagnostics)
        except (YamlParseError, HclParseError) as exc:
            diagnostics.append(Diagnostic(f"structured parse failed, using lexical mode: {exc}",
                                          getattr(exc, "line", None)))
    root, notes = parse_lexical(content, tool)
    diagnostics.extend(Diagnostic(n) for n in notes)
    return ParsedFile(path, tool, root, "lexical", content, diagnostics)


def parse_file(path: str, data: bytes, tool: ToolKind | str | None = None) -> ParsedFile:
    text, diags = decode(data)
    kind = ToolKind(tool) if tool else detect_tool(path, text)
    parsed = parse(text, kind, path)
    parsed.diagnostics[:0] = diags
    return parsed
