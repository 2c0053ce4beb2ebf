"""Atomic predicates over analysis units and their fields.

Every predicate is a pure function of its arguments and an immutable
PredicateContext. Boolean predicates return a Verdict that carries evidence
spans; a true Verdict always has at least one evidence span.
"""

from __future__ import annotations

import os.path
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any
from urllib.parse import urlparse

from .advisory import AdvisoryDB, AdvisoryRecord, default_advisories, is_parseable
from .frontends.interp import Interpolation, expression_variables, interpolation_spans, sub_span
from .frontends.model import MAPPING, SCALAR, SEQUENCE, ConfigNode, Diagnostic, LineIndex, ParsedFile, Span, ToolKind
from .lexicons import Lexicons, default_lexicons
from .units import Field, Unit, build_units, normalize_module

OS_COMMAND = "os-command"
INTERPRETER = "interpreter"

# Ansible task keywords whose values are control metadata, never payload.
META_KEYS = frozenset({
    "name", "when", "tags", "notify", "register", "listen", "changed_when", "failed_when",
    "until", "loop_control", "delegate_to", "become", "become_user", "become_method", "no_log",
    "ignore_errors", "retries", "delay", "run_once", "check_mode", "diff", "any_errors_fatal",
    "hosts", "gather_facts", "connection", "throttle", "timeout",
})
SINK_ARGS = frozenset({"cmd", "argv", "_raw_params", "name", "names"})
TF_SINK_ARGS = frozenset({"command", "inline"})
CONTENT_KEYS = frozenset({"content", "contents", "line", "block", "text", "heredoc", "template"})
NAMING_PATH_KEYS = frozenset({"path", "dest", "destination", "filename"})
LOG_CALLS = frozenset({"log", "notify", "notice", "puts", "print", "warn", "warning", "info", "debug",
                       "error", "alert"})
LOCK_WORDS = frozenset({"latest", "*", "present", "installed", "head", "master", "main", "any", "x", ""})
NOT_INSTALLED = frozenset({"absent", "removed", "purged", "purge", "remove", "uninstall", "uninstalled"})
EXPOSURE_SUFFIXES = (
    "_length", "_len", "_file", "_path", "_dir", "_name", "_ttl", "_timeout", "_enabled", "_required",
    "_policy", "_type", "_mode", "_size", "_min", "_max", "_expiry", "_age", "_id_var", "_rotation",
)
FILE_RESOURCES = frozenset({"file", "template", "cookbook_file", "remote_file", "directory"})
TRUTHY = frozenset({"true", "yes", "on", "1", "y"})

_ANSIBLE_DEPS = {
    "apt": "apt", "yum": "yum", "dnf": "yum", "pip": "pip", "gem": "gem", "package": "generic",
    "apk": "generic", "zypper": "generic", "pacman": "generic", "homebrew": "generic",
    "snap": "generic", "npm": "generic", "win_chocolatey": "generic",
}
_SALT_DEPS = {"pkg": "generic", "pip": "pip", "gem": "gem"}
_CHEF_DEPS = {
    "package": "generic", "apt_package": "apt", "yum_package": "yum", "dnf_package": "yum",
    "gem_package": "gem", "chef_gem": "gem", "pip_package": "pip", "python_package": "pip",
}
_PUPPET_PROVIDERS = {"gem": "gem", "pip": "pip", "pip3": "pip", "apt": "apt", "yum": "yum", "dnf": "yum"}
_INLINE_SPEC = re.compile(r"^(?P<name>[A-Za-z0-9][\w.+\-]*?)\s*(?P<op>==|>=|<=|~=|!=|=|>|<)\s*(?P<ver>.+)$")
_PULUMI_IMPORT = re.compile(r"""(?:\bfrom\s+|\brequire\(\s*)['"`]([^'"`]+)['"`]""")
_IDENTIFIER_WORD = re.compile(r"[A-Za-z_][\w\-]*")
_NUMBER = re.compile(r"^[+-]?\d+(?:\.\d+)?$")
_CAMEL = re.compile(r"[a-z0-9][A-Z]")


@dataclass(frozen=True)
class Evidence:
    span: Span
    text: str
    reason: str

    def to_dict(self) -> dict:
        return {"reason": self.reason, "text": self.text, **self.span.to_dict()}


@dataclass(frozen=True)
class Verdict:
    value: bool
    evidence: tuple[Evidence, ...] = ()
    detail: Any = None

    def __bool__(self) -> bool:
        return self.value


FALSE = Verdict(False)


@dataclass(frozen=True)
class DependencyRef:
    name: str
    version: str | None
    source: str | None
    ecosystem: str
    name_node: ConfigNode | None = field(default=None, compare=False, repr=False)
    version_node: ConfigNode | None = field(default=None, compare=False, repr=False)
    # Imports resolved by a lockfile elsewhere (pulumi) carry no pin obligation.
    pin_required: bool = True

    @property
    def anchor(self) -> ConfigNode | None:
        return self.version_node or self.name_node


@dataclass
class PredicateContext:
    file: ParsedFile
    advisory: AdvisoryDB = field(default_factory=default_advisories)
    lexicons: Lexicons = field(default_factory=default_lexicons)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @cached_property
    def units(self) -> list[Unit]:
        return build_units(self.file)

    @cached_property
    def index(self) -> LineIndex:
        return LineIndex(self.file.text)

    @cached_property
    def validated_variables(self) -> frozenset[str]:
        return _validated_variables(self)

    @cached_property
    def content_pattern(self) -> re.Pattern:
        keys = "|".join(f"(?:{s})" for s in self.lexicons.sensitive_keys.sources)
        return re.compile(rf"^[ \t|>\-]*[\"']?[\w.\-\[\]]*(?:{keys})[\w.\-\[\]]*[\"']?[ \t]*[=:]", re.I | re.M)

    def evidence(self, node: ConfigNode, reason: str, span: Span | None = None) -> Evidence:
        span = span or node.value_span
        return Evidence(span, self.file.slice(span), reason)

    def line_evidence(self, line: int, reason: str) -> Evidence:
        span = self.index.line_span(line)
        text = self.file.slice(span)
        lead = len(text) - len(text.lstrip())
        span = self.index.span(span.start + lead, span.start + len(text.rstrip()))
        return Evidence(span, self.file.slice(span), reason)


def _as_node(target: Field | ConfigNode) -> ConfigNode:
    return target.node if isinstance(target, Field) else target


def field_key(f: Field) -> str:
    """Lowercased trailing key of a field, stripped of sigils and namespaces."""
    key = f.key
    if f.node.kind != SCALAR:
        key = key.split(".")[-1]
    return key.strip("$@:").lower()


def is_meta(f: Field, unit: Unit) -> bool:
    return unit.tool is ToolKind.ANSIBLE and unit.kind == "task" and bool(f.path) and f.path[0] in META_KEYS


def payload_fields(unit: Unit) -> list[Field]:
    return [f for f in unit.fields if not is_meta(f, unit)]


# -- configuration -------------------------------------------------------------

def is_config_file(unit: Unit, ctx: PredicateContext) -> Verdict:
    lex = ctx.lexicons
    module = (unit.module or "").lower()
    evidence = []
    for f in unit.fields:
        if field_key(f) in lex.path_keys or (unit.kind == "group" and f.node is unit.head):
            target = f.node.literal if unit.kind == "group" else f.node.value
            if target and lex.config_paths.search(target):
                evidence.append(ctx.evidence(f.node, "config-path"))
    if unit.kind == "state" and unit.label and lex.config_paths.search(unit.label):
        evidence.append(ctx.line_evidence(unit.node.span.start_line, "config-path"))
    if module in lex.config_modules or module.split(".")[-1] in lex.config_modules:
        anchor = unit.head if unit.head is not None else (unit.params() or unit.node)
        evidence.append(ctx.evidence(anchor, "config-module", anchor.span))
    return Verdict(bool(evidence), tuple(evidence))


def is_sensitive_setting(target: Field | ConfigNode, ctx: PredicateContext, key: str | None = None) -> Verdict:
    node = _as_node(target)
    if node.kind not in (SCALAR, "raw-span"):
        return FALSE
    patterns = ctx.lexicons.dangerous_settings
    raw = node.raw or ""
    m = patterns.search(raw)
    if m:
        span = sub_span(node, m.start(), m.end())
        return Verdict(True, (Evidence(span, ctx.file.slice(span), "dangerous-setting"),), m.group(0))
    if key is None and isinstance(target, Field):
        key = target.key
    if key and node.value is not None and patterns.search(f"{key} {node.value}"):
        return Verdict(True, (ctx.evidence(node, "dangerous-setting"),), f"{key} {node.value}")
    return FALSE


def sensitive_settings(unit: Unit, ctx: PredicateContext) -> list[Verdict]:
    return [v for v in (is_sensitive_setting(f, ctx) for f in payload_fields(unit)) if v]


# -- dependencies --------------------------------------------------------------

def _scalar(node: ConfigNode | None) -> str | None:
    if node is None or node.kind != SCALAR:
        return None
    return node.value


def _split_inline(name: str, ecosystem: str) -> tuple[str, str | None]:
    m = _INLINE_SPEC.match(name.strip())
    if not m:
        return name.strip(), None
    op = m.group("op")
    version = m.group("ver").strip()
    if op in ("==", "="):
        return m.group("name"), version
    return m.group("name"), f"{op}{version}"


def _ansible_dependencies(unit: Unit) -> list[DependencyRef]:
    ecosystem = _ANSIBLE_DEPS.get(unit.module or "")
    params = unit.params()
    if ecosystem is None or params is None or params.kind != MAPPING:
        return []
    state = (_scalar(params.get("state")) or "").lower()
    if state in NOT_INSTALLED:
        return []
    version_node = params.get("version")
    version = _scalar(version_node)
    if state == "latest" and version is None:
        version = "latest"
    source = None
    for key in ("deb", "repo", "index_url", "extra_args"):
        value = _scalar(params.get(key))
        if value:
            m = re.search(r"(?:https?|git|ftp)://\S+", value)
            source = m.group(0) if m else value if key == "deb" else None
            if source:
                break
    name_node = params.get("name") or params.get("pkg")
    names: list[ConfigNode] = []
    if name_node is not None:
        names = name_node.children if name_node.kind == SEQUENCE else [name_node]
    out = []
    for node in names:
        if node.kind != SCALAR or not node.value or "{{" in node.value:
            continue
        raw_name = node.value
        if re.match(r"^(?:git\+|https?://|git://|git@)", raw_name):
            out.append(DependencyRef(raw_name, version, raw_name, ecosystem, node, version_node))
            continue
        name, inline = _split_inline(raw_name, ecosystem)
        ver = version if version is not None else inline
        out.append(DependencyRef(name, ver, source, ecosystem, node,
                                 version_node if version is not None else (node if inline else None)))
    return out


def _salt_dependencies(unit: Unit, ctx: PredicateContext) -> list[DependencyRef]:
    module = unit.module or ""
    base, _, func = module.partition(".")
    ecosystem = _SALT_DEPS.get(base)
    if ecosystem is None or func not in ("installed", "latest"):
        return []
    args = {f.path[1]: f for f in unit.fields if len(f.path) == 2 and f.path[0] == module}
    version_field = args.get("version")
    version = version_field.value if version_field else None
    if func == "latest" and version is None:
        version = "latest"
    version_node = version_field.node if version_field else None
    source = None
    for key in ("sources", "source", "index_url", "repo"):
        if key in args:
            source = args[key].value
            break
    out = []
    pkgs = [f for f in unit.fields if len(f.path) >= 2 and f.path[0] == module and f.path[1] == "pkgs"]
    if pkgs:
        for f in pkgs:
            if len(f.path) == 2:
                out.append(DependencyRef(f.value, None, source, ecosystem, f.node, None))
            else:  # - openssl: 1.0.1
                out.append(DependencyRef(f.path[2], f.value or None, source, ecosystem, f.node, f.node))
        return out
    name_field = args.get("name")
    if name_field is not None:
        name, name_node = name_field.value, name_field.node
    else:
        name, name_node = unit.label or "", None
    if not name or "{{" in name:
        return []
    name, inline = _split_inline(name, ecosystem)
    if version is None and inline is not None:
        version, version_node = inline, name_node
    if name_node is None:
        name_node = _salt_id_node(unit, ctx)
    return [DependencyRef(name, version, source, ecosystem, name_node, version_node)]


def _salt_id_node(unit: Unit, ctx: PredicateContext) -> ConfigNode:
    """Synthetic scalar over the state id, which names the package by default."""
    span = ctx.line_evidence(unit.node.span.start_line, "state-id").span
    text = ctx.file.slice(span)
    key_end = text.rfind(":") if text.rstrip().endswith(":") else len(text)
    span = ctx.index.span(span.start, span.start + len(text[:key_end].rstrip()))
    return ConfigNode(SCALAR, None, unit.label, span, unit.tool, raw=ctx.file.slice(span))


def _terraform_source_version(source: str | None) -> str | None:
    if source and "?ref=" in source:
        return source.split("?ref=", 1)[1].split("&")[0] or None
    return None


def _terraform_dependencies(unit: Unit) -> list[DependencyRef]:
    node = unit.node
    if unit.kind == "provider_requirement":
        if node.kind != MAPPING:
            return [DependencyRef(node.value or str(node.key), None, node.value, "terraform", node, None)]
        source_node, version_node = node.get("source"), node.get("version")
        name = _scalar(source_node) or str(node.key)
        return [DependencyRef(name, _scalar(version_node), None, "terraform",
                              source_node or node, version_node)]
    if unit.kind != "block":
        return []
    kind = (unit.label or "").split("/")
    if kind[0] == "module":
        source_node, version_node = node.get("source"), node.get("version")
        source = _scalar(source_node)
        if source is None or source.startswith(("./", "../", "/")):
            return []
        version = _scalar(version_node) or _terraform_source_version(source)
        is_url = "::" in source or "://" in source or source.startswith("git@")
        return [DependencyRef(source, version, source if is_url else None, "terraform",
                              source_node, version_node if version_node is not None else
                              (source_node if version else None))]
    if kind[0] == "provider" and node.get("version") is not None:
        version_node = node.get("version")
        name = kind[1] if len(kind) > 1 else "provider"
        return [DependencyRef(name, _scalar(version_node), None, "terraform", version_node, version_node)]
    return []


def _lexical_dependencies(unit: Unit, ctx: PredicateContext) -> list[DependencyRef]:
    head = unit.head
    if head is None:
        return []
    tool = unit.tool
    key = (head.key or "").strip()
    lines = {(line.key or "").split(".")[-1].strip("$@:").lower(): line for line in unit.lines[1:]}
    if tool is ToolKind.CHEF and key in _CHEF_DEPS and head.literal:
        action = lines.get("action")
        if action is not None and re.search(r":(?:remove|purge|uninstall)", action.raw):
            return []
        version_line = lines.get("version")
        source_line = lines.get("source")
        if version_line is None and lines.get("action") is not None and ":upgrade" in lines["action"].raw:
            version = "latest"
        else:
            version = version_line.literal if version_line is not None else None
        return [DependencyRef(head.literal, version, source_line.literal if source_line else None,
                              _CHEF_DEPS[key], head, version_line)]
    if tool is ToolKind.PUPPET and key == "package" and head.literal:
        ensure = lines.get("ensure")
        version = ensure.literal if ensure is not None else None
        version_node = ensure
        if version is not None and version.lower() in NOT_INSTALLED:
            return []
        if version is not None and version.lower() in ("present", "installed"):
            version_node = None if version.lower() == "present" else ensure
            version = None
        provider = lines.get("provider")
        ecosystem = _PUPPET_PROVIDERS.get((provider.literal or "").lower(), "generic") if provider else "generic"
        source = lines.get("source")
        return [DependencyRef(head.literal, version, source.literal if source else None, ecosystem,
                              head, version_node)]
    if tool is ToolKind.VAGRANT and key.endswith(".vm.box") and head.literal:
        version_line = source_line = None
        for line in ctx.file.root.children:
            k = line.key or ""
            if k.endswith(".vm.box_version"):
                version_line = line
            elif k.endswith(".vm.box_url"):
                source_line = line
        return [DependencyRef(head.literal, version_line.literal if version_line else None,
                              source_line.literal if source_line else None, "box", head, version_line)]
    if tool is ToolKind.PULUMI:
        out = []
        for line in unit.lines:
            m = _PULUMI_IMPORT.search(line.raw)
            if m:
                out.append(DependencyRef(m.group(1), None, None, "generic", line, None, pin_required=False))
        return out
    return []


def dependencies(unit: Unit, ctx: PredicateContext) -> list[DependencyRef]:
    if unit.kind == "group":
        return _lexical_dependencies(unit, ctx)
    if unit.tool is ToolKind.ANSIBLE and unit.kind == "task":
        return _ansible_dependencies(unit)
    if unit.tool is ToolKind.SALTSTACK:
        return _salt_dependencies(unit, ctx)
    if unit.tool is ToolKind.TERRAFORM:
        return _terraform_dependencies(unit)
    return []


def is_dependency(unit: Unit, ctx: PredicateContext) -> DependencyRef | None:
    deps = dependencies(unit, ctx)
    return deps[0] if deps else None


def lacks_version_locking(dep: DependencyRef) -> bool:
    if not dep.pin_required:
        return False
    version = (dep.version or "").strip()
    if version.lower() in LOCK_WORDS:
        return True
    if re.search(r"(?:^|[.\-])[*xX](?:$|[.\-])", version):
        return True
    constraints = [c.strip() for c in version.split(",") if c.strip()]
    lower = any(re.match(r"^(?:>=?|~>|\^|~(?!=))", c) for c in constraints)
    upper = any(re.match(r"^(?:<=?|=<)", c) for c in constraints)
    return lower and not upper


def _host(source: str) -> str | None:
    text = source
    for prefix in ("git::", "git+", "hg::", "s3::", "gcs::"):
        if text.startswith(prefix):
            text = text[len(prefix):]
    if text.startswith("git@"):
        return text[4:].split(":", 1)[0].lower()
    if "://" in text:
        return (urlparse(text).hostname or "").lower() or None
    first = text.split("/", 1)[0]
    return first.lower() if "." in first and "/" in text else None


def _is_git(source: str) -> bool:
    s = source.lower()
    return (s.startswith(("git::", "git+", "git@", "git://")) or ".git" in s.split("?")[0][-5:]
            or s.endswith(".git"))


def _git_pinned(source: str) -> bool:
    if "?ref=" in source or "#" in source:
        return True
    tail = source.split("://", 1)[-1]
    return "@" in tail.split("/", 1)[-1] if "/" in tail else False


def is_untrusted_source(dep: DependencyRef, ctx: PredicateContext) -> bool:
    source = (dep.source or "").strip()
    if not source:
        return False
    if source.lower().startswith("http://") or "::http://" in source.lower():
        return True
    if _is_git(source) and not _git_pinned(source):
        return True
    host = _host(source)
    if host is None:
        return False
    trusted = ctx.lexicons.trusted_registries
    return not any(host == t or host.endswith("." + t) for t in trusted)


def _advisories(dep: DependencyRef, ctx: PredicateContext) -> list[AdvisoryRecord]:
    version = dep.version
    if version is not None and not is_parseable(version):
        if (dep.ecosystem, dep.name) in ctx.advisory or ("generic", dep.name) in ctx.advisory:
            line = dep.anchor.span.start_line if dep.anchor is not None else None
            ctx.diagnostics.append(Diagnostic(
                f"version {version!r} of {dep.name} is not comparable; treated as unknown", line))
        version = None
    seen: dict[tuple, AdvisoryRecord] = {}
    for eco in dict.fromkeys((dep.ecosystem, "generic")):
        for record in ctx.advisory.query(eco, dep.name, version):
            seen.setdefault((record.advisory_id, record.eol, record.safe_below), record)
    return sorted(seen.values(), key=lambda r: (not r.is_vulnerability, r.advisory_id or "", r.ecosystem))


def is_outdated_version(dep: DependencyRef, ctx: PredicateContext) -> AdvisoryRecord | None:
    records = _advisories(dep, ctx)
    return records[0] if records else None


def has_known_vulnerabilities(dep: DependencyRef, ctx: PredicateContext) -> list[AdvisoryRecord]:
    return [r for r in _advisories(dep, ctx) if r.is_vulnerability]


# -- input, sinks and sanitization ----------------------------------------------

def interpolations(target: Field | ConfigNode, ctx: PredicateContext) -> list[Interpolation]:
    node = _as_node(target)
    return [i for i in interpolation_spans(node, ctx.file.tool) if i.variables]


def is_user_input(target: Field | ConfigNode, ctx: PredicateContext) -> Verdict:
    found = interpolations(target, ctx)
    if not found:
        return FALSE
    names = tuple(dict.fromkeys(v for i in found for v in i.variables))
    evidence = tuple(Evidence(i.span, ctx.file.slice(i.span), "interpolation") for i in found)
    return Verdict(True, evidence, names)


def _sink_key(key: str, sinks: frozenset[str]) -> bool:
    k = key.lower()
    return k in sinks or k.split(".")[-1] in sinks


def is_command_sink(f: Field, unit: Unit, ctx: PredicateContext) -> str | None:
    lex = ctx.lexicons
    node = f.node
    if is_meta(f, unit):
        return None
    if lex.code_sinks.search(node.raw or node.value or ""):
        return INTERPRETER
    sinks = lex.command_sinks
    if unit.kind == "group":
        if _sink_key(f.key, sinks):
            return OS_COMMAND
        head = unit.head
        head_sink = head is not None and (_sink_key(head.key or "", sinks)
                                          or (head.literal or "").lower() in sinks)
        if head_sink and (node is head or f.key in ("code", "heredoc")):
            return OS_COMMAND
        return None
    if unit.tool is ToolKind.TERRAFORM:
        segments = {s.lower() for part in f.path for s in part.split("/")}
        if segments & sinks and (f.key.lower() in TF_SINK_ARGS or f.key.lower() in sinks):
            return OS_COMMAND
        return None
    if not f.path:
        return None
    head = normalize_module(f.path[0])
    if head.lower() in sinks and (len(f.path) == 1 or f.path[1] in SINK_ARGS):
        return OS_COMMAND
    return None


def _data_regions(node: ConfigNode, ctx: PredicateContext) -> list[tuple[int, int]]:
    raw = node.raw or ""
    return [(m.start(), m.end()) for m in ctx.lexicons.data_contexts.finditer(raw)]


def in_data_context(interp: Interpolation, node: ConfigNode, ctx: PredicateContext) -> bool:
    end = interp.offset + len(interp.text)
    return any(s <= interp.offset and end <= e for s, e in _data_regions(node, ctx))


def _is_sanitized(interp: Interpolation, ctx: PredicateContext) -> bool:
    if ctx.lexicons.sanitizers.search(interp.text):
        return True
    validated = ctx.validated_variables
    return bool(interp.variables) and all(v in validated for v in interp.variables)


def unsanitized_interpolations(target: Field | ConfigNode, ctx: PredicateContext) -> list[Interpolation]:
    return [i for i in interpolations(target, ctx) if not _is_sanitized(i, ctx)]


def is_unsanitized(target: Field | ConfigNode, ctx: PredicateContext) -> Verdict:
    open_ = unsanitized_interpolations(target, ctx)
    if not open_:
        return FALSE
    names = tuple(dict.fromkeys(v for i in open_ for v in i.variables))
    evidence = tuple(Evidence(i.span, ctx.file.slice(i.span), "unsanitized") for i in open_)
    return Verdict(True, evidence, names)


def _masked_value(node: ConfigNode, ctx: PredicateContext) -> str:
    value = node.literal if node.kind == "raw-span" else node.value
    value = value or ""
    for i in interpolation_spans(node, ctx.file.tool):
        value = value.replace(i.text, "x")
    return value


def is_file_path(f: Field, ctx: PredicateContext) -> Verdict:
    if field_key(f) in ctx.lexicons.path_keys:
        return Verdict(True, (ctx.evidence(f.node, "path-key"),))
    value = _masked_value(f.node, ctx)
    if "/" in value and not re.search(r"\s", value) and "://" not in value:
        return Verdict(True, (ctx.evidence(f.node, "path-shape"),))
    return FALSE


def _validated_variables(ctx: PredicateContext) -> frozenset[str]:
    names: set[str] = set()
    tool = ctx.file.tool
    for unit in ctx.units:
        if tool is ToolKind.ANSIBLE and unit.module == "assert":
            for f in unit.fields_under("assert", "that"):
                names.update(expression_variables(f.value))
        elif tool is ToolKind.TERRAFORM and unit.kind == "block":
            label = (unit.label or "").split("/")
            if label[0] == "variable" and len(label) > 1 and unit.node.get("validation") is not None:
                names.update({label[1], f"var.{label[1]}"})
        elif unit.kind == "group":
            for line in unit.lines:
                if re.search(r"\b(?:validate_\w+|assert_type)\s*\(", line.raw):
                    names.update(m.group(1) for m in re.finditer(r"\$(?:::)?([a-z_]\w*)", line.raw))
    return frozenset(names)


# -- naming --------------------------------------------------------------------

def follows_nonstandard_convention(name: str, ctx: PredicateContext) -> Verdict:
    """Vague word, under three characters, or camelCase mixed with snake_case."""
    text = name.strip().strip("\"'")
    if not text or any(m in text for m in ("{{", "${", "#{", "$")):
        return FALSE
    if "/" in text or "\\" in text:
        text = re.split(r"[/\\]", text.rstrip("/\\"))[-1]
        text = os.path.splitext(text)[0] if not text.startswith(".") else text
        text = text.lstrip(".")
    if not text:
        return FALSE
    reason = None
    if text.lower() in ctx.lexicons.vague_names:
        reason = "vague-word"
    elif len(text) < 3:
        reason = "too-short"
    elif "_" in text and _CAMEL.search(text):
        reason = "mixed-style"
    return Verdict(reason is not None, (), reason)


@dataclass(frozen=True)
class NamedThing:
    name: str
    span: Span
    kind: str


def named_nodes(unit: Unit, ctx: PredicateContext) -> list[NamedThing]:
    out: list[NamedThing] = []
    tool = unit.tool
    if unit.kind == "group":
        head = unit.head
        for line in unit.lines:
            key = line.key or ""
            raw = line.raw
            if tool is ToolKind.PUPPET and key.startswith("$") and re.match(r"^\$\w+\s*=(?!=)", raw):
                out.append(NamedThing(key[1:], line.span, "variable"))
            elif tool is ToolKind.PULUMI and re.match(r"^(?:export\s+)?(?:const|let|var)\s+\w+\s*=", raw):
                out.append(NamedThing(key, line.span, "variable"))
        if head is not None and (head.key or "") in FILE_RESOURCES and head.literal and unit.tool is not ToolKind.PULUMI:
            out.append(NamedThing(head.literal, head.span, "path"))
        for line in unit.lines[1:]:
            k = (line.key or "").lower()
            if k in NAMING_PATH_KEYS and line.literal and line.tag == "string":
                out.append(NamedThing(line.literal, line.span, "path"))
        return out
    if tool is ToolKind.ANSIBLE:
        if unit.kind == "vars":
            return [NamedThing(str(c.key), c.span, "variable") for c in unit.node.children]
        for f in unit.fields:
            if f.path[:1] == ("vars",) and len(f.path) == 2:
                out.append(NamedThing(f.path[1], f.node.span, "variable"))
            elif f.path[:1] == ("set_fact",) and len(f.path) == 2:
                out.append(NamedThing(f.path[1], f.node.span, "variable"))
            elif f.path == ("register",):
                out.append(NamedThing(f.value, f.node.value_span, "register"))
            elif len(f.path) == 2 and f.path[0] == unit.module and f.path[1] in NAMING_PATH_KEYS:
                out.append(NamedThing(f.value, f.node.value_span, "path"))
        return out
    if tool is ToolKind.SALTSTACK:
        if unit.label:
            line = ctx.line_evidence(unit.node.span.start_line, "state-id").span
            out.append(NamedThing(unit.label, line, "state"))
        for f in unit.fields:
            if len(f.path) == 2 and f.path[1] in NAMING_PATH_KEYS:
                out.append(NamedThing(f.value, f.node.value_span, "path"))
        return out
    if tool is ToolKind.TERRAFORM:
        label = (unit.label or "").split("/")
        first_line = ctx.line_evidence(unit.node.span.start_line, "label").span
        if unit.kind == "block" and label[0] in ("resource", "data") and len(label) >= 3:
            out.append(NamedThing(label[2], first_line, "resource"))
        elif unit.kind == "block" and label[0] in ("variable", "output", "module") and len(label) >= 2:
            out.append(NamedThing(label[1], first_line, label[0]))
        elif unit.kind == "block" and label[0] == "locals":
            for child in unit.node.children:
                out.append(NamedThing(str(child.key), child.span, "local"))
        for f in unit.fields:
            if f.key in NAMING_PATH_KEYS and f.node.raw.startswith('"'):
                out.append(NamedThing(f.value, f.node.value_span, "path"))
    return out


# -- sensitive data ------------------------------------------------------------

def is_sensitive_data(name: str, ctx: PredicateContext) -> bool:
    return bool(name) and ctx.lexicons.sensitive_keys.search(name) is not None


def _is_literal_secret(node: ConfigNode, ctx: PredicateContext) -> bool:
    lex = ctx.lexicons
    if node.kind == "raw-span":
        if node.tag != "string":
            return False
        value = node.literal or ""
    elif node.kind == SCALAR:
        value = node.value or ""
        if ctx.file.tool is ToolKind.TERRAFORM and not node.raw.startswith(('"', "<<")):
            return False
    else:
        return False
    value = value.strip()
    if not value or (node.tag or "").endswith("vault"):
        return False
    if interpolation_spans(node, ctx.file.tool):
        return False
    if value.lower() in TRUTHY or value.lower() in ("false", "no", "off", "0", "~"):
        return False
    if _NUMBER.match(value):
        return False
    if lex.secret_refs.search(value) or lex.placeholders.search(value):
        return False
    return True


def _exposure_name(f: Field, unit: Unit) -> str:
    """Key-or-name a field is judged by."""
    if unit.tool is ToolKind.TERRAFORM and f.key in ("default", "value"):
        label = (unit.label or "").split("/")
        if label[0] in ("variable", "locals") and len(label) > 1:
            return label[1]
    if unit.kind == "group" and f.node.key in ("_", "heredoc", "template"):
        return ""
    return f.key


def _suppresses_logging(unit: Unit) -> bool:
    if unit.tool is ToolKind.ANSIBLE:
        node = unit.keyword("no_log")
        return node is not None and (node.value or "").lower() in TRUTHY
    if unit.tool is ToolKind.TERRAFORM:
        node = unit.node.get("sensitive") if unit.node.kind == MAPPING else None
        return node is not None and (node.value or "").lower() == "true"
    return False


def _log_references(f: Field, unit: Unit, ctx: PredicateContext) -> bool:
    names = [v for i in interpolation_spans(f.node, ctx.file.tool) for v in i.variables]
    if unit.tool is ToolKind.TERRAFORM:
        names += re.findall(r"\b(?:var|local|data|module)\.[\w.\-]+", f.node.raw or "")
    elif f.path and f.path[-1] == "var" or unit.kind == "group":
        names += list(expression_variables(f.node.raw or ""))
    return any(is_sensitive_data(n, ctx) for n in names)


def _is_log_construct(f: Field, unit: Unit) -> bool:
    if unit.tool is ToolKind.ANSIBLE:
        return unit.module == "debug" and f.path[:1] == ("debug",)
    if unit.tool is ToolKind.TERRAFORM:
        return (unit.label or "").startswith("output/") and f.key == "value"
    if unit.kind == "group":
        key = (f.node.key or "").lower()
        return key.split(".")[-1].split("::")[-1] in LOG_CALLS
    return False


def is_exposed(f: Field, unit: Unit, ctx: PredicateContext) -> Verdict:
    node = f.node
    name = _exposure_name(f, unit)
    if is_sensitive_data(name, ctx) and not name.lower().endswith(EXPOSURE_SUFFIXES):
        if _is_literal_secret(node, ctx):
            return Verdict(True, (ctx.evidence(node, "literal-secret", node.span),), "literal")
    if field_key(f) in CONTENT_KEYS or (unit.kind == "group" and node.key in ("heredoc", "template")):
        m = ctx.content_pattern.search(node.raw or "")
        if m:
            start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip(" \t|>-")))
            line_end = (node.raw or "").find("\n", start)
            end = len((node.raw or "").rstrip()) if line_end < 0 else line_end
            text = (node.raw or "")[start:end].rstrip()
            span = sub_span(node, start, start + len(text))
            return Verdict(True, (Evidence(span, ctx.file.slice(span), "plaintext-file"),), "plaintext-file")
    if _is_log_construct(f, unit) and not _suppresses_logging(unit) and _log_references(f, unit, ctx):
        return Verdict(True, (ctx.evidence(node, "logged"),), "log")
    return FALSE
