"""Split a parsed file into analysis units (tasks, states, blocks, line groups).

Predicates are node-local with sibling scope; a unit is that scope. Each unit
exposes its leaf scalars as fields with a key path relative to the unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frontends.model import MAPPING, RAW_SPAN, SCALAR, SEQUENCE, ConfigNode, ParsedFile, Span, ToolKind

TASK_KEYWORDS = frozenset({
    "name", "hosts", "become", "become_user", "become_method", "become_flags", "become_exe",
    "when", "loop", "loop_control", "register", "tags", "notify", "vars", "environment",
    "ignore_errors", "ignore_unreachable", "changed_when", "failed_when", "until", "retries",
    "delay", "delegate_to", "delegate_facts", "run_once", "no_log", "args", "check_mode", "diff",
    "any_errors_fatal", "block", "rescue", "always", "listen", "connection", "gather_facts",
    "throttle", "timeout", "module_defaults", "collections", "debugger", "vars_files",
    "remote_user", "port", "async", "poll", "local_action", "action",
})
PLAY_KEYS = frozenset({"hosts", "tasks", "pre_tasks", "post_tasks", "handlers", "roles", "import_playbook"})
TASK_LISTS = ("pre_tasks", "tasks", "post_tasks", "handlers")
BLOCK_LISTS = ("block", "rescue", "always")
SALT_RESERVED = frozenset({"include", "exclude", "extend"})


def normalize_module(key: str) -> str:
    """Fully qualified ansible names (ns.collection.module) reduce to the module."""
    parts = key.split(".")
    return parts[-1] if len(parts) >= 3 else key


@dataclass
class Field:
    path: tuple[str, ...]
    node: ConfigNode

    @property
    def key(self) -> str:
        return self.path[-1] if self.path else ""

    @property
    def value(self) -> str:
        return self.node.value or ""


@dataclass
class Unit:
    tool: ToolKind
    kind: str
    node: ConfigNode
    module: str | None
    fields: list[Field] = field(default_factory=list)
    # Lexical units: the statement lines of the group, first line is the head.
    lines: list[ConfigNode] = field(default_factory=list)
    label: str | None = None

    @property
    def span(self) -> Span:
        if self.lines:
            first, last = self.lines[0].span, self.lines[-1].span
            return Span(first.start, last.end, first.start_line, first.start_col,
                        last.end_line, last.end_col)
        return self.node.span

    @property
    def head(self) -> ConfigNode | None:
        return self.lines[0] if self.lines else None

    def field_at(self, *path: str) -> Field | None:
        for f in self.fields:
            if f.path == path:
                return f
        return None

    def fields_under(self, *prefix: str) -> list[Field]:
        n = len(prefix)
        return [f for f in self.fields if f.path[:n] == prefix]

    def params(self) -> ConfigNode | None:
        """Argument node of the module for structured units."""
        if self.kind != "task":
            return None
        for child in self.node.children:
            if child.key is not None and normalize_module(child.key) == self.module:
                return child
        return None

    def keyword(self, key: str) -> ConfigNode | None:
        return self.node.get(key) if self.node.kind == MAPPING else None


def flatten(node: ConfigNode, prefix: tuple[str, ...] = ()) -> list[Field]:
    """Leaf scalars under ``node``; sequence items inherit their parent's path."""
    out: list[Field] = []
    if node.kind in (SCALAR, RAW_SPAN):
        out.append(Field(prefix, node))
        return out
    for child in node.children:
        path = prefix + (str(child.key),) if node.kind == MAPPING else prefix
        out.extend(flatten(child, path))
    return out


# -- ansible -------------------------------------------------------------------

def _is_play(node: ConfigNode) -> bool:
    return node.kind == MAPPING and any(c.key in PLAY_KEYS for c in node.children)


def _task_module(node: ConfigNode) -> str | None:
    for child in node.children:
        if child.key is not None and child.key not in TASK_KEYWORDS:
            return normalize_module(child.key)
    for key in ("action", "local_action"):
        child = node.get(key)
        if child is not None:
            if child.kind == SCALAR and child.value:
                return normalize_module(child.value.split()[0])
            if child.kind == MAPPING and child.get("module") is not None:
                return normalize_module(child.get("module").value or "")
    return None


def _task_fields(node: ConfigNode) -> list[Field]:
    out = []
    for child in node.children:
        key = str(child.key)
        head = normalize_module(key) if key not in TASK_KEYWORDS else key
        out.extend(flatten(child, (head,)))
    return out


def _ansible_tasks(seq: ConfigNode, tool: ToolKind, out: list[Unit]) -> None:
    if seq.kind != SEQUENCE:
        return
    for item in seq.children:
        if item.kind != MAPPING:
            continue
        if any(item.get(k) is not None for k in BLOCK_LISTS):
            vars_node = item.get("vars")
            if vars_node is not None and vars_node.kind == MAPPING:
                out.append(Unit(tool, "vars", vars_node, "vars", flatten(vars_node, ("vars",))))
            for k in BLOCK_LISTS:
                child = item.get(k)
                if child is not None:
                    _ansible_tasks(child, tool, out)
            continue
        name = item.get("name")
        out.append(Unit(tool, "task", item, _task_module(item), _task_fields(item),
                        label=name.value if name is not None else None))


def _ansible_units(root: ConfigNode, tool: ToolKind) -> list[Unit]:
    out: list[Unit] = []
    if root.kind == MAPPING:
        if root.children:
            out.append(Unit(tool, "vars", root, "vars", flatten(root, ())))
        return out
    if root.kind != SEQUENCE:
        return out
    if root.children and all(_is_play(c) or c.kind != MAPPING for c in root.children):
        for play in root.children:
            if play.kind != MAPPING:
                continue
            vars_node = play.get("vars")
            if vars_node is not None and vars_node.kind == MAPPING:
                out.append(Unit(tool, "vars", vars_node, "vars", flatten(vars_node, ("vars",))))
            for key in TASK_LISTS:
                child = play.get(key)
                if child is not None:
                    _ansible_tasks(child, tool, out)
        return out
    # task file, or a multi-document stream whose documents are plays
    for item in root.children:
        if item.kind == SEQUENCE:
            out.extend(_ansible_units(item, tool))
    rest = ConfigNode(SEQUENCE, None, None, root.span, tool,
                      [c for c in root.children if c.kind == MAPPING and not _is_play(c)])
    _ansible_tasks(rest, tool, out)
    plays = [c for c in root.children if _is_play(c)]
    if plays:
        out.extend(_ansible_units(ConfigNode(SEQUENCE, None, None, root.span, tool, plays), tool))
    out.sort(key=lambda u: u.span.start)
    return out


# -- saltstack -----------------------------------------------------------------

def _salt_state(state_id: str, body: ConfigNode, tool: ToolKind) -> Unit:
    module = None
    fields: list[Field] = []
    for child in body.children:
        key = str(child.key)
        func = key
        if "." not in key and child.kind == SEQUENCE:
            bare = [c for c in child.children if c.kind == SCALAR]
            if bare:
                func = f"{key}.{bare[0].value}"
        if module is None and not key.startswith("__"):
            module = func
        if child.kind == SEQUENCE:
            for item in child.children:
                if item.kind == SCALAR:
                    continue
                fields.extend(flatten(item, (func,)) if item.kind == MAPPING else [])
        elif child.kind == MAPPING:
            fields.extend(flatten(child, (func,)))
        else:
            fields.append(Field((func,), child))
    return Unit(tool, "state", body, module, fields, label=state_id)


def _salt_units(root: ConfigNode, tool: ToolKind) -> list[Unit]:
    out: list[Unit] = []
    docs = root.children if root.kind == SEQUENCE else [root]
    for doc in docs:
        if doc.kind != MAPPING:
            continue
        for child in doc.children:
            if child.key in SALT_RESERVED:
                if child.key == "extend" and child.kind == MAPPING:
                    out.extend(_salt_state(str(c.key), c, tool) for c in child.children
                               if c.kind == MAPPING)
                continue
            if child.kind == MAPPING:
                out.append(_salt_state(str(child.key), child, tool))
            elif child.kind == SCALAR and child.value and "." in child.value:
                # shorthand "id: pkg.installed"
                out.append(Unit(tool, "state", child, child.value, [], label=str(child.key)))
    return out


# -- terraform -----------------------------------------------------------------

def _terraform_units(root: ConfigNode, tool: ToolKind) -> list[Unit]:
    out: list[Unit] = []
    for child in root.children:
        key = str(child.key)
        if child.kind == MAPPING:
            out.append(Unit(tool, "block", child, key.split("/")[0], flatten(child, ()), label=key))
            if key == "terraform":
                req = child.get("required_providers")
                if req is not None and req.kind == MAPPING:
                    for entry in req.children:
                        fields = flatten(entry, ()) if entry.kind == MAPPING else [Field(("source",), entry)]
                        out.append(Unit(tool, "provider_requirement", entry, "required_provider",
                                        fields, label=str(entry.key)))
        else:
            out.append(Unit(tool, "attribute", child, "attribute", [Field((key,), child)], label=key))
    return out


# -- lexical -------------------------------------------------------------------

def _lexical_units(root: ConfigNode, tool: ToolKind) -> list[Unit]:
    groups: dict[int, list[ConfigNode]] = {}
    for line in root.children:
        groups.setdefault(line.group if line.group is not None else -1, []).append(line)
    out = []
    for gid in sorted(groups):
        lines = groups[gid]
        head = lines[0]
        fields = [Field((str(line.key),), line) for line in lines]
        out.append(Unit(tool, "group", head, head.key, fields, lines=lines, label=head.literal))
    return out


def build_units(parsed: ParsedFile) -> list[Unit]:
    tool = parsed.tool
    if parsed.parse_mode == "lexical":
        return _lexical_units(parsed.root, tool)
    if tool is ToolKind.ANSIBLE:
        return _ansible_units(parsed.root, tool)
    if tool is ToolKind.SALTSTACK:
        return _salt_units(parsed.root, tool)
    if tool is ToolKind.TERRAFORM:
        return _terraform_units(parsed.root, tool)
    return []
