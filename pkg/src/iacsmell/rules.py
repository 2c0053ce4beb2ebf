"""The ten detection rules, composed from predicates, and the Finding type."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable

from .frontends.model import ParsedFile, Span
from .predicates import (
    INTERPRETER,
    OS_COMMAND,
    Evidence,
    PredicateContext,
    dependencies,
    follows_nonstandard_convention,
    has_known_vulnerabilities,
    in_data_context,
    is_command_sink,
    is_config_file,
    is_exposed,
    is_file_path,
    is_outdated_version,
    is_unsanitized,
    is_untrusted_source,
    is_user_input,
    lacks_version_locking,
    named_nodes,
    payload_fields,
    sensitive_settings,
    unsanitized_interpolations,
)
from .taxonomy import TOP10_IDS, default_taxonomy

ICM = "insecure-configuration-management"
IDM = "insecure-dependency-management"
IIH = "insecure-input-handling"
OD = "outdated-dependencies"
PT = "path-traversal"
CI = "command-injection"
CODEI = "code-injection"
OSV = "outdated-software-version"
NAMING = "inadequate-naming-convention"
SIE = "sensitive-information-exposure"

SEVERITIES = ("low", "medium", "high")


class UnknownRuleError(KeyError):
    def __init__(self, rule_id: str):
        self.rule_id = rule_id
        super().__init__(f"unknown rule {rule_id!r}; valid ids: {', '.join(sorted(RULES))}")

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class Rule:
    id: str
    name: str
    cwe: str
    severity: str
    condition: str
    original_condition: str
    remediation: str
    note: str = ""


RULES: dict[str, Rule] = {r.id: r for r in (
    Rule(ICM, "Insecure Configuration Management", "CWE-306", "high",
         "is_config_file(unit) AND is_sensitive_setting(field)",
         "isConfigFile(x) AND isSensitiveSetting(x) AND isDefaultSetting(x)",
         "Harden the setting (e.g. PermitRootLogin no, sudo rules without NOPASSWD:ALL, "
         "restrictive file modes).",
         "Default-setting checks are folded into the dangerous-settings lexicon."),
    Rule(IDM, "Insecure Dependency Management", "CWE-1104", "medium",
         "is_dependency(x) AND (lacks_version_locking(x) OR is_untrusted_source(x)) "
         "AND NOT (outdated-dependencies OR outdated-software-version on x)",
         "isDependency(x) AND lacksVersionLocking(x) AND isUntrustedSource(x)",
         "Pin an exact version and install from a trusted registry over TLS; pin git refs.",
         "The conjunction is relaxed to a disjunction so that an unpinned package from the "
         "default registry is reported. Suppressed when an outdated-version rule already "
         "reports the same dependency."),
    Rule(IIH, "Insecure Input Handling", "CWE-20", "medium",
         "is_user_input(field) AND is_unsanitized(field) AND (is_command_sink(field) OR "
         "is_file_path(field)) AND no command-injection, code-injection or path-traversal "
         "finding on field",
         "isUserInput(x) AND isUnsanitized(x) AND isExploitable(x)",
         "Validate the input (assert, validate_*, validation blocks) or coerce it with a "
         "filter such as | int before use.",
         "Exploitability means the interpolated value reaches a command or path in the same "
         "unit. Input used only in arithmetic expansion lands here instead of command injection."),
    Rule(OD, "Outdated Dependencies", "CWE-1104", "high",
         "is_dependency(x) AND is_outdated_version(x.version) AND has_known_vulnerabilities(x)",
         "isDependency(x) AND isOutdatedVersion(x.version) AND hasKnownVulnerabilities(x)",
         "Upgrade to a release at or above the advisory's fixed version."),
    Rule(PT, "Path Traversal", "CWE-22", "high",
         "is_file_path(field) AND is_user_input(field) AND is_unsanitized(field)",
         "isFilePath(x) AND isUserInput(x.value) AND isUnsanitized(x.value)",
         "Use fixed paths or validate the variable against an allowlist of directories."),
    Rule(CI, "Command Injection", "CWE-77", "high",
         "is_command_sink(field) = os-command AND is_user_input(field) AND is_unsanitized(field) "
         "AND some unsanitized interpolation lies outside a data context",
         "isCommand(x) AND isUserInput(x) AND isUnsanitized(x)",
         "Quote interpolated values (| quote, shellescape) or pass arguments as a list.",
         "Shares its condition with code injection; separated by sink kind (operating-system "
         "command here)."),
    Rule(CODEI, "Code Injection", "CWE-94", "high",
         "is_command_sink(field) = interpreter AND is_user_input(field) AND is_unsanitized(field)",
         "isCommand(x) AND isUserInput(x) AND isUnsanitized(x)",
         "Never hand user input to eval, python -c, ruby -e or pipe lookups.",
         "Shares its condition with command injection; separated by sink kind (interpreter "
         "or eval here)."),
    Rule(OSV, "Outdated Software Version", "CWE-1104", "medium",
         "is_dependency(x) AND is_outdated_version(x.version) AND NOT has_known_vulnerabilities(x)",
         "isDependency(x) AND isOutdatedVersion(x.version)",
         "Replace end-of-life software with a maintained release.",
         "Records with a concrete vulnerability go to outdated-dependencies instead."),
    Rule(NAMING, "Inadequate Naming Convention", "CWE-710", "low",
         "named(x) AND follows_nonstandard_convention(x.name)",
         "followsNonStandardConvention(x) AND reducesReadability(x)",
         "Use descriptive, consistently styled names.",
         "Readability reduction is expressed by the convention reason code."),
    Rule(SIE, "Sensitive Information Exposure", "CWE-256", "high",
         "is_sensitive_data(key or content) AND is_exposed(field)",
         "isSensitiveData(x.name) AND isExposed(x)",
         "Keep secrets in a vault or secret manager and suppress logging of sensitive values."),
)}


def verify_registry(taxonomy=None) -> None:
    taxonomy = taxonomy or default_taxonomy()
    bound = {c.id for c in taxonomy if c.rule_bound}
    if bound != set(RULES) or set(TOP10_IDS) != set(RULES):
        raise RuntimeError(f"rule registry {sorted(RULES)} does not match taxonomy {sorted(bound)}")
    for rule in RULES.values():
        if rule.cwe not in taxonomy.get(rule.id).cwes:
            raise RuntimeError(f"rule {rule.id} CWE {rule.cwe} not in taxonomy")


verify_registry()


def fingerprint(rule_id: str, snippet: str, path: str) -> str:
    normalized = " ".join(snippet.split())
    return hashlib.sha256(f"{rule_id}\x00{normalized}\x00{path}".encode("utf-8")).hexdigest()[:24]


@dataclass(frozen=True)
class Finding:
    rule_id: str
    category: str
    cwe: str
    path: str
    span: Span
    snippet: str
    message: str
    severity: str
    evidence: tuple[Evidence, ...] = field(default=(), compare=False)
    fingerprint: str = ""

    @property
    def line(self) -> int:
        return self.span.start_line

    def sort_key(self) -> tuple:
        return (self.path, self.span.start, self.rule_id)

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "category": self.category,
            "cwe": self.cwe,
            "severity": self.severity,
            "path": self.path,
            "span": self.span.to_dict(),
            "snippet": self.snippet,
            "message": self.message,
            "evidence": [e.to_dict() for e in self.evidence],
            "fingerprint": self.fingerprint,
        }

    def to_text(self) -> str:
        return f"{self.path}:{self.span.start_line}:{self.span.start_col + 1} [{self.rule_id}/{self.cwe}] {self.message}"


class _Collector:
    def __init__(self, file: ParsedFile):
        self.file = file
        self.found: dict[tuple[str, int, int], Finding] = {}

    def add(self, rule_id: str, span: Span, message: str, evidence: Iterable[Evidence] = ()) -> None:
        key = (rule_id, span.start, span.end)
        if key in self.found:
            return
        rule = RULES[rule_id]
        snippet = self.file.slice(span)
        self.found[key] = Finding(rule_id, rule.name, rule.cwe, self.file.path, span, snippet,
                                  f"{rule.name}: {message}", rule.severity, tuple(evidence),
                                  fingerprint(rule_id, snippet, self.file.path))


def _short(text: str, limit: int = 60) -> str:
    text = " ".join(text.split())
    return text if len(text) <= limit else text[: limit - 3] + "..."


def evaluate(file: ParsedFile, ctx: PredicateContext | None = None,
             rules: Iterable[str] | None = None) -> list[Finding]:
    """All findings for one parsed file, ordered by (path, span start, rule id)."""
    ctx = ctx or PredicateContext(file)
    out = _Collector(file)
    for unit in ctx.units:
        config = is_config_file(unit, ctx)
        if config:
            for setting in sensitive_settings(unit, ctx):
                ev = setting.evidence[0]
                out.add(ICM, ev.span, f"dangerous setting '{_short(ev.text)}' in a configuration target",
                        config.evidence + setting.evidence)

        for dep in dependencies(unit, ctx):
            anchor = dep.anchor
            if anchor is None:
                continue
            span = anchor.value_span
            record = is_outdated_version(dep, ctx)
            if record is not None:
                vulns = has_known_vulnerabilities(dep, ctx)
                ev = (ctx.evidence(anchor, "advisory"),)
                if vulns:
                    ids = ", ".join(r.advisory_id for r in vulns if r.advisory_id)
                    out.add(OD, span, f"{dep.name} {dep.version or ''} is affected by {ids}".replace("  ", " "), ev)
                else:
                    out.add(OSV, span, f"{dep.name} is end-of-life or below the maintained version", ev)
                continue
            unpinned = lacks_version_locking(dep)
            untrusted = is_untrusted_source(dep, ctx)
            if unpinned or untrusted:
                why = []
                if unpinned:
                    why.append(f"version not locked ({dep.version or 'none'})")
                if untrusted:
                    why.append(f"untrusted source {dep.source}")
                out.add(IDM, span, f"{dep.name}: " + "; ".join(why), (ctx.evidence(anchor, "dependency"),))

        for f in payload_fields(unit):
            user = is_user_input(f, ctx)
            if user:
                unsanitized = is_unsanitized(f, ctx)
                sink = is_command_sink(f, unit, ctx)
                path = is_file_path(f, ctx)
                fired = False
                names = ", ".join(unsanitized.detail or ())
                if unsanitized:
                    span = f.node.value_span
                    if sink == INTERPRETER:
                        out.add(CODEI, span, f"unsanitized input ({names}) evaluated as code", unsanitized.evidence)
                        fired = True
                    elif sink == OS_COMMAND and any(
                            not in_data_context(i, f.node, ctx) for i in unsanitized_interpolations(f, ctx)):
                        out.add(CI, span, f"unsanitized input ({names}) in a system command", unsanitized.evidence)
                        fired = True
                    if path:
                        out.add(PT, span, f"unsanitized input ({names}) used as a file path",
                                path.evidence + unsanitized.evidence)
                        fired = True
                    if not fired and (sink or path):
                        out.add(IIH, span, f"input ({names}) used without validation", unsanitized.evidence)
            exposed = is_exposed(f, unit, ctx)
            if exposed:
                ev = exposed.evidence[0]
                kind = {"literal": "hard-coded secret", "plaintext-file": "credentials written to a plaintext file",
                        "log": "sensitive value sent to logs"}[exposed.detail]
                out.add(SIE, ev.span, f"{kind}: '{_short(ev.text)}'", exposed.evidence)

        for thing in named_nodes(unit, ctx):
            verdict = follows_nonstandard_convention(thing.name, ctx)
            if verdict:
                out.add(NAMING, thing.span, f"{thing.kind} name '{_short(thing.name)}' ({verdict.detail})",
                        (Evidence(thing.span, file.slice(thing.span), verdict.detail),))

    findings = sorted(out.found.values(), key=Finding.sort_key)
    if rules is not None:
        enabled = set(rules)
        findings = [f for f in findings if f.rule_id in enabled]
    return findings


@dataclass(frozen=True)
class RuleCard:
    rule: Rule
    cwe_name: str
    description: str

    def render(self) -> str:
        r = self.rule
        lines = [
            f"{r.id}  ({r.name})",
            f"  CWE:           {r.cwe} {self.cwe_name}".rstrip(),
            f"  Severity:      {r.severity}",
            f"  Condition:     {r.condition}",
            f"  Original form: {r.original_condition}",
            f"  Remediation:   {r.remediation}",
        ]
        if r.note:
            lines.append(f"  Note:          {r.note}")
        if self.description:
            lines.append(f"  About:         {self.description}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        r = self.rule
        return {
            "id": r.id, "name": r.name, "cwe": r.cwe, "cwe_name": self.cwe_name, "severity": r.severity,
            "condition": r.condition, "original_condition": r.original_condition,
            "remediation": r.remediation, "note": r.note, "description": self.description,
        }


CWE_NAMES = {
    "CWE-306": "Missing Authentication for Critical Function",
    "CWE-1104": "Use of Unmaintained Third Party Components",
    "CWE-20": "Improper Input Validation",
    "CWE-22": "Improper Limitation of a Pathname to a Restricted Directory",
    "CWE-77": "Command Injection",
    "CWE-94": "Improper Control of Generation of Code",
    "CWE-710": "Improper Adherence to Coding Standards",
    "CWE-256": "Unprotected Storage of Credentials",
}


def explain(rule_id: str, taxonomy=None) -> RuleCard:
    if rule_id not in RULES:
        raise UnknownRuleError(rule_id)
    taxonomy = taxonomy or default_taxonomy()
    category = taxonomy.get(rule_id)
    rule = RULES[rule_id]
    return RuleCard(rule, CWE_NAMES.get(rule.cwe, ""), category.description if category else "")
