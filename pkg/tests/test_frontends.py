from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iacsmell.frontends import (
    MAPPING,
    RAW_SPAN,
    SCALAR,
    LineIndex,
    ToolKind,
    UnknownToolError,
    decode,
    detect_tool,
    interpolation_spans,
    parse,
    parse_file,
)
from iacsmell.frontends.hcl import HclParseError, parse_hcl


def _scalars(parsed):
    return [n for n in parsed.root.walk() if n.kind in (SCALAR, RAW_SPAN)]


def test_fig3_spans_point_at_values(fixtures):
    parsed = parse((fixtures / "fig3_playbook.yml").read_text(), "ansible", "fig3.yml")
    assert parsed.parse_mode == "structured"
    lines = {n.key: n.span.start_line for n in _scalars(parsed) if n.key in ("line", "version", "content")}
    assert lines == {"line": 8, "version": 21, "content": 50}
    for node in _scalars(parsed):
        raw = parsed.slice(node.value_span)
        if "\n" not in raw and "\\" not in raw:
            assert raw.strip("'\"") == node.value


@pytest.mark.parametrize("path,content,tool", [
    ("site.yml", "- hosts: all\n  tasks: []\n", ToolKind.ANSIBLE),
    ("roles/web/tasks/main.yml", "- apt: name=x\n", ToolKind.ANSIBLE),
    ("init.sls", "nginx:\n  pkg.installed: []\n", ToolKind.SALTSTACK),
    ("main.tf", "", ToolKind.TERRAFORM),
    ("site.pp", "", ToolKind.PUPPET),
    ("recipes/default.rb", "package 'x'\n", ToolKind.CHEF),
    ("Vagrantfile", "Vagrant.configure('2') do |c|\nend\n", ToolKind.VAGRANT),
    ("Pulumi.dev.yaml", "config: {}\n", ToolKind.PULUMI),
    ("index.ts", "import * as pulumi from '@pulumi/pulumi';\n", ToolKind.PULUMI),
])
def test_detect_tool(path, content, tool):
    assert detect_tool(path, content) is tool


def test_unknown_yaml_needs_override():
    with pytest.raises(UnknownToolError, match="--tool"):
        detect_tool("data.yml", "a: 1\n")


def test_broken_yaml_falls_back_to_lexical():
    parsed = parse("- name: x\n  shell: \"echo {{ a }}\n  bad: [\n", "ansible")
    assert parsed.parse_mode == "lexical"
    assert any("lexical" in d.message for d in parsed.diagnostics)


def test_jinja_block_inside_yaml_is_tolerated():
    text = "- name: t\n  shell: echo {{ item }}\n  loop: \"{{ things }}\"\n"
    parsed = parse(text, "ansible")
    assert parsed.parse_mode == "structured"
    shell = [n for n in _scalars(parsed) if n.key == "shell"][0]
    assert shell.value == "echo {{ item }}"


def test_hcl_blocks_and_labels():
    root = parse_hcl('resource "aws_instance" "web" {\n  ami = "ami-1"\n  tags = { Name = "x" }\n}\n')
    block = root.children[0]
    assert block.kind == MAPPING and block.key == "resource/aws_instance/web"
    assert block.get("ami").value == "ami-1"


def test_hcl_error_has_line():
    with pytest.raises(HclParseError) as exc:
        parse_hcl('resource "a" {\n  x = \n')
    assert exc.value.line is not None


def test_lossy_decode_reports_diagnostic():
    text, diags = decode(b"- name: caf\xe9\n")
    assert "\ufffd" in text and diags
    parsed = parse_file("x.yml", b"- hosts: all\n  tasks: []\n\xff\n", "ansible")
    assert parsed.diagnostics


def test_interpolation_variables():
    parsed = parse('- shell: "cp {{ src_dir }}/{{ name | quote }} /tmp"\n', "ansible")
    node = [n for n in _scalars(parsed) if n.key == "shell"][0]
    found = interpolation_spans(node, ToolKind.ANSIBLE, [])
    assert [i.variable for i in found] == ["src_dir", "name"]
    for i in found:
        assert parsed.slice(i.span) == i.text


def test_brace_count_matches_interpolations():
    text = '- command: "run {{ a }} {{ b }} {{ c }}"\n'
    parsed = parse(text, "ansible")
    node = [n for n in _scalars(parsed) if n.key == "command"][0]
    assert len(interpolation_spans(node, ToolKind.ANSIBLE, [])) == node.value.count("{{")


_word = st.from_regex(r"[a-z][a-z_]{0,8}", fullmatch=True)
_value = st.one_of(
    _word,
    st.builds(lambda w, v: f"{w} {{{{ {v} }}}}", _word, _word),
    st.builds(lambda w: f"'{w} x'", _word),
    st.integers(0, 999).map(str),
)


@st.composite
def task_files(draw):
    tasks = []
    for _ in range(draw(st.integers(1, 4))):
        module = draw(_word)
        params = draw(st.dictionaries(_word, _value, min_size=1, max_size=4))
        body = "".join(f"    {k}: {v if not v.count('{') else repr(v).replace(chr(39), chr(34))}\n"
                       for k, v in params.items())
        tasks.append(f"- name: {draw(_word)}\n  {module}_m:\n{body}")
    return "".join(tasks)


@settings(max_examples=60, deadline=None)
@given(task_files())
def test_span_soundness(text):
    parsed = parse(text, "ansible")
    assert parsed.parse_mode == "structured"
    index = LineIndex(text)
    for node in parsed.root.walk():
        s = node.span
        assert 0 <= s.start <= s.end <= len(text)
        assert index.position(s.start) == (s.start_line, s.start_col)
        assert index.position(s.end) == (s.end_line, s.end_col)
        for child in node.children:
            assert s.contains(child.span)
        if node.value_span is not None:
            assert s.contains(node.value_span)


@settings(max_examples=60, deadline=None)
@given(task_files())
def test_interpolation_count_invariant(text):
    parsed = parse(text, "ansible")
    for node in _scalars(parsed):
        found = interpolation_spans(node, ToolKind.ANSIBLE, [])
        assert len(found) == (node.value or "").count("{{")
        for i in found:
            assert node.value_span.contains(i.span)
