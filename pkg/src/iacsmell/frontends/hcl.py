"""HCL-subset parser for Terraform: blocks, attributes, strings, heredocs, objects.

Expressions other than string literals, heredocs and object literals are kept
as opaque scalars; rules only need keys, literal values and interpolations.
"""

from __future__ import annotations

import re

from .model import MAPPING, SCALAR, ConfigNode, LineIndex, Span, ToolKind

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-.]*")
_HEREDOC = re.compile(r"<<(-?)([A-Za-z_][A-Za-z0-9_]*)[ \t]*\n")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}
_CLOSERS = {"(": ")", "[": "]", "{": "}"}


class HclParseError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.index = LineIndex(text)
        self.tool = ToolKind.TERRAFORM

    # -- helpers ---------------------------------------------------------
    def error(self, message: str, pos: int | None = None) -> HclParseError:
        line, _ = self.index.position(self.pos if pos is None else pos)
        return HclParseError(message, line)

    def peek(self, n: int = 1) -> str:
        return self.text[self.pos:self.pos + n]

    def skip_inline(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r":
            self.pos += 1

    def skip_trivia(self) -> None:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n,":
                self.pos += 1
            elif ch == "#" or text.startswith("//", self.pos):
                nl = text.find("\n", self.pos)
                self.pos = len(text) if nl < 0 else nl
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise self.error("unterminated block comment")
                self.pos = end + 2
            else:
                break

    def span(self, start: int, end: int) -> Span:
        return self.index.span(start, end)

    # -- grammar -----------------------------------------------------------
    def body(self, closing: str | None) -> list[ConfigNode]:
        items = []
        while True:
            self.skip_trivia()
            if self.pos >= len(self.text):
                if closing:
                    raise self.error(f"missing '{closing}'")
                return items
            if closing and self.peek() == closing:
                return items
            items.append(self.item())

    def key_token(self) -> tuple[str, int]:
        start = self.pos
        if self.peek() == '"':
            _, value = self.string()
            return value, start
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error(f"unexpected character {self.peek()!r}")
        self.pos = m.end()
        return m.group(0), start

    def item(self) -> ConfigNode:
        name, start = self.key_token()
        self.skip_inline()
        ch = self.peek()
        if ch in ("=", ":") and self.peek(2) != "==":
            self.pos += 1
            value = self.expression()
            value.key = name
            value.span = self.span(start, value.value_span.end)
            return value
        labels = [name]
        while True:
            self.skip_inline()
            ch = self.peek()
            if ch == '"':
                _, label = self.string()
                labels.append(label)
            elif ch == "{":
                break
            else:
                m = _IDENT.match(self.text, self.pos)
                if not m:
                    raise self.error(f"expected block body for {name!r}")
                labels.append(m.group(0))
                self.pos = m.end()
        open_pos = self.pos
        self.pos += 1
        children = self.body("}")
        self.pos += 1
        value_span = self.span(open_pos, self.pos)
        return ConfigNode(MAPPING, "/".join(labels), None, self.span(start, self.pos), self.tool,
                          children, value_span=value_span, raw=self.text[open_pos:self.pos])

    def string(self) -> tuple[int, str]:
        """Consume a double-quoted template; returns (start, decoded value)."""
        text = self.text
        start = self.pos
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(text) or text[self.pos] == "\n":
                raise self.error("unterminated string", start)
            ch = text[self.pos]
            if ch == "\\" and self.pos + 1 < len(text):
                out.append(_ESCAPES.get(text[self.pos + 1], text[self.pos + 1]))
                self.pos += 2
            elif ch == '"':
                self.pos += 1
                return start, "".join(out)
            elif text.startswith("${", self.pos) or text.startswith("%{", self.pos):
                inner_start = self.pos
                self.pos += 2
                self.balanced("}")
                out.append(text[inner_start:self.pos])
            else:
                out.append(ch)
                self.pos += 1

    def balanced(self, closer: str) -> None:
        """Advance past ``closer`` honouring nesting and strings."""
        text = self.text
        stack = [closer]
        start = self.pos
        while stack:
            if self.pos >= len(text):
                raise self.error(f"unbalanced '{closer}'", start)
            ch = text[self.pos]
            if ch == '"':
                self.string()
                continue
            if ch in _CLOSERS:
                stack.append(_CLOSERS[ch])
            elif ch == stack[-1]:
                stack.pop()
            elif ch in ")]}":
                raise self.error(f"mismatched {ch!r}")
            self.pos += 1

    def expression(self) -> ConfigNode:
        self.skip_inline()
        text = self.text
        start = self.pos
        m = _HEREDOC.match(text, self.pos)
        if m:
            return self.heredoc(m)
        if self.peek() == "{":
            return self.object()
        if self.peek() == '"':
            _, value = self.string()
            if self._at_expression_end():
                end = self.pos
                return ConfigNode(SCALAR, None, value, self.span(start, end), self.tool,
                                  raw=text[start:end])
        # opaque expression: up to end of line at depth zero
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in "\n#" or text.startswith("//", self.pos):
                break
            if ch in ",}" :
                break
            if ch == '"':
                self.string()
                continue
            if ch in _CLOSERS:
                self.pos += 1
                self.balanced(_CLOSERS[ch])
                continue
            self.pos += 1
        raw = text[start:self.pos].rstrip()
        if not raw:
            raise self.error("missing expression")
        end = start + len(raw)
        return ConfigNode(SCALAR, None, raw, self.span(start, end), self.tool, raw=raw)

    def _at_expression_end(self) -> bool:
        rest = self.text[self.pos:]
        m = re.match(r"[ \t\r]*(?:$|\n|#|//|,|\})", rest)
        return m is not None

    def heredoc(self, m: re.Match) -> ConfigNode:
        start = self.pos
        marker = m.group(2)
        body_start = m.end()
        terminator = re.compile(rf"^[ \t]*{re.escape(marker)}[ \t]*$", re.M)
        t = terminator.search(self.text, body_start)
        if not t:
            raise self.error(f"unterminated heredoc {marker}", start)
        body = self.text[body_start:t.start()]
        if m.group(1):
            lines = body.split("\n")
            indents = [len(x) - len(x.lstrip()) for x in lines if x.strip()]
            cut = min(indents) if indents else 0
            body = "\n".join(x[cut:] for x in lines)
        self.pos = t.end()
        return ConfigNode(SCALAR, None, body.rstrip("\n"), self.span(start, self.pos), self.tool,
                          raw=self.text[start:self.pos])

    def object(self) -> ConfigNode:
        start = self.pos
        self.pos += 1
        children = self.body("}")
        self.pos += 1
        return ConfigNode(MAPPING, None, None, self.span(start, self.pos), self.tool, children,
                          raw=self.text[start:self.pos])


def parse_hcl(text: str) -> ConfigNode:
    parser = _Parser(text)
    children = parser.body(None)
    span = parser.span(0, len(text.rstrip()))
    return ConfigNode(MAPPING, None, None, span, ToolKind.TERRAFORM, children, raw=text[:span.end])
