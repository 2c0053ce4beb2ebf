from __future__ import annotations

from pathlib import Path

import pytest

from iacsmell.frontends import parse
from iacsmell.predicates import PredicateContext
from iacsmell.rules import evaluate

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def lint_text(text: str, tool: str = "ansible", path: str = "snippet.yml", rules=None):
    parsed = parse(text, tool, path)
    return evaluate(parsed, PredicateContext(parsed), rules)


def rule_ids(findings) -> list[str]:
    return [f.rule_id for f in findings]
